// Prints the per-step energy budget of an explicit method on the DG advection operator.
//
//   energy_budget_demo [method] [steps]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "rkstab/time/rk_step.hpp"
#include "rkstab/time/simulation.hpp"

int main(int argc, char** argv) {
    using namespace rkstab;
    const std::string name = argc > 1 ? argv[1] : "ssprk33";
    const int steps = argc > 2 ? std::atoi(argv[2]) : 10;
    const auto method = parse_builtin_method(name);
    if (!method || steps < 1) {
        std::fprintf(stderr, "usage: energy_budget_demo [method] [steps]\n");
        return 1;
    }

    time::SimulationConfig cfg;
    cfg.ic = time::InitialCondition::gaussian;
    const auto prob = time::make_problem(cfg);
    const auto ip = time::DiagonalInner::from(prob.semi.norm, cfg.elements);
    const auto tableau = time::NumericTableau::from(builtin_tableau(*method));
    const auto rhs = prob.semi.rhs_function();
    const double dt = cfg.dt() * 100.0;

    dg::Vector u = prob.initial.coeffs();
    std::printf("%4s %22s %22s %22s\n", "step", "energy", "semidiscrete", "defect");
    for (int m = 1; m <= steps; ++m) {
        const auto step = time::erk_step(tableau, rhs, u, dt);
        const auto budget = time::step_budget(tableau, u, step, dt, ip);
        u = step.u_plus;
        std::printf("%4d %22.15e %22.15e %22.15e\n", m, ip.norm_sq(u), budget.semidiscrete_term, budget.defect_term);
    }
    return 0;
}
