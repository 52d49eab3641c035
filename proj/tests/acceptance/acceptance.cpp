// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rkstab/experiments.hpp"
#include "support/soundness.hpp"
#include "support/ssprk104_expected.hpp"

using namespace rkstab;
using namespace rkstab::energy;

namespace {

// Pinned tolerances.
constexpr double root_width = 1e-12;
constexpr double skew_root_tol = 1e-9;
constexpr double ssprk104_root_lo = 0.67492;
constexpr double ssprk104_root_hi = 0.67494;
constexpr double soundness_slack = 1e-12;
constexpr double ivp_energy_bound = 3.0;
constexpr double ivp_slack = 1e-9;
constexpr double semibounded_tol = 1e-12;
constexpr double conservation_tol = 1e-12;
constexpr double energy_step_tol = 1e-10;
constexpr double integral_tol = 1e-10;
constexpr double filter_factor = 2.0;
constexpr double mimic_factor = 5.0;
constexpr double projection_factor = 3.0;
constexpr double gaussian_agreement = 0.20;
constexpr double scan_tol = 1e-3;
constexpr double identity_tol = 1e-12;

struct Criterion {
    int number;
    bool pass = true;
    std::ostringstream detail;

    explicit Criterion(int n) : number(n) {}

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (detail.tellp() > 0) {
            detail << "; ";
        }
        detail << what << (ok ? "" : " [FAILED]");
    }
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

StabilityPolynomial builtin_poly(BuiltinMethod m) { return stability_polynomial(builtin_tableau(m)); }

const CertBound* bound_of(const CertResult<CertBound>& r) { return std::get_if<CertBound>(&r); }
const CertBound* bound_of(CertResult<CertBound>&&) = delete;

void criterion_1(Criterion& c) {
    const auto p = builtin_poly(BuiltinMethod::ssprk104);
    const auto pair = energy_pair(p);
    const auto reduced = idea1_reduce(pair.left, pair.right);
    const auto* red = std::get_if<Reduction>(&reduced);
    c.check(red != nullptr, "reduction succeeds");
    if (red == nullptr) {
        return;
    }
    const CrossForm f = testdata::ssprk104_scale * expand_cross(red->pair.left, red->pair.right);
    const auto expected = testdata::ssprk104_cross_form();
    int matched = 0;
    for (const auto& [key, v] : expected) {
        matched += f.at(key.first, key.second) == Rational(v) ? 1 : 0;
    }
    c.check(matched == static_cast<int>(expected.size()) && f.size() == expected.size(),
            std::to_string(matched) + "/" + std::to_string(expected.size()) + " cross-form coefficients exact");

    const auto cert = certify(p);
    const auto* b = bound_of(cert);
    const auto poly = testdata::ssprk104_bound_poly();
    int poly_matched = 0;
    if (b != nullptr && b->bound_poly.size() == poly.size()) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            poly_matched += testdata::ssprk104_scale * b->bound_poly[i] == Rational(poly[i]) ? 1 : 0;
        }
    }
    c.check(poly_matched == static_cast<int>(poly.size()),
            std::to_string(poly_matched) + "/" + std::to_string(poly.size()) + " bound-polynomial coefficients exact");
}

void criterion_2(Criterion& c) {
    const auto r33 = certify(builtin_poly(BuiltinMethod::ssprk33), BoundMode::general, root_width);
    const auto* g33 = bound_of(r33);
    c.check(g33 && g33->root.lo == 1 && g33->root.hi == 1, "ssprk33 general root = 1 exactly");
    const auto rs33 = certify(builtin_poly(BuiltinMethod::ssprk33), BoundMode::skew, root_width);
    const auto* s33 = bound_of(rs33);
    c.check(s33 && std::abs(s33->root.approx() - std::sqrt(3.0)) <= skew_root_tol,
            "ssprk33 skew root " + (s33 ? num(s33->root.approx()) : std::string("none")) + " ~ sqrt(3)");
    const auto r104 = certify(builtin_poly(BuiltinMethod::ssprk104), BoundMode::general, root_width);
    const auto* g104 = bound_of(r104);
    const double r = g104 ? g104->root.approx() : -1.0;
    c.check(g104 && to_double(g104->root.lo) >= ssprk104_root_lo && to_double(g104->root.hi) <= ssprk104_root_hi,
            "ssprk104 general root " + num(r) + " in [0.67492, 0.67494]");
}

void criterion_3(Criterion& c) {
    c.check(std::holds_alternative<CertFailure>(certify(builtin_poly(BuiltinMethod::rk44_classic))),
            "rk44_classic fails");
    c.check(std::holds_alternative<CertFailure>(rk4_family_report(0, 0)), "rk4 family (0,0) fails");
    const auto twice = certify(compose_polynomial(builtin_poly(BuiltinMethod::rk44_classic), 2));
    const auto* b = bound_of(twice);
    c.check(b && b->root.lo > 0, "rk44 twice certified, root " + (b ? num(b->root.approx()) : std::string("none")));
}

void criterion_4(Criterion& c) {
    struct Case {
        std::string name;
        StabilityPolynomial poly;
        BoundMode mode;
    };
    const std::vector<Case> cases{
        {"ssprk33/general", builtin_poly(BuiltinMethod::ssprk33), BoundMode::general},
        {"ssprk33/skew", builtin_poly(BuiltinMethod::ssprk33), BoundMode::skew},
        {"ssprk104/general", builtin_poly(BuiltinMethod::ssprk104), BoundMode::general},
        {"ssprk104/skew", builtin_poly(BuiltinMethod::ssprk104), BoundMode::skew},
        {"rk44x2/general", compose_polynomial(builtin_poly(BuiltinMethod::rk44_classic), 2), BoundMode::general},
    };
    std::uint64_t seed = 1000;
    for (const auto& k : cases) {
        const auto cert = certify(k.poly, k.mode);
        const auto* b = bound_of(cert);
        if (b == nullptr) {
            c.check(false, k.name + " not certified");
            continue;
        }
        const auto sweep = testsupport::soundness_sweep(k.poly, to_double(b->root.lo), k.mode == BoundMode::skew, ++seed);
        c.check(sweep.worst_growth <= soundness_slack && sweep.trials == 20000,
                k.name + " " + std::to_string(sweep.trials) + " trials, worst growth " + num(sweep.worst_growth));
    }
}

void criterion_5(Criterion& c) {
    const auto ok = experiments::run_ivp104(204);
    const auto bad = experiments::run_ivp104(203);
    c.check(ok.max_energy <= ivp_energy_bound + ivp_slack, "204 steps max energy " + num(ok.max_energy));
    c.check(bad.max_energy > ivp_energy_bound, "203 steps max energy " + num(bad.max_energy));
}

void criterion_6(Criterion& c) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    double worst_semi = -1e300;
    double worst_cons = 0.0;
    int states = 0;
    for (int n_el : {1, 2, 4, 8}) {
        for (int p : {1, 2, 5, 9}) {
            const dg::AdvectionDG op(dg::Mesh1D(-1.0, 1.0, n_el), p);
            const auto w = op.mass_norm();
            for (int trial = 0; trial < 1000; ++trial) {
                dg::ModalState u(n_el, p);
                for (Eigen::Index i = 0; i < u.size(); ++i) {
                    u.coeffs()[i] = g(rng);
                }
                const auto du = op.rhs(u);
                worst_semi = std::max(worst_semi, dg::m_inner(u, du, w) / dg::m_norm_sq(u, w));
                worst_cons = std::max(worst_cons, std::abs(dg::domain_integral(du, w.dx)));
                ++states;
            }
        }
    }
    c.check(worst_semi <= semibounded_tol, "max <u,Lu>/|u|^2 = " + num(worst_semi));
    c.check(worst_cons <= conservation_tol, "max |integral of Lu| = " + num(worst_cons));
    c.check(states == 16000, std::to_string(states) + " states over 16 (N,p) pairs");
}

struct BoxRuns {
    time::SimulationResult none;
    time::SimulationResult filter;
    time::SimulationResult project;
    time::SimulationResult mimic;
    time::SimulationResult implicit;
    dg::ModalState reference;
};

time::SimulationResult run(time::InitialCondition ic, time::FilterMode f, const std::string& method = "explicit_euler") {
    time::SimulationConfig cfg;
    cfg.ic = ic;
    cfg.filter = f;
    cfg.method = method;
    return time::run_simulation(cfg);
}

void criterion_7(Criterion& c, const BoxRuns& b) {
    const double e0 = b.none.trace.front().energy;
    c.check(time::max_energy(b.none.trace) > e0,
            "unfiltered max energy " + num(time::max_energy(b.none.trace)) + " > initial " + num(e0));
    int violations = 0;
    int first = -1;
    double worst = 0.0;
    double drift = 0.0;
    const auto& t = b.filter.trace;
    for (std::size_t m = 1; m < t.size(); ++m) {
        const double excess = t[m].energy - t[m].rhs_target;
        if (excess > energy_step_tol) {
            ++violations;
            first = first < 0 ? static_cast<int>(m) : first;
        }
        worst = std::max(worst, excess);
        drift = std::max(drift, std::abs(t[m].integral - t[0].integral));
    }
    c.check(violations == 0, "per-step energy inequality violated at " + std::to_string(violations) +
                                 " steps (first " + std::to_string(first) + ", worst excess " + num(worst) + ")");
    c.check(drift <= integral_tol, "integral drift " + num(drift));
    const double dn = time::m_distance(b.none.final_state, b.reference, b.none.norm);
    const double df = time::m_distance(b.filter.final_state, b.reference, b.none.norm);
    c.check(dn >= filter_factor * df, "distance none/filtered = " + num(dn) + "/" + num(df) + " = " + num(dn / df));
}

void criterion_8(Criterion& c, const BoxRuns& b) {
    const double dn = time::m_distance(b.none.final_state, b.implicit.final_state, b.none.norm);
    const double dm = time::m_distance(b.mimic.final_state, b.implicit.final_state, b.none.norm);
    c.check(dn >= mimic_factor * dm,
            "distance to implicit none/mimic = " + num(dn) + "/" + num(dm) + " = " + num(dn / dm));
}

void criterion_9(Criterion& c, const BoxRuns& b) {
    const double dp = time::m_distance(b.project.final_state, b.reference, b.none.norm);
    const double df = time::m_distance(b.filter.final_state, b.reference, b.none.norm);
    c.check(dp >= projection_factor * df, "box project/filter = " + num(dp) + "/" + num(df) + " = " + num(dp / df));

    time::SimulationConfig cfg;
    cfg.ic = time::InitialCondition::gaussian;
    const auto ref = time::reference_solution(cfg);
    const auto gf = run(time::InitialCondition::gaussian, time::FilterMode::filter);
    const auto gp = run(time::InitialCondition::gaussian, time::FilterMode::project);
    const double gdf = time::m_distance(gf.final_state, ref, gf.norm);
    const double gdp = time::m_distance(gp.final_state, ref, gf.norm);
    const double rel = std::abs(gdp - gdf) / std::max(gdp, gdf);
    c.check(rel <= gaussian_agreement, "gaussian project/filter = " + num(gdp) + "/" + num(gdf) +
                                           ", relative difference " + num(rel));
}

void criterion_10(Criterion& c) {
    const auto r = experiments::rk2_report();
    c.check(r.mean == Rational(1, 2), "mean b2 = " + to_string(r.mean));
    c.check(r.minimax == Rational(1, 2), "minimax b2 = " + to_string(r.minimax));
    c.check(std::abs(r.mean_scan.argmin - 0.5) <= scan_tol && std::abs(r.minimax_scan.argmin - 0.5) <= scan_tol,
            "scan argmins " + num(r.mean_scan.argmin) + ", " + num(r.minimax_scan.argmin));
}

void criterion_11(Criterion& c) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const auto semi = dg::build_semidiscretization(dg::Mesh1D(), 9);
    const auto ip = time::DiagonalInner::from(semi.norm, 8);
    const auto rhs = semi.rhs_function();
    const auto t22 = time::NumericTableau::from(builtin_tableau(BuiltinMethod::ssprk22));
    auto random_vec = [&](Eigen::Index n) {
        dg::Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v[i] = g(rng);
        }
        return v;
    };
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const dg::Vector u = random_vec(semi.op.dofs());
        const double dt = 1e-3 * (1 + k % 10);
        const auto step = time::erk_step(t22, rhs, u, dt);
        const auto budget = time::step_budget(t22, u, step, dt, ip);
        const double expected = 0.25 * dt * dt * ip.norm_sq(step.slopes[0] - step.slopes[1]);
        worst = std::max(worst, std::abs(budget.defect_term - expected) / std::max(expected, 1e-300));
    }
    c.check(worst <= identity_tol, "ssprk22 defect vs |k1-k2|^2/4, worst relative error " + num(worst));

    const auto t33 = time::NumericTableau::from(builtin_tableau(BuiltinMethod::ssprk33));
    auto defect33 = [&](const dg::Vector& k, const std::vector<double>& s) {
        double d = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                d += t33.defect(i, j) * s[i] * s[j] * ip.norm_sq(k);
            }
        }
        return d;
    };
    dg::Vector k = random_vec(semi.op.dofs());
    k /= std::sqrt(ip.norm_sq(k));
    const double equal = defect33(k, {1.0, 1.0, 1.0});
    const double perturbed = defect33(k, {1.0, 1.0, 1.1});
    const double last_only = defect33(k, {0.0, 0.0, 1.0});
    const double pattern = defect33(k, {4.0 / 3.0, 4.0 / 3.0, 1.0});
    c.check(perturbed > 0.0 && last_only > 0.0,
            "ssprk33 defect positive for perturbed equal slopes (" + num(perturbed) + ", " + num(last_only) +
                "; unperturbed " + num(equal) + ")");
    c.check(pattern < 0.0, "ssprk33 defect negative for 4/3 pattern (" + num(pattern) + ")");
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.reserve(11);
    for (int n = 1; n <= 11; ++n) {
        results.emplace_back(n);
    }
    criterion_1(results[0]);
    criterion_2(results[1]);
    criterion_3(results[2]);
    criterion_4(results[3]);
    criterion_5(results[4]);
    criterion_6(results[5]);

    BoxRuns box{run(time::InitialCondition::box, time::FilterMode::none),
                run(time::InitialCondition::box, time::FilterMode::filter),
                run(time::InitialCondition::box, time::FilterMode::project),
                run(time::InitialCondition::box, time::FilterMode::mimic_implicit),
                run(time::InitialCondition::box, time::FilterMode::none, "implicit_euler"),
                time::reference_solution(time::SimulationConfig{})};
    criterion_7(results[6], box);
    criterion_8(results[7], box);
    criterion_9(results[8], box);
    criterion_10(results[9]);
    criterion_11(results[10]);

    int failed = 0;
    for (auto& r : results) {
        std::printf("%s criterion %d: %s\n", r.pass ? "PASS" : "FAIL", r.number, r.detail.str().c_str());
        failed += r.pass ? 0 : 1;
    }
    std::printf("%d/11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
