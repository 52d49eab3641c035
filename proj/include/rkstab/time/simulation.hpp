#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rkstab/butcher.hpp"
#include "rkstab/dg/advection.hpp"
#include "rkstab/dg/io.hpp"
#include "rkstab/error.hpp"
#include "rkstab/time/filter.hpp"
#include "rkstab/time/rk_step.hpp"

namespace rkstab::time {

enum class FilterMode { none, filter, project, mimic_implicit };
enum class InitialCondition { gaussian, box, sine };
/// How the "filter" mode picks epsilon: the linearised estimate or the exact smallest strength.
enum class StrengthRule { linearized, exact };

inline const char* to_string(FilterMode m) {
    switch (m) {
        case FilterMode::none: return "none";
        case FilterMode::filter: return "filter";
        case FilterMode::project: return "project";
        case FilterMode::mimic_implicit: return "mimic_implicit";
    }
    return "?";
}

inline const char* to_string(InitialCondition ic) {
    switch (ic) {
        case InitialCondition::gaussian: return "gaussian";
        case InitialCondition::box: return "box";
        case InitialCondition::sine: return "sine";
    }
    return "?";
}

inline const char* to_string(StrengthRule r) { return r == StrengthRule::linearized ? "linearized" : "exact"; }

inline FilterMode parse_filter_mode(std::string_view s) {
    for (auto m : {FilterMode::none, FilterMode::filter, FilterMode::project, FilterMode::mimic_implicit}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw Error(ErrorCode::ParseError, "unknown filter mode '" + std::string(s) + "'");
}

inline InitialCondition parse_initial_condition(std::string_view s) {
    for (auto ic : {InitialCondition::gaussian, InitialCondition::box, InitialCondition::sine}) {
        if (s == to_string(ic)) {
            return ic;
        }
    }
    throw Error(ErrorCode::ParseError, "unknown initial condition '" + std::string(s) + "'");
}

inline StrengthRule parse_strength_rule(std::string_view s) {
    if (s == "linearized") {
        return StrengthRule::linearized;
    }
    if (s == "exact") {
        return StrengthRule::exact;
    }
    throw Error(ErrorCode::ParseError, "unknown filter strength rule '" + std::string(s) + "'");
}

inline std::function<double(double)> initial_condition(InitialCondition ic) {
    switch (ic) {
        case InitialCondition::gaussian: return dg::gaussian_ic;
        case InitialCondition::box: return dg::box_ic;
        case InitialCondition::sine: return dg::sine_ic;
    }
    return dg::box_ic;
}

struct SimulationConfig {
    std::string method = "explicit_euler";
    FilterMode filter = FilterMode::none;
    int elements = 8;
    int degree = 9;
    int steps = 20000;
    double final_time = 4.0;
    InitialCondition ic = InitialCondition::box;
    int filter_order = 1;
    double velocity = 1.0;
    StrengthRule strength = StrengthRule::exact;

    double dt() const { return final_time / steps; }

    void validate() const {
        if (elements < 1) {
            throw Error(ErrorCode::InvalidArgument, "elements must be positive");
        }
        if (degree < 0) {
            throw Error(ErrorCode::InvalidDegree, "degree must be >= 0");
        }
        if (steps < 1) {
            throw Error(ErrorCode::InvalidArgument, "steps must be positive");
        }
        if (!(final_time > 0.0) || !std::isfinite(final_time)) {
            throw Error(ErrorCode::InvalidArgument, "final_time must be positive");
        }
        if (!(velocity != 0.0) || !std::isfinite(velocity)) {
            throw Error(ErrorCode::InvalidArgument, "velocity must be finite and non-zero");
        }
        check_filter_order(filter_order);
    }
};

namespace detail {

inline int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw Error(ErrorCode::ParseError, "'" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used == v.size()) {
            return out;
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, "'" + key + "' expects a number, got '" + v + "'");
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Flat "key = value" lines; '#' starts a comment. Later duplicates win.
inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError, "config line " + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw Error(ErrorCode::ParseError, "config line " + std::to_string(lineno) + ": empty key or value");
        }
        out[std::move(key)] = std::move(value);
    }
    return out;
}

/// Config keys understood by apply_setting, with their short aliases.
inline const std::map<std::string, std::string>& simulation_keys() {
    static const std::map<std::string, std::string> keys{
        {"method", "method"},   {"filter", "filter"},         {"elements", "elements"}, {"N", "elements"},
        {"degree", "degree"},   {"p", "degree"},              {"steps", "steps"},       {"final_time", "final_time"},
        {"T", "final_time"},    {"ic", "ic"},                 {"filter_order", "filter_order"},
        {"sf", "filter_order"}, {"velocity", "velocity"},     {"strength", "strength"}};
    return keys;
}

inline bool is_simulation_key(const std::string& key) { return simulation_keys().count(key) != 0; }

inline void apply_setting(SimulationConfig& c, const std::string& key, const std::string& value) {
    const auto it = simulation_keys().find(key);
    if (it == simulation_keys().end()) {
        throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
    }
    const std::string& k = it->second;
    if (k == "method") {
        c.method = value;
    } else if (k == "filter") {
        c.filter = parse_filter_mode(value);
    } else if (k == "elements") {
        c.elements = detail::parse_int(key, value);
    } else if (k == "degree") {
        c.degree = detail::parse_int(key, value);
    } else if (k == "steps") {
        c.steps = detail::parse_int(key, value);
    } else if (k == "final_time") {
        c.final_time = detail::parse_real(key, value);
    } else if (k == "ic") {
        c.ic = parse_initial_condition(value);
    } else if (k == "filter_order") {
        c.filter_order = detail::parse_int(key, value);
    } else if (k == "velocity") {
        c.velocity = detail::parse_real(key, value);
    } else if (k == "strength") {
        c.strength = parse_strength_rule(value);
    }
}

struct EnergyRecord {
    double t = 0.0;
    double energy = 0.0;
    double epsilon = 0.0;
    double semidiscrete_term = 0.0;
    double defect_term = 0.0;
    /// |u_m|^2 + semidiscrete_term of the step that produced this row.
    double rhs_target = 0.0;
    double integral = 0.0;
};

using EnergyTrace = std::vector<EnergyRecord>;

inline void write_energy_csv(std::ostream& os, const EnergyTrace& trace) {
    os << "t,energy,epsilon,semidiscrete_term,defect_term\n";
    for (const auto& r : trace) {
        os << dg::format_double(r.t) << ',' << dg::format_double(r.energy) << ',' << dg::format_double(r.epsilon)
           << ',' << dg::format_double(r.semidiscrete_term) << ',' << dg::format_double(r.defect_term) << '\n';
    }
}

inline double max_energy(const EnergyTrace& trace) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace) {
        m = std::max(m, r.energy);
    }
    return m;
}

struct SimulationResult {
    EnergyTrace trace;
    dg::Mesh1D mesh;
    dg::MassNorm norm;
    ModalState initial;
    ModalState final_state;
};

struct AdvectionProblem {
    dg::Mesh1D mesh;
    dg::Semidiscretization semi;
    ModalState initial;
};

inline AdvectionProblem make_problem(const SimulationConfig& c) {
    c.validate();
    const dg::Mesh1D mesh(-1.0, 1.0, c.elements);
    auto semi = dg::build_semidiscretization(mesh, c.degree, c.velocity);
    auto initial = dg::project_initial(initial_condition(c.ic), mesh, c.degree);
    return {mesh, std::move(semi), std::move(initial)};
}

inline EnergyRecord initial_record(const ModalState& u, const dg::MassNorm& w, double dx) {
    const double e = m_norm_sq(u, w);
    return {0.0, e, 0.0, 0.0, 0.0, e, dg::domain_integral(u, dx)};
}

inline SimulationResult run_simulation(const SimulationConfig& c) {
    AdvectionProblem prob = make_problem(c);
    const dg::MassNorm w = prob.semi.norm;
    const DiagonalInner ip = DiagonalInner::from(w, c.elements);
    const double dt = c.dt();
    const double dx = prob.mesh.dx();
    const auto rhs = prob.semi.rhs_function();
    const int sf = c.filter_order;

    SimulationResult out{{}, prob.mesh, w, prob.initial, prob.initial};
    out.trace.reserve(static_cast<std::size_t>(c.steps) + 1);
    out.trace.push_back(initial_record(prob.initial, w, dx));

    const auto shape = [&](Vector v) { return ModalState(c.elements, c.degree, std::move(v)); };

    if (c.method == "implicit_euler") {
        if (c.filter != FilterMode::none) {
            throw Error(ErrorCode::InvalidArgument, "filter modes apply to explicit methods only");
        }
        const ImplicitEuler solver(prob.semi.matrix, dt);
        Vector u = prob.initial.coeffs();
        for (int m = 1; m <= c.steps; ++m) {
            const double e0 = ip.norm_sq(u);
            Vector next = solver.step(u);
            const Vector k = prob.semi.matrix * next;
            EnergyRecord r;
            r.t = m * dt;
            r.semidiscrete_term = 2.0 * dt * ip(next, k);
            r.defect_term = -dt * dt * ip.norm_sq(k);
            r.rhs_target = e0 + r.semidiscrete_term;
            u = std::move(next);
            r.energy = ip.norm_sq(u);
            r.integral = dg::domain_integral(shape(u), dx);
            out.trace.push_back(r);
        }
        out.final_state = shape(std::move(u));
        return out;
    }

    const auto builtin = parse_builtin_method(c.method);
    if (!builtin) {
        throw Error(ErrorCode::InvalidArgument, "unknown method '" + c.method + "'");
    }
    const ButcherTableau tableau = builtin_tableau(*builtin);
    const NumericTableau nt = NumericTableau::from(tableau);
    if (!nt.is_explicit) {
        throw Error(ErrorCode::NotExplicit, "simulation supports explicit tableaux and implicit_euler, got " + c.method);
    }
    if (c.filter == FilterMode::mimic_implicit && tableau != builtin_tableau(BuiltinMethod::explicit_euler)) {
        throw Error(ErrorCode::InvalidArgument, "mimic_implicit is defined for explicit_euler only");
    }

    ModalState u = prob.initial;
    for (int m = 1; m <= c.steps; ++m) {
        EnergyRecord r;
        r.t = m * dt;
        const StepResult step = erk_step(nt, rhs, u.coeffs(), dt);
        const StepBudget budget = step_budget(nt, u.coeffs(), step, dt, ip);
        r.semidiscrete_term = budget.semidiscrete_term;
        r.defect_term = budget.defect_term;
        r.rhs_target = budget.rhs_target;
        ModalState next = shape(step.u_plus);
        switch (c.filter) {
            case FilterMode::none:
                break;
            case FilterMode::filter: {
                r.epsilon = filter_strength(next, budget, w, sf);
                if (c.strength == StrengthRule::exact && r.epsilon > 0.0 &&
                    modal_energies(next, w)[0] < budget.rhs_target) {
                    r.epsilon = exact_filter_strength(next, budget.rhs_target, w, sf);
                }
                next = apply_filter(next, r.epsilon, sf);
                break;
            }
            case FilterMode::project: {
                const double floor = modal_energies(next, w)[0];
                auto proj = simple_projection(next, std::max(budget.rhs_target, floor), w);
                r.epsilon = 1.0 - proj.theta;
                next = std::move(proj.state);
                break;
            }
            case FilterMode::mimic_implicit: {
                auto mim = mimic_implicit_filter(u, dt, rhs, w, sf);
                r.epsilon = mim.eps_first + mim.eps_second;
                next = std::move(mim.state);
                break;
            }
        }
        u = std::move(next);
        r.energy = m_norm_sq(u, w);
        r.integral = dg::domain_integral(u, dx);
        out.trace.push_back(r);
    }
    out.final_state = std::move(u);
    return out;
}

/// exp(T L) applied to the projected initial condition of `c`.
inline ModalState reference_solution(const SimulationConfig& c) {
    const AdvectionProblem prob = make_problem(c);
    return ModalState(c.elements, c.degree,
                      matrix_exponential_reference(prob.semi.matrix, prob.initial.coeffs(), c.final_time));
}

inline double m_distance(const ModalState& a, const ModalState& b, const dg::MassNorm& w) {
    ModalState d(a.elements(), a.degree(), a.coeffs() - b.coeffs());
    return std::sqrt(m_norm_sq(d, w));
}

/// Explicit RK on du/dt = L u with the given inner product; records every step.
inline EnergyTrace run_linear_ivp(const NumericTableau& t, const Matrix& op, const Vector& u0, double final_time,
                                  int steps, const DiagonalInner& ip) {
    if (steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "steps must be positive");
    }
    if (op.rows() != op.cols() || op.cols() != u0.size()) {
        throw Error(ErrorCode::DimensionMismatch, "operator and state do not match");
    }
    const double dt = final_time / steps;
    const Rhs rhs = [&op](const Vector& v) -> Vector { return op * v; };
    EnergyTrace trace;
    trace.reserve(static_cast<std::size_t>(steps) + 1);
    const double e0 = ip.norm_sq(u0);
    trace.push_back({0.0, e0, 0.0, 0.0, 0.0, e0, u0.sum()});
    Vector u = u0;
    for (int m = 1; m <= steps; ++m) {
        const StepResult step = erk_step(t, rhs, u, dt);
        const StepBudget b = step_budget(t, u, step, dt, ip);
        u = step.u_plus;
        trace.push_back({m * dt, ip.norm_sq(u), 0.0, b.semidiscrete_term, b.defect_term, b.rhs_target, u.sum()});
    }
    return trace;
}

}  // namespace rkstab::time
