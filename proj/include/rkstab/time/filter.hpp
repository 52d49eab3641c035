#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rkstab/dg/advection.hpp"
#include "rkstab/error.hpp"
#include "rkstab/time/rk_step.hpp"

namespace rkstab::time {

using dg::MassNorm;
using dg::ModalState;

/// lambda_n^sf with lambda_n = n (n + 1).
inline double filter_eigenvalue(int n, int sf) { return std::pow(static_cast<double>(n) * (n + 1.0), sf); }

inline void check_filter_order(int sf) {
    if (sf < 1) {
        throw Error(ErrorCode::InvalidArgument, "filter order must be a positive integer");
    }
}

/// Energy per mode index, summed over elements: C_n = sum_e u_{e,n}^2 |phi_n|^2.
inline std::vector<double> modal_energies(const ModalState& u, const MassNorm& w) {
    std::vector<double> c(static_cast<std::size_t>(u.modes()), 0.0);
    for (int e = 0; e < u.elements(); ++e) {
        for (int n = 0; n <= u.degree(); ++n) {
            c[n] += u(e, n) * u(e, n) * w.weight(n);
        }
    }
    return c;
}

/// sum_e sum_{n>=1} 2 lambda_n^sf u_{e,n}^2 |phi_n|^2.
inline double filter_denominator(const ModalState& u, const MassNorm& w, int sf) {
    check_filter_order(sf);
    const auto c = modal_energies(u, w);
    double d = 0.0;
    for (int n = 1; n <= u.degree(); ++n) {
        d += 2.0 * filter_eigenvalue(n, sf) * c[n];
    }
    return d;
}

/// Linearised strength for removing `excess` energy; 0 when excess <= 0.
inline double linear_filter_strength(const ModalState& u, double excess, const MassNorm& w, int sf) {
    if (!(excess > 0.0)) {
        return 0.0;
    }
    const double d = filter_denominator(u, w, sf);
    if (!(d > 0.0)) {
        throw Error(ErrorCode::DegenerateDenominator, "no non-constant modes left to filter");
    }
    return excess / d;
}

inline double filter_strength(const ModalState& u_plus, const StepBudget& budget, const MassNorm& w, int sf = 1) {
    return linear_filter_strength(u_plus, m_norm_sq(u_plus, w) - budget.rhs_target, w, sf);
}

/// Smallest eps with |F(eps) u|^2_M <= target, found by Newton from the linearised value and a bisection guard.
inline double exact_filter_strength(const ModalState& u, double target, const MassNorm& w, int sf = 1) {
    check_filter_order(sf);
    const auto c = modal_energies(u, w);
    std::vector<double> lam(c.size());
    for (std::size_t n = 0; n < c.size(); ++n) {
        lam[n] = filter_eigenvalue(static_cast<int>(n), sf);
    }
    const auto energy = [&](double eps) {
        double g = 0.0;
        for (std::size_t n = 0; n < c.size(); ++n) {
            g += std::exp(-2.0 * eps * lam[n]) * c[n];
        }
        return g;
    };
    const auto slope = [&](double eps) {
        double g = 0.0;
        for (std::size_t n = 1; n < c.size(); ++n) {
            g -= 2.0 * lam[n] * std::exp(-2.0 * eps * lam[n]) * c[n];
        }
        return g;
    };
    const double g0 = energy(0.0);
    if (!(g0 > target)) {
        return 0.0;
    }
    if (!(g0 > c[0])) {
        throw Error(ErrorCode::DegenerateDenominator, "no non-constant modes left to filter");
    }
    if (!(target > c[0])) {
        throw Error(ErrorCode::InfeasibleTarget, "target energy is not above the constant-mode energy");
    }
    // g is convex and decreasing, so Newton from eps = 0 increases monotonically towards the root.
    double eps = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double gap = energy(eps) - target;
        if (gap <= 0.0) {
            break;
        }
        const double d = slope(eps);
        if (!(d < 0.0)) {
            break;
        }
        const double next = eps - gap / d;
        if (!(next > eps)) {
            break;
        }
        eps = next;
    }
    if (energy(eps) <= target) {
        return eps;
    }
    double lo = eps;
    double hi = eps > 0.0 ? 2.0 * eps : 1e-16;
    while (energy(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw Error(ErrorCode::NoConvergence, "filter strength bracket diverged");
        }
    }
    for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (energy(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

inline ModalState apply_filter(const ModalState& u, double eps, int sf = 1) {
    if (!(eps >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "filter strength must be >= 0");
    }
    check_filter_order(sf);
    ModalState out = u;
    if (eps == 0.0) {
        return out;
    }
    for (int n = 1; n <= u.degree(); ++n) {
        const double factor = std::exp(-eps * filter_eigenvalue(n, sf));
        for (int e = 0; e < u.elements(); ++e) {
            out(e, n) *= factor;
        }
    }
    return out;
}

struct ProjectionResult {
    ModalState state;
    double theta = 1.0;
};

/// Scales every non-constant mode by one factor theta so that the energy meets target_sq.
inline ProjectionResult simple_projection(const ModalState& u_plus, double target_sq, const MassNorm& w) {
    const auto c = modal_energies(u_plus, w);
    const double e0 = c[0];
    double e = 0.0;
    for (double x : c) {
        e += x;
    }
    if (e <= target_sq) {
        return {u_plus, 1.0};
    }
    if (target_sq < e0) {
        throw Error(ErrorCode::InfeasibleTarget, "target energy is below the constant-mode energy");
    }
    const double theta = std::clamp(std::sqrt((target_sq - e0) / (e - e0)), 0.0, 1.0);
    ModalState out = u_plus;
    for (int e_idx = 0; e_idx < out.elements(); ++e_idx) {
        for (int n = 1; n <= out.degree(); ++n) {
            out(e_idx, n) *= theta;
        }
    }
    return {std::move(out), theta};
}

struct MimicResult {
    ModalState state;
    double eps_first = 0.0;
    double eps_second = 0.0;
    Vector slope0;
};

/// Explicit Euler step followed by two linearised filters with numerators dt^2 |du0/dt|^2 and dt^2 |du+/dt|^2.
inline MimicResult mimic_implicit_filter(const ModalState& u0, double dt, const Rhs& rhs, const MassNorm& w,
                                         int sf = 1) {
    if (!(dt > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    }
    const DiagonalInner ip = DiagonalInner::from(w, u0.elements());
    MimicResult r{u0, 0.0, 0.0, rhs(u0.coeffs())};
    ModalState u(u0.elements(), u0.degree(), u0.coeffs() + dt * r.slope0);
    r.eps_first = linear_filter_strength(u, dt * dt * ip.norm_sq(r.slope0), w, sf);
    u = apply_filter(u, r.eps_first, sf);
    const Vector slope1 = rhs(u.coeffs());
    r.eps_second = linear_filter_strength(u, dt * dt * ip.norm_sq(slope1), w, sf);
    r.state = apply_filter(u, r.eps_second, sf);
    return r;
}

}  // namespace rkstab::time
