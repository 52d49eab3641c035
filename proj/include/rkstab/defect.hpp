#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rkstab/butcher.hpp"
#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"

namespace rkstab {

/// E_ij = b_i b_j - b_i a_ij - b_j a_ji, the coefficient matrix of the (dt)^2 term
/// in the one-step energy balance. Zero iff the method conserves quadratic invariants.
inline RationalMatrix defect_matrix(const ButcherTableau& t) {
    const std::size_t s = t.stages();
    RationalMatrix e(s, RationalVector(s, Rational(0)));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            e[i][j] = t.b(i) * t.b(j) - t.b(i) * t.a(i, j) - t.b(j) * t.a(j, i);
        }
    }
    return e;
}

inline bool is_zero_matrix(const RationalMatrix& m) {
    for (const auto& row : m) {
        for (const auto& x : row) {
            if (x != 0) {
                return false;
            }
        }
    }
    return true;
}

/// sum_i b_i^2 |k_i|^2 + 2 sum_{i>j} b_i (b_j - a_ij) <k_i, k_j>, without the dt^2 factor.
///
/// `inner` is any symmetric bilinear form on State.
template <class State, class Inner>
double explicit_error_term(const ButcherTableau& t, std::span<const State> slopes, Inner&& inner) {
    if (!t.is_explicit()) {
        throw Error(ErrorCode::NotExplicit, t.name());
    }
    const std::size_t s = t.stages();
    if (slopes.size() != s) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(s) + " slopes, got " + std::to_string(slopes.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        const double bi = to_double(t.b(i));
        sum += bi * bi * inner(slopes[i], slopes[i]);
        for (std::size_t j = 0; j < i; ++j) {
            const double coeff = to_double(t.b(i) * (t.b(j) - t.a(i, j)));
            if (coeff != 0.0) {
                sum += 2.0 * coeff * inner(slopes[i], slopes[j]);
            }
        }
    }
    return sum;
}

template <class State, class Inner>
double explicit_error_term(const ButcherTableau& t, const std::vector<State>& slopes, Inner&& inner) {
    return explicit_error_term(t, std::span<const State>(slopes), std::forward<Inner>(inner));
}

// Two-stage second-order optimisation objectives, parametrised by b2.

/// (1 - b2)^2 + b2^2, proportional to the mean of the error term over the unit ball.
inline double rk2_mean_objective(double b2) { return (1.0 - b2) * (1.0 - b2) + b2 * b2; }

/// max over the corners of [-1,1]^2 of b1^2 x^2 + b2^2 y^2 + 2 b2 (b1 - a21) x y.
/// Both diagonal coefficients are nonnegative, so the quadratic is convex along each
/// axis and its maximum over the box sits at a corner.
inline double rk2_minimax_objective(double b2) {
    const double b1 = 1.0 - b2;
    const double a21 = 1.0 / (2.0 * b2);
    const double cross = 2.0 * b2 * (b1 - a21);
    double best = -INFINITY;
    for (double x : {-1.0, 1.0}) {
        for (double y : {-1.0, 1.0}) {
            best = std::max(best, b1 * b1 * x * x + b2 * b2 * y * y + cross * x * y);
        }
    }
    return best;
}

struct ScanResult {
    double argmin = 0.0;
    double minimum = INFINITY;
    std::vector<double> b2;
    std::vector<double> value;
};

/// Evaluates `objective` on lo, lo + step, ..., hi (grid indices, no drift from accumulation).
template <class F>
ScanResult scan_objective(F&& objective, double lo = 0.1, double hi = 2.0, double step = 1e-3) {
    ScanResult out;
    const auto n = static_cast<long>(std::llround((hi - lo) / step));
    for (long i = 0; i <= n; ++i) {
        const double b2 = lo + static_cast<double>(i) * step;
        const double v = objective(b2);
        out.b2.push_back(b2);
        out.value.push_back(v);
        if (v < out.minimum) {
            out.minimum = v;
            out.argmin = b2;
        }
    }
    return out;
}

namespace detail {

/// argmin of alpha x^2 + beta x + gamma for alpha > 0.
inline Rational quadratic_argmin(const Rational& alpha, const Rational& beta) { return -beta / (2 * alpha); }

inline void confirm_scan(const Rational& closed, const ScanResult& scan, const char* what) {
    if (std::abs(scan.argmin - to_double(closed)) > 1e-3) {
        throw Error(ErrorCode::NoConvergence, std::string(what) + ": grid scan disagrees with closed form");
    }
}

}  // namespace detail

/// Minimiser of the mean error objective over the two-stage family.
///
/// Closed form: (1 - b)^2 + b^2 = 2 b^2 - 2 b + 1. Confirmed by a grid scan.
inline Rational optimize_rk2_mean() {
    const Rational best = detail::quadratic_argmin(2, -2);
    detail::confirm_scan(best, scan_objective(rk2_mean_objective), "optimize_rk2_mean");
    return best;
}

/// Minimiser of the maximal error objective over the two-stage family.
///
/// With b1 = 1 - b, a21 = 1/(2b) the cross coefficient b (b1 - a21) equals
/// -(b - 1/2)^2 - 1/4 < 0, so the corner maximum is b1^2 + b^2 + 2 ((b - 1/2)^2 + 1/4)
/// = 4 b^2 - 4 b + 2. Confirmed by a grid scan over the corner-enumeration oracle.
inline Rational optimize_rk2_minimax() {
    const Rational best = detail::quadratic_argmin(4, -4);
    detail::confirm_scan(best, scan_objective(rk2_minimax_objective), "optimize_rk2_minimax");
    return best;
}

}  // namespace rkstab
