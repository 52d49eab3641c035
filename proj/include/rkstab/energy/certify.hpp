#pragma once

// Certified strong-stability time-step bounds for explicit Runge-Kutta methods
// applied to linear semibounded operators (<u, L u> <= 0).
//
// One step is u+ = P(L) u with L = dt * op, so the energy change is
//   |u+|^2 - |u|^2 = <(P - I) u, (P + I) u>.
// The pipeline peels off terms c <v, L v> with c > 0 (each is <= 0 by
// semiboundedness) until both arguments start at the same power L^k, expands the
// remaining bilinear form over the basis <L^i u, L^j u>, discards the adjacent
// terms that are again of the form c <v, L v>, and bounds everything else by
// Cauchy-Schwarz against |L^k u|^2 times powers of |L|. The smallest positive
// root of the resulting polynomial in |L| is the certified bound on dt |op|.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rkstab/energy/lpolynomial.hpp"
#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"
#include "rkstab/stability_polynomial.hpp"

namespace rkstab::energy {

using rkstab::to_string;

enum class Side { left, right };

constexpr std::string_view to_string(Side side) { return side == Side::left ? "left" : "right"; }

/// The two arguments of <left u, right u>.
struct EnergyPair {
    LPolynomial left;
    LPolynomial right;

    friend bool operator==(const EnergyPair&, const EnergyPair&) = default;
};

/// One semiboundedness drop: split = dropped_factor * (other side / L) + remainder,
/// where matched = dropped_factor * (other side / L) and the dropped term is
/// dropped_factor * <w, L w> with w = (other side / L) u.
struct ReductionStep {
    Side side;
    Rational dropped_factor;
    LPolynomial split;
    LPolynomial matched;
    LPolynomial remainder;
};

using ReductionTrace = std::vector<ReductionStep>;

enum class FailureReason {
    NonPositiveMatchCoefficient,
    OrderGapExceedsOne,
    NoNegativeAnchor,
    NoSignChange,
};

constexpr std::string_view to_string(FailureReason reason) {
    switch (reason) {
    case FailureReason::NonPositiveMatchCoefficient: return "NonPositiveMatchCoefficient";
    case FailureReason::OrderGapExceedsOne: return "OrderGapExceedsOne";
    case FailureReason::NoNegativeAnchor: return "NoNegativeAnchor";
    case FailureReason::NoSignChange: return "NoSignChange";
    }
    return "Unknown";
}

struct CertFailure {
    FailureReason reason;
    EnergyPair state_at_failure;
    ReductionTrace trace;
    std::string detail;
};

struct Reduction {
    EnergyPair pair;
    ReductionTrace trace;
};

template <class T>
using CertResult = std::variant<T, CertFailure>;

/// Symmetric bilinear form sum c_ij <L^i u, L^j u>, stored with i <= j.
class CrossForm {
public:
    using Key = std::pair<int, int>;

    void add(int i, int j, const Rational& c) {
        if (c == 0) {
            return;
        }
        const Key key = i <= j ? Key{i, j} : Key{j, i};
        auto [it, inserted] = entries_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                entries_.erase(it);
            }
        }
    }

    Rational at(int i, int j) const {
        const auto it = entries_.find(i <= j ? Key{i, j} : Key{j, i});
        return it == entries_.end() ? Rational(0) : it->second;
    }

    void erase(int i, int j) { entries_.erase(i <= j ? Key{i, j} : Key{j, i}); }

    const std::map<Key, Rational>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    friend CrossForm operator*(const Rational& s, const CrossForm& f) {
        CrossForm out;
        for (const auto& [key, c] : f.entries_) {
            out.add(key.first, key.second, s * c);
        }
        return out;
    }

    friend bool operator==(const CrossForm&, const CrossForm&) = default;

private:
    std::map<Key, Rational> entries_;
};

enum class BoundMode { general, skew };

constexpr std::string_view to_string(BoundMode mode) { return mode == BoundMode::general ? "general" : "skew"; }

struct RootInterval {
    Rational lo;
    Rational hi;

    double approx() const { return to_double((lo + hi) / 2); }
};

struct CertBound {
    int anchor_order = 0;
    /// Coefficients in x = |L|, constant first.
    RationalVector bound_poly;
    /// Negative diagonal terms c_jj |L^j u|^2, j > anchor, left out of the bound as slack.
    std::map<int, Rational> retained_negatives;
    RootInterval root;
    ReductionTrace trace;
};

inline constexpr double default_root_tolerance = 1e-6;

// ---------------------------------------------------------------------------

/// (P - I, P + I) for a consistent stability polynomial P(0) = 1.
inline EnergyPair energy_pair(const StabilityPolynomial& p) {
    if (p.coeff(0) != 1) {
        throw Error(ErrorCode::Inconsistent, "stability polynomial must satisfy P(0) = 1");
    }
    const LPolynomial lp = LPolynomial::from(p);
    const LPolynomial one = LPolynomial::monomial(0, 1);
    return {lp - one, lp + one};
}

/// Peels semibounded terms off the lower-order side until both sides share their lowest order.
///
/// With lo the side of lower order l and hi the other of order l + 1, lo is split as
/// c * (hi / L) + remainder, c = lo[l] / hi[l + 1]. The piece c <(hi/L) u, L (hi/L) u> is
/// non-positive exactly when c > 0 and is dropped. Anything else is reported as a failure.
inline CertResult<Reduction> idea1_reduce(const LPolynomial& left, const LPolynomial& right) {
    Reduction out{{left, right}, {}};
    if (left.is_zero() || right.is_zero()) {
        return out;
    }
    const int max_steps = 2 * std::max(left.degree(), right.degree()) + 2;
    auto& pair = out.pair;
    while (!pair.left.is_zero() && !pair.right.is_zero() && pair.left.ord() != pair.right.ord()) {
        if (static_cast<int>(out.trace.size()) > max_steps) {
            throw std::logic_error("idea1_reduce: no progress");
        }
        const bool left_is_lower = pair.left.ord() < pair.right.ord();
        LPolynomial& lo = left_is_lower ? pair.left : pair.right;
        const LPolynomial& hi = left_is_lower ? pair.right : pair.left;
        const int l = lo.ord();
        const int h = hi.ord();
        if (h - l != 1) {
            return CertFailure{FailureReason::OrderGapExceedsOne, pair, out.trace,
                               "lowest orders " + std::to_string(l) + " and " + std::to_string(h) +
                                   " differ by more than one"};
        }
        const Rational c = lo.coeff(l) / hi.coeff(h);
        if (c <= 0) {
            return CertFailure{FailureReason::NonPositiveMatchCoefficient, pair, out.trace,
                               "match coefficient " + to_string(c) + " at order " + std::to_string(l) +
                                   " is not positive"};
        }
        LPolynomial matched = c * hi.shifted(-1);
        LPolynomial remainder = lo - matched;
        if (!remainder.is_zero() && remainder.ord() <= l) {
            throw std::logic_error("idea1_reduce: remainder order did not increase");
        }
        out.trace.push_back({left_is_lower ? Side::left : Side::right, c, lo, matched, remainder});
        lo = std::move(remainder);
    }
    return out;
}

inline CrossForm expand_cross(const LPolynomial& left, const LPolynomial& right) {
    CrossForm form;
    for (const auto& [i, a] : left.coeffs()) {
        for (const auto& [j, b] : right.coeffs()) {
            form.add(i, j, a * b);
        }
    }
    return form;
}

/// Removes c <L^i u, L^{i+1} u> with c > 0; each equals c <v, L v> <= 0 for v = L^i u.
inline CrossForm drop_adjacent_positive(const CrossForm& f) {
    CrossForm out;
    for (const auto& [key, c] : f.entries()) {
        if (key.second == key.first + 1 && c > 0) {
            continue;
        }
        out.add(key.first, key.second, c);
    }
    return out;
}

/// Exact Horner evaluation of a constant-first coefficient vector.
inline Rational evaluate(const RationalVector& coeffs, const Rational& x) {
    Rational acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

namespace detail {

inline int sign(const Rational& x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); }

/// Smallest positive root of p with p(0) < 0 and all other coefficients >= 0
/// (p is increasing on [0, inf), so the positive root is unique). Bisection in
/// exact arithmetic; an exactly hit root collapses the interval to a point.
inline std::optional<RootInterval> isolate_root(const RationalVector& p, const Rational& width) {
    const Rational limit = Rational(BigInt(1) << 64);
    Rational lo = 0;
    Rational hi = 1;
    while (true) {
        const int s = sign(evaluate(p, hi));
        if (s == 0) {
            return RootInterval{hi, hi};
        }
        if (s > 0) {
            break;
        }
        if (hi >= limit) {
            return std::nullopt;
        }
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > width) {
        const Rational mid = (lo + hi) / 2;
        const int s = sign(evaluate(p, mid));
        if (s == 0) {
            return RootInterval{mid, mid};
        }
        (s < 0 ? lo : hi) = mid;
    }
    return RootInterval{lo, hi};
}

}  // namespace detail

/// Bounds a reduced form by c_kk |L^k u|^2 + sum |c_ij| |L|^{i+j-2k} |L^k u|^2 and isolates
/// the smallest positive root of that polynomial in |L|.
///
/// In skew mode terms with i + j odd are deleted first: <L^i u, L^j u> = 0 for skew L.
inline CertResult<CertBound> cauchy_schwarz_bound(const CrossForm& form, BoundMode mode,
                                                  double tol = default_root_tolerance) {
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "root tolerance must be positive");
    }
    CrossForm f;
    for (const auto& [key, c] : form.entries()) {
        if (mode == BoundMode::skew && (key.first + key.second) % 2 != 0) {
            continue;
        }
        f.add(key.first, key.second, c);
    }
    if (f.empty()) {
        return CertFailure{FailureReason::NoSignChange, {}, {},
                           "energy change vanishes identically: unconditionally stable under this estimate"};
    }
    int k = f.entries().begin()->first.first;
    for (const auto& [key, c] : f.entries()) {
        k = std::min(k, key.first);
    }
    const Rational anchor = f.at(k, k);
    if (anchor >= 0) {
        return CertFailure{FailureReason::NoNegativeAnchor, {}, {},
                           "coefficient of |L^" + std::to_string(k) + " u|^2 is " + to_string(anchor) +
                               ", not negative"};
    }

    CertBound bound;
    bound.anchor_order = k;
    for (const auto& [key, c] : f.entries()) {
        const auto [i, j] = key;
        if (i == k && j == k) {
            continue;
        }
        if (i == j && c < 0) {
            bound.retained_negatives[i] = c;
            continue;
        }
        const auto power = static_cast<std::size_t>(i + j - 2 * k);
        if (bound.bound_poly.size() <= power) {
            bound.bound_poly.resize(power + 1, Rational(0));
        }
        bound.bound_poly[power] += abs(c);
    }
    if (bound.bound_poly.empty()) {
        bound.bound_poly.resize(1, Rational(0));
    }
    bound.bound_poly[0] = anchor;

    const auto root = detail::isolate_root(bound.bound_poly, from_double(tol));
    if (!root) {
        return CertFailure{FailureReason::NoSignChange, {}, {},
                           "bound polynomial has no positive root below 2^64: unconditionally stable under this estimate"};
    }
    bound.root = *root;
    return bound;
}

/// Full pipeline: energy_pair, idea1_reduce, expand_cross, drop_adjacent_positive,
/// cauchy_schwarz_bound. On success, dt |op| <= root.lo implies |u+| <= |u| for every
/// bounded semibounded op (skew-symmetric op in skew mode).
inline CertResult<CertBound> certify(const StabilityPolynomial& p, BoundMode mode = BoundMode::general,
                                     double tol = default_root_tolerance) {
    const EnergyPair start = energy_pair(p);
    auto reduced = idea1_reduce(start.left, start.right);
    if (auto* failure = std::get_if<CertFailure>(&reduced)) {
        return std::move(*failure);
    }
    auto& reduction = std::get<Reduction>(reduced);
    const CrossForm form = drop_adjacent_positive(expand_cross(reduction.pair.left, reduction.pair.right));
    auto result = cauchy_schwarz_bound(form, mode, tol);
    if (auto* failure = std::get_if<CertFailure>(&result)) {
        failure->state_at_failure = reduction.pair;
        failure->trace = std::move(reduction.trace);
    } else {
        std::get<CertBound>(result).trace = std::move(reduction.trace);
    }
    return result;
}

/// certify() on I + L + L^2/2 + L^3/6 + L^4/24 + a5 L^5 + a6 L^6.
inline CertResult<CertBound> rk4_family_report(const Rational& a5, const Rational& a6,
                                               BoundMode mode = BoundMode::general,
                                               double tol = default_root_tolerance) {
    return certify(rk4_family_polynomial(a5, a6), mode, tol);
}

}  // namespace rkstab::energy
