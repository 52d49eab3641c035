#pragma once

#include <vector>

#include "rkstab/butcher.hpp"
#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"

namespace rkstab {

/// Polynomial P(z) = sum_k coeffs[k] z^k with exact coefficients.
/// Trailing zero coefficients are trimmed; the zero polynomial has no coefficients.
class StabilityPolynomial {
public:
    StabilityPolynomial() = default;
    explicit StabilityPolynomial(RationalVector coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    const RationalVector& coeffs() const noexcept { return coeffs_; }
    bool empty() const noexcept { return coeffs_.empty(); }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    Rational coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : Rational(0);
    }

    Rational operator()(const Rational& z) const {
        Rational acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * z + *it;
        }
        return acc;
    }

    double operator()(double z) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * z + to_double(*it);
        }
        return acc;
    }

    friend StabilityPolynomial operator*(const StabilityPolynomial& p, const StabilityPolynomial& q) {
        if (p.empty() || q.empty()) {
            return {};
        }
        RationalVector out(p.coeffs_.size() + q.coeffs_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
            for (std::size_t j = 0; j < q.coeffs_.size(); ++j) {
                out[i + j] += p.coeffs_[i] * q.coeffs_[j];
            }
        }
        return StabilityPolynomial(std::move(out));
    }

    friend bool operator==(const StabilityPolynomial&, const StabilityPolynomial&) = default;

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) {
            coeffs_.pop_back();
        }
    }

    RationalVector coeffs_;
};

/// Stability polynomial of an explicit method: coeff_0 = 1, coeff_k = b^T A^{k-1} 1.
inline StabilityPolynomial stability_polynomial(const ButcherTableau& t) {
    if (!t.is_explicit()) {
        throw Error(ErrorCode::NotExplicit, t.name() + " has nonzero diagonal or upper-triangular entries");
    }
    const std::size_t s = t.stages();
    RationalVector coeffs{Rational(1)};
    // v holds A^{k-1} 1, starting from the ones vector.
    RationalVector v(s, Rational(1));
    for (std::size_t k = 1; k <= s; ++k) {
        Rational ck = 0;
        for (std::size_t i = 0; i < s; ++i) {
            ck += t.b(i) * v[i];
        }
        coeffs.push_back(ck);
        RationalVector next(s, Rational(0));
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                next[i] += t.a(i, j) * v[j];
            }
        }
        v = std::move(next);
    }
    return StabilityPolynomial(std::move(coeffs));
}

/// Largest q with coeffs[k] = 1/k! for every k <= q (-1 if P(0) != 1).
inline int linear_order(const StabilityPolynomial& p) {
    if (p.empty()) {
        throw Error(ErrorCode::InvalidArgument, "linear_order of the zero polynomial");
    }
    int q = -1;
    for (int k = 0; k <= p.degree(); ++k) {
        if (p.coeff(k) != factorial_inverse(k)) {
            break;
        }
        q = k;
    }
    return q;
}

/// P^n, the stability polynomial of n consecutive steps.
inline StabilityPolynomial compose_polynomial(const StabilityPolynomial& p, int n) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "compose_polynomial requires n >= 1");
    }
    StabilityPolynomial out = p;
    for (int i = 1; i < n; ++i) {
        out = out * p;
    }
    return out;
}

/// I + L + L^2/2 + L^3/6 + L^4/24 + a5 L^5 + a6 L^6, the fourth-order family with up to six stages.
inline StabilityPolynomial rk4_family_polynomial(const Rational& a5, const Rational& a6) {
    return StabilityPolynomial(
        {Rational(1), Rational(1), rat(1, 2), rat(1, 6), rat(1, 24), a5, a6});
}

}  // namespace rkstab
