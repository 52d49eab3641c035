#pragma once

#include <map>
#include <string>

#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"
#include "rkstab/stability_polynomial.hpp"

namespace rkstab::energy {

/// Sparse polynomial in the operator L; no zero coefficients are stored.
class LPolynomial {
public:
    LPolynomial() = default;

    explicit LPolynomial(const std::map<int, Rational>& coeffs) {
        for (const auto& [power, c] : coeffs) {
            add(power, c);
        }
    }

    static LPolynomial from(const StabilityPolynomial& p) {
        LPolynomial out;
        for (int k = 0; k <= p.degree(); ++k) {
            out.add(k, p.coeff(k));
        }
        return out;
    }

    static LPolynomial monomial(int power, const Rational& c) {
        LPolynomial out;
        out.add(power, c);
        return out;
    }

    const std::map<int, Rational>& coeffs() const noexcept { return coeffs_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }

    /// Lowest power with a nonzero coefficient.
    int ord() const {
        if (coeffs_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "ord of the zero L-polynomial");
        }
        return coeffs_.begin()->first;
    }

    int degree() const {
        if (coeffs_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "degree of the zero L-polynomial");
        }
        return coeffs_.rbegin()->first;
    }

    Rational coeff(int power) const {
        const auto it = coeffs_.find(power);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    void add(int power, const Rational& c) {
        if (c == 0) {
            return;
        }
        auto [it, inserted] = coeffs_.try_emplace(power, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                coeffs_.erase(it);
            }
        }
    }

    /// Multiplies by L^shift; a negative shift requires divisibility.
    LPolynomial shifted(int shift) const {
        LPolynomial out;
        for (const auto& [power, c] : coeffs_) {
            if (power + shift < 0) {
                throw Error(ErrorCode::InvalidArgument, "L-polynomial not divisible by L^" + std::to_string(-shift));
            }
            out.coeffs_.emplace(power + shift, c);
        }
        return out;
    }

    LPolynomial& operator+=(const LPolynomial& other) {
        for (const auto& [power, c] : other.coeffs_) {
            add(power, c);
        }
        return *this;
    }

    LPolynomial& operator-=(const LPolynomial& other) {
        for (const auto& [power, c] : other.coeffs_) {
            add(power, -c);
        }
        return *this;
    }

    friend LPolynomial operator+(LPolynomial a, const LPolynomial& b) { return a += b; }
    friend LPolynomial operator-(LPolynomial a, const LPolynomial& b) { return a -= b; }

    friend LPolynomial operator*(const Rational& s, const LPolynomial& p) {
        LPolynomial out;
        for (const auto& [power, c] : p.coeffs_) {
            out.add(power, s * c);
        }
        return out;
    }

    friend LPolynomial operator*(const LPolynomial& p, const LPolynomial& q) {
        LPolynomial out;
        for (const auto& [i, a] : p.coeffs_) {
            for (const auto& [j, b] : q.coeffs_) {
                out.add(i + j, a * b);
            }
        }
        return out;
    }

    friend bool operator==(const LPolynomial&, const LPolynomial&) = default;

    /// Human-readable form, e.g. "2 + L - 1/2 L^2".
    std::string str() const {
        if (coeffs_.empty()) {
            return "0";
        }
        std::string out;
        bool first = true;
        for (const auto& [power, c] : coeffs_) {
            const bool negative = c < 0;
            const Rational mag = negative ? Rational(-c) : c;
            if (first) {
                out += negative ? "-" : "";
            } else {
                out += negative ? " - " : " + ";
            }
            first = false;
            const bool unit = mag == 1;
            if (power == 0 || !unit) {
                out += to_string(mag);
            }
            if (power > 0) {
                out += (unit ? "" : " ") + std::string("L");
                if (power > 1) {
                    out += "^" + std::to_string(power);
                }
            }
        }
        return out;
    }

private:
    std::map<int, Rational> coeffs_;
};

}  // namespace rkstab::energy
