#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "rkstab/error.hpp"

namespace rkstab {

/// Exact rational number, always normalised (lowest terms, positive denominator).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) {
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    }
    return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) {
    const BigInt den = denominator_of(r);
    if (den == 1) {
        return numerator_of(r).str();
    }
    return numerator_of(r).str() + "/" + den.str();
}

namespace detail {

inline BigInt parse_integer(std::string_view text) {
    std::size_t pos = 0;
    if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
        pos = 1;
    }
    if (pos == text.size()) {
        throw Error(ErrorCode::ParseError, "empty integer in '" + std::string(text) + "'");
    }
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw Error(ErrorCode::ParseError, "bad integer '" + std::string(text) + "'");
        }
    }
    BigInt value(std::string(text.substr(pos)));
    return text[0] == '-' ? BigInt(-value) : value;
}

}  // namespace detail

/// Parses "p/q" or "p" exactly.
inline Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(detail::parse_integer(text));
    }
    const BigInt num = detail::parse_integer(text.substr(0, slash));
    const BigInt den = detail::parse_integer(text.substr(slash + 1));
    if (den == 0) {
        throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    }
    return Rational(num, den);
}

/// Exact value of a finite double (every double is a dyadic rational).
inline Rational from_double(double x) { return Rational(x); }

inline Rational factorial_inverse(int k) {
    BigInt f = 1;
    for (int i = 2; i <= k; ++i) {
        f *= i;
    }
    return Rational(BigInt(1), f);
}

}  // namespace rkstab
