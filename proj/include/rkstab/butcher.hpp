#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"

namespace rkstab {

using RationalMatrix = std::vector<std::vector<Rational>>;
using RationalVector = std::vector<Rational>;

/// Exact Butcher tableau of an s-stage Runge-Kutta method.
///
/// Construction checks the row-sum condition c_i = sum_j a_ij and derives the
/// explicit flag from the strictly lower triangular structure of A.
class ButcherTableau {
public:
    ButcherTableau(std::string name, RationalMatrix a, RationalVector b)
        : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)) {
        const std::size_t s = b_.size();
        if (s == 0 || a_.size() != s) {
            throw Error(ErrorCode::InvalidTableau, name_ + ": A must be s x s with s = |b| > 0");
        }
        c_.reserve(s);
        explicit_ = true;
        for (std::size_t i = 0; i < s; ++i) {
            if (a_[i].size() != s) {
                throw Error(ErrorCode::InvalidTableau, name_ + ": A row " + std::to_string(i) + " has wrong length");
            }
            Rational row_sum = 0;
            for (std::size_t j = 0; j < s; ++j) {
                row_sum += a_[i][j];
                if (j >= i && a_[i][j] != 0) {
                    explicit_ = false;
                }
            }
            c_.push_back(row_sum);
        }
    }

    ButcherTableau(std::string name, RationalMatrix a, RationalVector b, const RationalVector& c)
        : ButcherTableau(std::move(name), std::move(a), std::move(b)) {
        if (c.size() != c_.size()) {
            throw Error(ErrorCode::InvalidTableau, name_ + ": c has wrong length");
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] != c_[i]) {
                throw Error(ErrorCode::InvalidTableau,
                            name_ + ": c_" + std::to_string(i) + " differs from the row sum of A");
            }
        }
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t stages() const noexcept { return b_.size(); }
    const RationalMatrix& a() const noexcept { return a_; }
    const RationalVector& b() const noexcept { return b_; }
    const RationalVector& c() const noexcept { return c_; }
    const Rational& a(std::size_t i, std::size_t j) const { return a_.at(i).at(j); }
    const Rational& b(std::size_t i) const { return b_.at(i); }
    bool is_explicit() const noexcept { return explicit_; }

    Rational weight_sum() const {
        Rational sum = 0;
        for (const auto& bi : b_) {
            sum += bi;
        }
        return sum;
    }

    friend bool operator==(const ButcherTableau& x, const ButcherTableau& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }

private:
    std::string name_;
    RationalMatrix a_;
    RationalVector b_;
    RationalVector c_;
    bool explicit_ = true;
};

enum class BuiltinMethod {
    explicit_euler,
    implicit_euler,
    ssprk22,
    ssprk33,
    ssprk104,
    rk44_classic,
    gauss_midpoint,
};

inline constexpr std::array<BuiltinMethod, 7> all_builtin_methods{
    BuiltinMethod::explicit_euler, BuiltinMethod::implicit_euler, BuiltinMethod::ssprk22,
    BuiltinMethod::ssprk33,        BuiltinMethod::ssprk104,       BuiltinMethod::rk44_classic,
    BuiltinMethod::gauss_midpoint,
};

constexpr std::string_view to_string(BuiltinMethod method) {
    switch (method) {
    case BuiltinMethod::explicit_euler: return "explicit_euler";
    case BuiltinMethod::implicit_euler: return "implicit_euler";
    case BuiltinMethod::ssprk22: return "ssprk22";
    case BuiltinMethod::ssprk33: return "ssprk33";
    case BuiltinMethod::ssprk104: return "ssprk104";
    case BuiltinMethod::rk44_classic: return "rk44_classic";
    case BuiltinMethod::gauss_midpoint: return "gauss_midpoint";
    }
    return "unknown";
}

/// Looks up a builtin by its lowercase name; "rk44" is accepted for rk44_classic.
inline std::optional<BuiltinMethod> parse_builtin_method(std::string_view name) {
    for (auto m : all_builtin_methods) {
        if (to_string(m) == name) {
            return m;
        }
    }
    if (name == "rk44") {
        return BuiltinMethod::rk44_classic;
    }
    return std::nullopt;
}

namespace detail {

inline RationalMatrix zeros(std::size_t s) { return RationalMatrix(s, RationalVector(s, Rational(0))); }

inline ButcherTableau make_ssprk104() {
    RationalMatrix a = zeros(10);
    for (std::size_t i = 1; i <= 4; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            a[i][j] = rat(1, 6);
        }
    }
    for (std::size_t i = 5; i < 10; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            a[i][j] = rat(1, 15);
        }
        for (std::size_t j = 5; j < i; ++j) {
            a[i][j] = rat(1, 6);
        }
    }
    RationalVector b(10, rat(1, 10));
    const RationalVector c{0, rat(1, 6), rat(1, 3), rat(1, 2), rat(2, 3),
                           rat(1, 3), rat(1, 2), rat(2, 3), rat(5, 6), 1};
    return ButcherTableau("ssprk104", std::move(a), std::move(b), c);
}

}  // namespace detail

inline ButcherTableau builtin_tableau(BuiltinMethod method) {
    using detail::zeros;
    switch (method) {
    case BuiltinMethod::explicit_euler:
        return ButcherTableau("explicit_euler", zeros(1), {1});
    case BuiltinMethod::implicit_euler:
        return ButcherTableau("implicit_euler", {{1}}, {1});
    case BuiltinMethod::ssprk22:
        return ButcherTableau("ssprk22", {{0, 0}, {1, 0}}, {rat(1, 2), rat(1, 2)});
    case BuiltinMethod::ssprk33:
        return ButcherTableau("ssprk33", {{0, 0, 0}, {1, 0, 0}, {rat(1, 4), rat(1, 4), 0}},
                              {rat(1, 6), rat(1, 6), rat(2, 3)});
    case BuiltinMethod::ssprk104:
        return detail::make_ssprk104();
    case BuiltinMethod::rk44_classic:
        return ButcherTableau("rk44_classic",
                              {{0, 0, 0, 0}, {rat(1, 2), 0, 0, 0}, {0, rat(1, 2), 0, 0}, {0, 0, 1, 0}},
                              {rat(1, 6), rat(1, 3), rat(1, 3), rat(1, 6)});
    case BuiltinMethod::gauss_midpoint:
        return ButcherTableau("gauss_midpoint", {{rat(1, 2)}}, {1});
    }
    throw Error(ErrorCode::InvalidArgument, "unknown builtin method");
}

/// Two-stage second-order explicit family: b1 = 1 - b2, a21 = 1 / (2 b2).
inline ButcherTableau rk2_family(const Rational& b2) {
    if (b2 == 0) {
        throw Error(ErrorCode::ZeroParameter, "rk2_family requires b2 != 0");
    }
    const Rational a21 = Rational(1) / (2 * b2);
    return ButcherTableau("rk2_family(" + to_string(b2) + ")", {{0, 0}, {a21, 0}}, {1 - b2, b2});
}

// JSON: {name, s, A, b, c} with every rational written as a "p/q" string.

inline nlohmann::json to_json(const ButcherTableau& t) {
    auto vec = [](const RationalVector& v) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& x : v) {
            out.push_back(to_string(x));
        }
        return out;
    };
    nlohmann::json a = nlohmann::json::array();
    for (const auto& row : t.a()) {
        a.push_back(vec(row));
    }
    return {{"name", t.name()}, {"s", t.stages()}, {"A", a}, {"b", vec(t.b())}, {"c", vec(t.c())}};
}

inline ButcherTableau tableau_from_json(const nlohmann::json& j) {
    auto vec = [](const nlohmann::json& arr) {
        RationalVector out;
        for (const auto& x : arr) {
            out.push_back(parse_rational(x.get<std::string>()));
        }
        return out;
    };
    RationalMatrix a;
    for (const auto& row : j.at("A")) {
        a.push_back(vec(row));
    }
    ButcherTableau t(j.at("name").get<std::string>(), std::move(a), vec(j.at("b")), vec(j.at("c")));
    if (j.contains("s") && j.at("s").get<std::size_t>() != t.stages()) {
        throw Error(ErrorCode::InvalidTableau, "stage count field disagrees with A");
    }
    return t;
}

}  // namespace rkstab
