#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "rkstab/butcher.hpp"
#include "rkstab/defect.hpp"
#include "rkstab/stability_polynomial.hpp"

using namespace rkstab;

namespace {

// One explicit step of y' = z y from y0 = 1, in exact arithmetic.
Rational scalar_step(const ButcherTableau& t, const Rational& z) {
    const std::size_t s = t.stages();
    std::vector<Rational> y(s);
    Rational out = 1;
    for (std::size_t i = 0; i < s; ++i) {
        y[i] = 1;
        for (std::size_t j = 0; j < i; ++j) {
            y[i] += z * t.a(i, j) * y[j];
        }
        out += z * t.b(i) * y[i];
    }
    return out;
}

ButcherTableau random_explicit_tableau(std::mt19937_64& rng, std::size_t s) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    RationalMatrix a(s, RationalVector(s, Rational(0)));
    RationalVector b(s);
    for (std::size_t i = 0; i < s; ++i) {
        b[i] = rat(num(rng), den(rng));
        for (std::size_t j = 0; j < i; ++j) {
            a[i][j] = rat(num(rng), den(rng));
        }
    }
    return ButcherTableau("random", a, b);
}

}  // namespace

TEST(Tableau, Ssprk22Entries) {
    const auto t = builtin_tableau(BuiltinMethod::ssprk22);
    EXPECT_EQ(t.stages(), 2u);
    EXPECT_EQ(t.a(1, 0), 1);
    EXPECT_EQ(t.a(0, 0), 0);
    EXPECT_EQ(t.b(0), rat(1, 2));
    EXPECT_EQ(t.b(1), rat(1, 2));
}

TEST(Tableau, ExplicitEulerEntries) {
    const auto t = builtin_tableau(BuiltinMethod::explicit_euler);
    EXPECT_EQ(t.stages(), 1u);
    EXPECT_EQ(t.a(0, 0), 0);
    EXPECT_EQ(t.b(0), 1);
    EXPECT_TRUE(t.is_explicit());
}

TEST(Tableau, Ssprk104SixthRow) {
    const auto t = builtin_tableau(BuiltinMethod::ssprk104);
    ASSERT_EQ(t.stages(), 10u);
    for (std::size_t j = 0; j < 10; ++j) {
        EXPECT_EQ(t.a(5, j), j < 5 ? rat(1, 15) : Rational(0)) << j;
        EXPECT_EQ(t.b(j), rat(1, 10));
    }
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(t.a(4, j), rat(1, 6));
    }
    EXPECT_EQ(t.a(9, 5), rat(1, 6));
    EXPECT_EQ(t.a(9, 4), rat(1, 15));
}

TEST(Tableau, ShippedTableauxAreConsistent) {
    for (auto m : all_builtin_methods) {
        const auto t = builtin_tableau(m);
        EXPECT_EQ(t.weight_sum(), 1) << to_string(m);
        for (std::size_t i = 0; i < t.stages(); ++i) {
            Rational row = 0;
            for (std::size_t j = 0; j < t.stages(); ++j) {
                row += t.a(i, j);
            }
            EXPECT_EQ(t.c()[i], row) << to_string(m);
        }
    }
}

TEST(Tableau, ExplicitFlag) {
    EXPECT_FALSE(builtin_tableau(BuiltinMethod::implicit_euler).is_explicit());
    EXPECT_FALSE(builtin_tableau(BuiltinMethod::gauss_midpoint).is_explicit());
    EXPECT_TRUE(builtin_tableau(BuiltinMethod::rk44_classic).is_explicit());
}

TEST(Tableau, RejectsInconsistentAbscissae) {
    RationalMatrix a{{0, 0}, {1, 0}};
    EXPECT_THROW(ButcherTableau("bad", a, {rat(1, 2), rat(1, 2)}, RationalVector{0, rat(1, 2)}), Error);
    EXPECT_THROW(ButcherTableau("bad", a, {Rational(1)}), Error);
}

TEST(Tableau, JsonRoundTrip) {
    for (auto m : all_builtin_methods) {
        const auto t = builtin_tableau(m);
        const auto j = to_json(t);
        EXPECT_EQ(j.at("s").get<int>(), static_cast<int>(t.stages()));
        EXPECT_EQ(tableau_from_json(j), t) << to_string(m);
    }
    EXPECT_EQ(to_json(builtin_tableau(BuiltinMethod::ssprk104)).at("A")[5][0], "1/15");
}

TEST(Tableau, ParseNames) {
    EXPECT_EQ(parse_builtin_method("ssprk33"), BuiltinMethod::ssprk33);
    EXPECT_EQ(parse_builtin_method("rk44"), BuiltinMethod::rk44_classic);
    EXPECT_FALSE(parse_builtin_method("rk45").has_value());
}

TEST(StabilityPolynomial, ExplicitEuler) {
    const auto p = stability_polynomial(builtin_tableau(BuiltinMethod::explicit_euler));
    EXPECT_EQ(p.coeffs(), (RationalVector{1, 1}));
}

TEST(StabilityPolynomial, Ssprk33) {
    const auto p = stability_polynomial(builtin_tableau(BuiltinMethod::ssprk33));
    EXPECT_EQ(p.coeffs(), (RationalVector{1, 1, rat(1, 2), rat(1, 6)}));
}

TEST(StabilityPolynomial, Ssprk104) {
    const auto p = stability_polynomial(builtin_tableau(BuiltinMethod::ssprk104));
    const RationalVector expected{1,           1,           rat(1, 2),      rat(1, 6),       rat(1, 24),       rat(17, 2160),
                                  rat(7, 6480), rat(1, 9720), rat(1, 155520), rat(1, 4199040), rat(1, 251942400)};
    EXPECT_EQ(p.coeffs(), expected);
}

TEST(StabilityPolynomial, RejectsImplicit) {
    try {
        stability_polynomial(builtin_tableau(BuiltinMethod::implicit_euler));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotExplicit);
    }
}

TEST(StabilityPolynomial, MatchesScalarStepOracle) {
    const std::vector<Rational> zs{rat(-1, 3), rat(2, 7), Rational(-2), rat(5, 4)};
    for (auto m : all_builtin_methods) {
        const auto t = builtin_tableau(m);
        if (!t.is_explicit()) {
            continue;
        }
        const auto p = stability_polynomial(t);
        EXPECT_LE(p.degree(), static_cast<int>(t.stages()));
        for (const auto& z : zs) {
            EXPECT_EQ(p(z), scalar_step(t, z)) << to_string(m);
        }
    }
}

TEST(StabilityPolynomial, LinearOrder) {
    EXPECT_EQ(linear_order(stability_polynomial(builtin_tableau(BuiltinMethod::ssprk104))), 4);
    EXPECT_EQ(linear_order(StabilityPolynomial({1, 1})), 1);
    EXPECT_EQ(linear_order(StabilityPolynomial({1, 1, rat(1, 2), rat(1, 6)})), 3);
    EXPECT_EQ(linear_order(StabilityPolynomial({2, 1})), -1);
    EXPECT_THROW(linear_order(StabilityPolynomial()), Error);
}

TEST(StabilityPolynomial, LinearOrderAtLeastClassicalOrder) {
    const std::vector<std::pair<BuiltinMethod, int>> orders{{BuiltinMethod::explicit_euler, 1},
                                                            {BuiltinMethod::ssprk22, 2},
                                                            {BuiltinMethod::ssprk33, 3},
                                                            {BuiltinMethod::ssprk104, 4},
                                                            {BuiltinMethod::rk44_classic, 4}};
    for (const auto& [m, q] : orders) {
        EXPECT_GE(linear_order(stability_polynomial(builtin_tableau(m))), q) << to_string(m);
    }
}

TEST(StabilityPolynomial, ComposeAndFamily) {
    const auto euler = StabilityPolynomial({1, 1});
    EXPECT_EQ(compose_polynomial(euler, 3).coeffs(), (RationalVector{1, 3, 3, 1}));
    EXPECT_EQ(compose_polynomial(euler, 1), euler);
    EXPECT_THROW(compose_polynomial(euler, 0), Error);
    const auto rk44 = stability_polynomial(builtin_tableau(BuiltinMethod::rk44_classic));
    EXPECT_EQ(rk4_family_polynomial(0, 0), rk44);
    EXPECT_EQ(compose_polynomial(rk44, 2).degree(), 8);
}

TEST(Rk2Family, StabilityPolynomialIsIndependentOfB2) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(1, 50);
    std::uniform_int_distribution<int> den(1, 17);
    for (int trial = 0; trial < 10; ++trial) {
        const Rational b2 = rat(num(rng), den(rng)) * (trial % 2 ? 1 : -1);
        EXPECT_EQ(stability_polynomial(rk2_family(b2)).coeffs(), (RationalVector{1, 1, rat(1, 2)})) << b2;
    }
}

TEST(Rk2Family, ClosedForms) {
    EXPECT_EQ(rk2_family(rat(1, 2)).a(), builtin_tableau(BuiltinMethod::ssprk22).a());
    EXPECT_EQ(rk2_family(rat(1, 2)).b(), builtin_tableau(BuiltinMethod::ssprk22).b());
    const auto mid = rk2_family(1);
    EXPECT_EQ(mid.a(1, 0), rat(1, 2));
    EXPECT_EQ(mid.b(), (RationalVector{0, 1}));
    const auto t = rk2_family(rat(3, 4));
    EXPECT_EQ(t.a(1, 0), rat(2, 3));
    EXPECT_EQ(t.b(), (RationalVector{rat(1, 4), rat(3, 4)}));
    try {
        rk2_family(0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroParameter);
    }
}

TEST(DefectMatrix, Examples) {
    EXPECT_EQ(defect_matrix(builtin_tableau(BuiltinMethod::gauss_midpoint)), (RationalMatrix{{0}}));
    EXPECT_TRUE(is_zero_matrix(defect_matrix(builtin_tableau(BuiltinMethod::gauss_midpoint))));
    EXPECT_EQ(defect_matrix(builtin_tableau(BuiltinMethod::ssprk22)),
              (RationalMatrix{{rat(1, 4), rat(-1, 4)}, {rat(-1, 4), rat(1, 4)}}));
    EXPECT_EQ(defect_matrix(builtin_tableau(BuiltinMethod::explicit_euler)), (RationalMatrix{{1}}));
    EXPECT_EQ(defect_matrix(builtin_tableau(BuiltinMethod::implicit_euler)), (RationalMatrix{{-1}}));
}

TEST(DefectMatrix, SymmetricForRandomTableaux) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = random_explicit_tableau(rng, 1 + trial % 6);
        const auto e = defect_matrix(t);
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (std::size_t j = 0; j < e.size(); ++j) {
                EXPECT_EQ(e[i][j], e[j][i]);
            }
        }
    }
}

TEST(ErrorTerm, MatchesDefectQuadraticForm) {
    // explicit_error_term is the quadratic form of the defect matrix.
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = random_explicit_tableau(rng, 1 + trial % 5);
        const auto e = defect_matrix(t);
        std::vector<double> k(t.stages());
        for (auto& x : k) {
            x = g(rng);
        }
        double form = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            for (std::size_t j = 0; j < k.size(); ++j) {
                form += to_double(e[i][j]) * k[i] * k[j];
            }
        }
        const double term = explicit_error_term(t, k, [](double a, double b) { return a * b; });
        EXPECT_NEAR(term, form, 1e-10 * (1.0 + std::abs(form)));
    }
}

TEST(ErrorTerm, Ssprk22EqualsQuarterDifference) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    const auto t = builtin_tableau(BuiltinMethod::ssprk22);
    const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += a[i] * b[i];
        }
        return s;
    };
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> k(2, std::vector<double>(5));
        std::vector<double> diff(5);
        for (int i = 0; i < 5; ++i) {
            k[0][i] = g(rng);
            k[1][i] = g(rng);
            diff[i] = k[0][i] - k[1][i];
        }
        EXPECT_NEAR(explicit_error_term(t, k, dot), 0.25 * dot(diff, diff), 1e-12);
    }
    std::vector<std::vector<double>> same(2, std::vector<double>{1.0, -2.0});
    EXPECT_NEAR(explicit_error_term(t, same, dot), 0.0, 1e-15);
}

TEST(ErrorTerm, Ssprk33HasNoFixedSign) {
    const auto t = builtin_tableau(BuiltinMethod::ssprk33);
    const auto mul = [](double a, double b) { return a * b; };
    EXPECT_NEAR(explicit_error_term(t, std::vector<double>{1, 1, 1}, mul), 0.0, 1e-15);
    EXPECT_NEAR(explicit_error_term(t, std::vector<double>{4.0 / 3, 4.0 / 3, 1}, mul), -80.0 / 324, 1e-14);
    EXPECT_NEAR(explicit_error_term(t, std::vector<double>{0, 0, 1}, mul), 4.0 / 9, 1e-15);
}

TEST(ErrorTerm, Errors) {
    const auto mul = [](double a, double b) { return a * b; };
    try {
        explicit_error_term(builtin_tableau(BuiltinMethod::ssprk22), std::vector<double>{1}, mul);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
    try {
        explicit_error_term(builtin_tableau(BuiltinMethod::implicit_euler), std::vector<double>{1}, mul);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotExplicit);
    }
}

TEST(Rk2Optimisation, Objectives) {
    EXPECT_DOUBLE_EQ(rk2_mean_objective(0.5), 0.5);
    EXPECT_DOUBLE_EQ(rk2_mean_objective(1.0), 1.0);
    EXPECT_DOUBLE_EQ(rk2_minimax_objective(0.5), 1.0);
    EXPECT_DOUBLE_EQ(rk2_minimax_objective(1.0), 2.0);
}

TEST(Rk2Optimisation, MinimaxObjectiveMatchesDenseBoxSearch) {
    // Brute force over a fine grid of the box as an independent check of the corner argument.
    for (double b2 : {0.2, 0.5, 0.9, 1.7}) {
        const double b1 = 1.0 - b2;
        const double a21 = 1.0 / (2.0 * b2);
        double best = -1.0;
        for (int i = 0; i <= 200; ++i) {
            for (int j = 0; j <= 200; ++j) {
                const double x = -1.0 + i / 100.0;
                const double y = -1.0 + j / 100.0;
                best = std::max(best, b1 * b1 * x * x + b2 * b2 * y * y + 2.0 * b2 * (b1 - a21) * x * y);
            }
        }
        EXPECT_NEAR(rk2_minimax_objective(b2), best, 1e-12) << b2;
    }
}

TEST(Rk2Optimisation, Optimisers) {
    EXPECT_EQ(optimize_rk2_mean(), rat(1, 2));
    EXPECT_EQ(optimize_rk2_minimax(), rat(1, 2));
    const auto scan = scan_objective(rk2_minimax_objective);
    EXPECT_NEAR(scan.argmin, 0.5, 1e-3);
    EXPECT_EQ(scan.b2.size(), 1901u);
}

TEST(RationalHelpers, ParseAndPrint) {
    EXPECT_EQ(parse_rational("-6/4"), rat(-3, 2));
    EXPECT_EQ(to_string(rat(2, 4)), "1/2");
    EXPECT_EQ(to_string(Rational(-7)), "-7");
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("abc"), Error);
    EXPECT_EQ(from_double(0.375), rat(3, 8));
    EXPECT_EQ(factorial_inverse(5), rat(1, 120));
}
