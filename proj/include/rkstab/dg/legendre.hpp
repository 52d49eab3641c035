#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "rkstab/error.hpp"

namespace rkstab::dg {

/// (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    if (n == 0) {
        return {1.0, 0.0};
    }
    double p_prev = 1.0;
    double p = x;
    double dp_prev = 0.0;
    double dp = 1.0;
    for (int k = 2; k <= n; ++k) {
        const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        const double dp_next = dp_prev + (2.0 * k - 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    return {p, dp};
}

inline double legendre(int n, double x) { return legendre_with_derivative(n, x).first; }

/// All of P_0(x) .. P_n(x).
inline std::vector<double> legendre_all(int n, double x) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    out[0] = 1.0;
    if (n >= 1) {
        out[1] = x;
    }
    for (int k = 2; k <= n; ++k) {
        out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
    }
    return out;
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least one point");
    }
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double dp = legendre_with_derivative(n, x).second;
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

/// n-point Legendre-Gauss-Lobatto rule on [-1, 1] (n >= 2), endpoints included, nodes ascending.
inline QuadratureRule gauss_lobatto(int n) {
    if (n < 2) {
        throw Error(ErrorCode::InvalidArgument, "Gauss-Lobatto rule needs at least two points");
    }
    const int N = n - 1;
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        // Interior nodes are the roots of P_N'; Newton on (1 - x^2) P_N'(x) = N (P_{N-1} - x P_N).
        double x = -std::cos(std::numbers::pi * i / N);
        if (i != 0 && i != N) {
            for (int iter = 0; iter < 100; ++iter) {
                const auto [p, dp] = legendre_with_derivative(N, x);
                // d/dx P_N' = (2x P_N' - N(N+1) P_N) / (1 - x^2)
                const double ddp = (2.0 * x * dp - N * (N + 1.0) * p) / (1.0 - x * x);
                const double dx = dp / ddp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    break;
                }
            }
        }
        const double p = legendre(N, x);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / (N * (N + 1.0) * p * p);
    }
    return rule;
}

/// Nodal differentiation matrix D_ij = l_j'(x_i) from barycentric weights.
inline std::vector<std::vector<double>> differentiation_matrix(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> bary(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (k != j) {
                bary[j] *= (x[j] - x[k]);
            }
        }
        bary[j] = 1.0 / bary[j];
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                d[i][j] = (bary[j] / bary[i]) / (x[i] - x[j]);
                diag -= d[i][j];
            }
        }
        d[i][i] = diag;
    }
    return d;
}

}  // namespace rkstab::dg
