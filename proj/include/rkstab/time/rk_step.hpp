#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rkstab/butcher.hpp"
#include "rkstab/defect.hpp"
#include "rkstab/dg/advection.hpp"
#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"

namespace rkstab::time {

using dg::Matrix;
using dg::Vector;
using Rhs = std::function<Vector(const Vector&)>;

/// <a, b>_M for a diagonal mass matrix.
struct DiagonalInner {
    Vector weights;

    static DiagonalInner identity(Eigen::Index n) { return {Vector::Ones(n)}; }
    static DiagonalInner from(const dg::MassNorm& norm, int elements) { return {norm.flat(elements)}; }

    double operator()(const Vector& a, const Vector& b) const {
        if (a.size() != weights.size() || b.size() != weights.size()) {
            throw Error(ErrorCode::DimensionMismatch, "inner product operands do not match the mass matrix");
        }
        return (a.array() * b.array() * weights.array()).sum();
    }
    double norm_sq(const Vector& a) const { return (*this)(a, a); }
};

/// Floating point copy of a tableau together with its defect matrix.
struct NumericTableau {
    std::string name;
    int stages = 0;
    Matrix a;
    Vector b;
    Matrix defect;
    bool is_explicit = false;

    static NumericTableau from(const ButcherTableau& t) {
        const int s = t.stages();
        NumericTableau out{t.name(), s, Matrix::Zero(s, s), Vector::Zero(s), Matrix::Zero(s, s), t.is_explicit()};
        const RationalMatrix d = defect_matrix(t);
        for (int i = 0; i < s; ++i) {
            out.b[i] = to_double(t.b(i));
            for (int j = 0; j < s; ++j) {
                out.a(i, j) = to_double(t.a(i, j));
                out.defect(i, j) = to_double(d[i][j]);
            }
        }
        return out;
    }
};

struct StepResult {
    Vector u_plus;
    std::vector<Vector> stages;
    std::vector<Vector> slopes;
};

inline StepResult erk_step(const NumericTableau& t, const Rhs& rhs, const Vector& u0, double dt) {
    if (!t.is_explicit) {
        throw Error(ErrorCode::NotExplicit, "erk_step needs an explicit tableau, got " + t.name);
    }
    if (!(dt > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    }
    StepResult r;
    r.stages.reserve(t.stages);
    r.slopes.reserve(t.stages);
    for (int i = 0; i < t.stages; ++i) {
        Vector ui = u0;
        for (int j = 0; j < i; ++j) {
            if (t.a(i, j) != 0.0) {
                ui.noalias() += (dt * t.a(i, j)) * r.slopes[j];
            }
        }
        r.slopes.push_back(rhs(ui));
        if (r.slopes.back().size() != u0.size()) {
            throw Error(ErrorCode::DimensionMismatch, "right-hand side changed the state size");
        }
        r.stages.push_back(std::move(ui));
    }
    r.u_plus = u0;
    for (int i = 0; i < t.stages; ++i) {
        if (t.b[i] != 0.0) {
            r.u_plus.noalias() += (dt * t.b[i]) * r.slopes[i];
        }
    }
    return r;
}

inline StepResult erk_step(const ButcherTableau& t, const Rhs& rhs, const Vector& u0, double dt) {
    return erk_step(NumericTableau::from(t), rhs, u0, dt);
}

struct StepBudget {
    double semidiscrete_term = 0.0;
    double defect_term = 0.0;
    double rhs_target = 0.0;
    /// (|u+|^2 - |u0|^2) - (semidiscrete_term + defect_term), measured.
    double identity_residual = 0.0;
};

inline constexpr double budget_identity_tolerance = 1e-10;

/// Energy budget of one explicit step. Throws Inconsistent if the energy identity fails.
inline StepBudget step_budget(const NumericTableau& t, const Vector& u0, const StepResult& step, double dt,
                              const DiagonalInner& ip) {
    const auto s = static_cast<std::size_t>(t.stages);
    if (step.stages.size() != s || step.slopes.size() != s) {
        throw Error(ErrorCode::DimensionMismatch, "stage count does not match the tableau");
    }
    StepBudget out;
    double scale = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        const double term = 2.0 * dt * t.b[static_cast<Eigen::Index>(i)] * ip(step.stages[i], step.slopes[i]);
        out.semidiscrete_term += term;
        scale += std::abs(term);
    }
    std::vector<double> knorm(s);
    for (std::size_t i = 0; i < s; ++i) {
        knorm[i] = std::sqrt(ip.norm_sq(step.slopes[i]));
    }
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            const double d = t.defect(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (d != 0.0) {
                out.defect_term += dt * dt * d * ip(step.slopes[i], step.slopes[j]);
                scale += std::abs(dt * dt * d) * knorm[i] * knorm[j];
            }
        }
    }
    const double e0 = ip.norm_sq(u0);
    const double e1 = ip.norm_sq(step.u_plus);
    out.rhs_target = e0 + out.semidiscrete_term;
    out.identity_residual = (e1 - e0) - (out.semidiscrete_term + out.defect_term);
    scale = std::max({scale, e0, e1});
    if (std::abs(out.identity_residual) > budget_identity_tolerance * scale) {
        throw Error(ErrorCode::Inconsistent, "energy identity violated: residual " + std::to_string(out.identity_residual));
    }
    return out;
}

/// Dense LU of (I - dt L), factored once and reused.
class ImplicitEuler {
public:
    ImplicitEuler(const Matrix& op, double dt) : op_(op), dt_(dt) {
        if (op.rows() != op.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "operator matrix must be square");
        }
        if (!(dt > 0.0)) {
            throw Error(ErrorCode::SingularSystem, "implicit Euler needs dt > 0");
        }
        const Matrix system = Matrix::Identity(op.rows(), op.cols()) - dt * op;
        lu_.compute(system);
        if (!(lu_.rcond() > 1e-14)) {
            throw Error(ErrorCode::SingularSystem, "I - dt L is singular to working precision");
        }
    }

    Vector step(const Vector& u0) const {
        if (u0.size() != op_.rows()) {
            throw Error(ErrorCode::DimensionMismatch, "state does not match the operator");
        }
        return lu_.solve(u0);
    }

    double dt() const noexcept { return dt_; }
    const Matrix& op() const noexcept { return op_; }

private:
    Matrix op_;
    double dt_;
    Eigen::PartialPivLU<Matrix> lu_;
};

inline Vector implicit_euler_step(const Matrix& op, const Vector& u0, double dt) {
    return ImplicitEuler(op, dt).step(u0);
}

/// exp(t L) u0.
inline Vector matrix_exponential_reference(const Matrix& op, const Vector& u0, double t) {
    if (!(t >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "reference time must be >= 0");
    }
    if (op.rows() != op.cols() || op.cols() != u0.size()) {
        throw Error(ErrorCode::DimensionMismatch, "operator and state do not match");
    }
    if (t == 0.0) {
        return u0;
    }
    const Matrix scaled = t * op;
    const Matrix propagator = scaled.exp();
    return propagator * u0;
}

}  // namespace rkstab::time
