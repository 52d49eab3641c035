#pragma once

// Nodal DG / CPR semidiscretisation of u_t + a u_x = 0 on a periodic uniform mesh.
//
// The solution is stored as Legendre modal coefficients per element. The volume
// derivative is evaluated at the p+1 Legendre-Gauss-Lobatto nodes and mapped back
// to modal coefficients (exact, since u_x has degree p-1); interfaces use the
// upwind trace. With the exact modal mass matrix M_nn = (dx/2) 2/(2n+1) this is the
// strong form of the Galerkin scheme, and
//   <u, L u>_M = -|a|/2 * sum over interfaces of jump^2 <= 0.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rkstab/dg/legendre.hpp"
#include "rkstab/error.hpp"

namespace rkstab::dg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Mesh1D {
    double x_left = -1.0;
    double x_right = 1.0;
    int elements = 8;

    Mesh1D() = default;
    Mesh1D(double left, double right, int n) : x_left(left), x_right(right), elements(n) {
        if (n < 1) {
            throw Error(ErrorCode::InvalidArgument, "mesh needs at least one element");
        }
        if (!(right > left)) {
            throw Error(ErrorCode::InvalidArgument, "mesh requires x_right > x_left");
        }
    }

    double dx() const { return (x_right - x_left) / elements; }
    double element_left(int e) const { return x_left + e * dx(); }
    double element_center(int e) const { return element_left(e) + 0.5 * dx(); }
    int wrap(int e) const { return ((e % elements) + elements) % elements; }
};

/// Legendre modal coefficients, entry (e, n) at flat index e * (degree + 1) + n.
class ModalState {
public:
    ModalState() = default;
    ModalState(int elements, int degree) : ModalState(elements, degree, Vector::Zero(elements * (degree + 1))) {}
    ModalState(int elements, int degree, Vector coeffs)
        : elements_(elements), degree_(degree), coeffs_(std::move(coeffs)) {
        if (elements < 1 || degree < 0) {
            throw Error(ErrorCode::InvalidArgument, "modal state needs elements >= 1, degree >= 0");
        }
        if (coeffs_.size() != elements * (degree + 1)) {
            throw Error(ErrorCode::DimensionMismatch, "coefficient vector has wrong length");
        }
    }

    int elements() const noexcept { return elements_; }
    int degree() const noexcept { return degree_; }
    int modes() const noexcept { return degree_ + 1; }
    Eigen::Index size() const noexcept { return coeffs_.size(); }

    double& operator()(int e, int n) { return coeffs_[e * modes() + n]; }
    double operator()(int e, int n) const { return coeffs_[e * modes() + n]; }

    const Vector& coeffs() const noexcept { return coeffs_; }
    Vector& coeffs() noexcept { return coeffs_; }

    /// u on element e at reference point xi in [-1, 1].
    double evaluate(int e, double xi) const {
        const auto p = legendre_all(degree_, xi);
        double sum = 0.0;
        for (int n = 0; n <= degree_; ++n) {
            sum += (*this)(e, n) * p[n];
        }
        return sum;
    }

    bool same_shape(const ModalState& other) const {
        return elements_ == other.elements_ && degree_ == other.degree_;
    }

private:
    int elements_ = 1;
    int degree_ = 0;
    Vector coeffs_ = Vector::Zero(1);
};

/// Per-mode squared basis norms |phi_n|^2 = (dx/2) * 2/(2n+1) of the modal mass matrix.
struct MassNorm {
    double dx = 1.0;
    int degree = 0;

    double weight(int n) const { return dx / (2.0 * n + 1.0); }

    std::vector<double> weights() const {
        std::vector<double> w;
        for (int n = 0; n <= degree; ++n) {
            w.push_back(weight(n));
        }
        return w;
    }

    /// Diagonal of M for a flattened state with `elements` elements.
    Vector flat(int elements) const {
        Vector w(elements * (degree + 1));
        for (int e = 0; e < elements; ++e) {
            for (int n = 0; n <= degree; ++n) {
                w[e * (degree + 1) + n] = weight(n);
            }
        }
        return w;
    }
};

inline double m_inner(const ModalState& u, const ModalState& v, const MassNorm& w) {
    if (!u.same_shape(v) || u.degree() != w.degree) {
        throw Error(ErrorCode::DimensionMismatch, "m_inner: shapes differ");
    }
    double sum = 0.0;
    for (int e = 0; e < u.elements(); ++e) {
        for (int n = 0; n <= u.degree(); ++n) {
            sum += u(e, n) * v(e, n) * w.weight(n);
        }
    }
    return sum;
}

inline double m_norm_sq(const ModalState& u, const MassNorm& w) { return m_inner(u, u, w); }

/// Integral of u over the whole domain (sum of element means times dx).
inline double domain_integral(const ModalState& u, double dx) {
    double sum = 0.0;
    for (int e = 0; e < u.elements(); ++e) {
        sum += u(e, 0);
    }
    return sum * dx;
}

class AdvectionDG {
public:
    AdvectionDG(Mesh1D mesh, int degree, double velocity = 1.0)
        : mesh_(mesh), degree_(degree), velocity_(velocity) {
        if (degree < 0) {
            throw Error(ErrorCode::InvalidDegree, "polynomial degree must be >= 0");
        }
        if (mesh.elements < 1) {
            throw Error(ErrorCode::InvalidArgument, "mesh needs at least one element");
        }
        const int np = degree + 1;
        if (degree == 0) {
            return;
        }
        const QuadratureRule lgl = gauss_lobatto(np);
        vandermonde_.resize(np, np);
        for (int i = 0; i < np; ++i) {
            const auto p = legendre_all(degree, lgl.nodes[i]);
            for (int n = 0; n < np; ++n) {
                vandermonde_(i, n) = p[n];
            }
        }
        const auto d = differentiation_matrix(lgl.nodes);
        Matrix nodal_d(np, np);
        for (int i = 0; i < np; ++i) {
            for (int j = 0; j < np; ++j) {
                nodal_d(i, j) = d[i][j];
            }
        }
        const Matrix v_inv = vandermonde_.inverse();
        // Modal coefficients of u_xi from modal coefficients of u.
        modal_derivative_ = v_inv * nodal_d * vandermonde_;
    }

    const Mesh1D& mesh() const noexcept { return mesh_; }
    int degree() const noexcept { return degree_; }
    double velocity() const noexcept { return velocity_; }
    Eigen::Index dofs() const noexcept { return static_cast<Eigen::Index>(mesh_.elements) * (degree_ + 1); }
    MassNorm mass_norm() const { return {mesh_.dx(), degree_}; }

    /// du/dt for flattened modal coefficients.
    Vector rhs(const Vector& u) const {
        if (u.size() != dofs()) {
            throw Error(ErrorCode::DimensionMismatch, "rhs: state has wrong length");
        }
        const int np = degree_ + 1;
        const int ne = mesh_.elements;
        const double dx = mesh_.dx();
        const double a = velocity_;

        // Traces at xi = -1 and xi = +1 per element.
        std::vector<double> left_trace(ne), right_trace(ne);
        for (int e = 0; e < ne; ++e) {
            double lt = 0.0;
            double rt = 0.0;
            for (int n = 0; n < np; ++n) {
                const double c = u[e * np + n];
                rt += c;
                lt += (n % 2 == 0) ? c : -c;
            }
            left_trace[e] = lt;
            right_trace[e] = rt;
        }

        Vector out(dofs());
        for (int e = 0; e < ne; ++e) {
            auto ue = u.segment(e * np, np);
            auto oe = out.segment(e * np, np);
            if (degree_ > 0) {
                oe.noalias() = (-2.0 * a / dx) * (modal_derivative_ * ue);
            } else {
                oe.setZero();
            }
            if (a > 0.0) {
                const double jump = right_trace[mesh_.wrap(e - 1)] - left_trace[e];
                for (int m = 0; m < np; ++m) {
                    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                    oe[m] += (2.0 * m + 1.0) / dx * a * jump * sign;
                }
            } else if (a < 0.0) {
                const double jump = right_trace[e] - left_trace[mesh_.wrap(e + 1)];
                for (int m = 0; m < np; ++m) {
                    oe[m] += (2.0 * m + 1.0) / dx * a * jump;
                }
            }
        }
        return out;
    }

    ModalState rhs(const ModalState& u) const {
        return ModalState(u.elements(), u.degree(), rhs(u.coeffs()));
    }

    /// Matrix of rhs, assembled column by column from unit modal vectors.
    Matrix operator_matrix() const {
        const Eigen::Index n = dofs();
        Matrix op(n, n);
        Vector unit = Vector::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            unit[j] = 1.0;
            op.col(j) = rhs(unit);
            unit[j] = 0.0;
        }
        return op;
    }

private:
    Mesh1D mesh_;
    int degree_;
    double velocity_;
    Matrix vandermonde_;
    Matrix modal_derivative_;
};

struct Semidiscretization {
    AdvectionDG op;
    Matrix matrix;
    MassNorm norm;

    std::function<Vector(const Vector&)> rhs_function() const {
        return [op = op](const Vector& u) { return op.rhs(u); };
    }
};

inline Semidiscretization build_semidiscretization(const Mesh1D& mesh, int degree, double velocity = 1.0) {
    AdvectionDG op(mesh, degree, velocity);
    Matrix matrix = op.operator_matrix();
    const MassNorm norm = op.mass_norm();
    return {std::move(op), std::move(matrix), norm};
}

/// Per-element L2 projection with a (degree + 6)-point Gauss-Legendre rule.
inline ModalState project_initial(const std::function<double(double)>& f, const Mesh1D& mesh, int degree) {
    if (degree < 0) {
        throw Error(ErrorCode::InvalidDegree, "polynomial degree must be >= 0");
    }
    ModalState u(mesh.elements, degree);
    const QuadratureRule q = gauss_legendre(degree + 6);
    const double half = 0.5 * mesh.dx();
    for (int e = 0; e < mesh.elements; ++e) {
        const double center = mesh.element_center(e);
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            const double fx = f(center + half * q.nodes[k]);
            const auto p = legendre_all(degree, q.nodes[k]);
            for (int n = 0; n <= degree; ++n) {
                u(e, n) += 0.5 * (2.0 * n + 1.0) * q.weights[k] * fx * p[n];
            }
        }
    }
    return u;
}

/// |M^{1/2} L M^{-1/2}|_2 by power iteration on B^T B, B the symmetrised operator.
inline double operator_norm(const Matrix& op, const Vector& weights, double rel_tol = 1e-10,
                            int max_iter = 100000) {
    const Eigen::Index n = op.rows();
    if (op.cols() != n || weights.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "operator_norm: shapes differ");
    }
    if (!op.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "operator_norm: matrix is not finite");
    }
    const Vector sqrt_w = weights.cwiseSqrt();
    const Matrix b = sqrt_w.asDiagonal() * op * sqrt_w.cwiseInverse().asDiagonal();
    const Matrix btb = b.transpose() * b;
    if (btb.norm() == 0.0) {
        return 0.0;
    }
    std::mt19937_64 rng(20170213);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = dist(rng);
    }
    v.normalize();
    double lambda = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        Vector w = btb * v;
        const double next = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) {
            return 0.0;
        }
        v = w / wn;
        if (iter > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
            return std::sqrt(next);
        }
        lambda = next;
    }
    throw Error(ErrorCode::NoConvergence, "operator_norm: power iteration did not converge");
}

inline double operator_norm(const Matrix& op, const MassNorm& w) {
    return operator_norm(op, w.flat(static_cast<int>(op.rows() / (w.degree + 1))));
}

// Initial conditions on [-1, 1].

inline double gaussian_ic(double x) { return std::exp(-20.0 * x * x); }
inline double box_ic(double x) { return (x >= -0.25 && x <= 0.25) ? 1.0 : 0.0; }
inline double sine_ic(double x) { return std::sin(std::numbers::pi * x); }

}  // namespace rkstab::dg
