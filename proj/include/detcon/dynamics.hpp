#pragma once

// Right-hand sides of the consensus dynamics (continuous-communication
// form, sampled-communication form and the derivative-free shifted form)
// plus the orthonormal coordinate transform used for diagnostics.

#include <Eigen/Dense>

#include <random>
#include <stdexcept>

#include "detcon/graph.hpp"

namespace detcon {

/// Per-agent simulator state. x_hat holds the last sampled (broadcast)
/// value of x, equals x exactly at sampling instants and stays constant
/// between samples.
struct AgentState {
    double x = 0.0;
    double v = 0.0;
    double x_hat = 0.0;
    double last_sample_time = 0.0;
};

struct Derivatives {
    Vector dx;
    Vector dv;
};

/// (L xhat)_i = sum_j a_ij (xhat_i - xhat_j); the coupling term every
/// right-hand side consumes.
inline Vector laplacian_coupling(const Matrix& adjacency, const Vector& x_hat) {
    return adjacency.rowwise().sum().cwiseProduct(x_hat) - adjacency * x_hat;
}

namespace detail {
inline void check_dims(Eigen::Index n, const Matrix& adjacency, const Vector& a, const Vector& b) {
    if (adjacency.rows() != n || adjacency.cols() != n || a.size() != n || b.size() != n) {
        throw std::invalid_argument("dimension mismatch between state, inputs and graph");
    }
}
}  // namespace detail

/// Idealized continuous-communication dynamics: couplings use the true
/// neighbor states.
inline Derivatives rhs_continuous(const Vector& x, const Vector& v, const Matrix& adjacency,
                                  const Vector& r, const Vector& r_dot, double alpha,
                                  double beta) {
    detail::check_dims(x.size(), adjacency, v, r);
    detail::check_dims(x.size(), adjacency, r_dot, v);
    const Vector coupling = laplacian_coupling(adjacency, x);
    Derivatives d;
    d.dv = alpha * beta * coupling;
    d.dx = r_dot - alpha * (x - r) - beta * coupling - v;
    return d;
}

/// Sampled-communication dynamics: every coupling term is evaluated on
/// the last broadcast values x_hat, including the agent's own.
inline Derivatives rhs_event_triggered(const Vector& x, const Vector& v, const Vector& x_hat,
                                       const Matrix& adjacency, const Vector& r,
                                       const Vector& r_dot, double alpha, double beta) {
    detail::check_dims(x.size(), adjacency, v, x_hat);
    detail::check_dims(x.size(), adjacency, r, r_dot);
    const Vector coupling = laplacian_coupling(adjacency, x_hat);
    Derivatives d;
    d.dv = alpha * beta * coupling;
    d.dx = r_dot - alpha * (x - r) - beta * coupling - v;
    return d;
}

/// Shifted form in x_bar = x - r. No input derivative appears; the
/// broadcast values x_hat are still samples of x itself.
inline Derivatives rhs_shifted(const Vector& x_bar, const Vector& v, const Vector& x_hat,
                               const Matrix& adjacency, double alpha, double beta) {
    detail::check_dims(x_bar.size(), adjacency, v, x_hat);
    const Vector coupling = laplacian_coupling(adjacency, x_hat);
    Derivatives d;
    d.dv = alpha * beta * coupling;
    d.dx = -alpha * x_bar - beta * coupling - v;
    return d;
}

/// Orthonormal completion of the consensus direction 1/sqrt(n): the
/// columns of complement() span its orthogonal complement, and
/// transfer() = [r R] is orthonormal. Any completion is valid since only
/// norms and the component along r are ever consumed.
class ConsensusBasis {
public:
    explicit ConsensusBasis(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("basis needs at least one agent");
        // Householder reflection mapping e_0 to r = 1/sqrt(n) * ones.
        const Vector r = consensus_direction();
        Vector u = r;
        u(0) -= 1.0;
        Matrix h = Matrix::Identity(n, n);
        const double uu = u.squaredNorm();
        if (uu > 0.0) h -= (2.0 / uu) * (u * u.transpose());
        rotation_ = h.rightCols(n - 1);
    }

    /// Alternate completion (for cross-checks): Householder columns mixed
    /// by a seeded random rotation of the complement.
    ConsensusBasis(int n, unsigned rotation_seed) : ConsensusBasis(n) {
        if (n_ < 2) return;
        std::mt19937 rng(rotation_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix m(n_ - 1, n_ - 1);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
        const Eigen::HouseholderQR<Matrix> qr(m);
        Matrix q = qr.householderQ();
        rotation_ = rotation_ * q;
    }

    int size() const { return n_; }
    Vector consensus_direction() const {
        return Vector::Constant(n_, 1.0 / std::sqrt(static_cast<double>(n_)));
    }
    /// n x (n-1) matrix R with R^T R = I and R^T 1 = 0.
    const Matrix& complement() const { return rotation_; }
    Matrix transfer() const {
        Matrix t(n_, n_);
        t.col(0) = consensus_direction();
        t.rightCols(n_ - 1) = rotation_;
        return t;
    }

private:
    int n_;
    Matrix rotation_;
};

/// Diagnostic coordinates: q1 is conserved, q2n decays at rate alpha for
/// any communication pattern, z splits the tracking error along and
/// across the consensus direction.
struct TransformedState {
    double q1 = 0.0;
    Vector q2n;
    double z1 = 0.0;
    Vector z2n;
};

inline TransformedState to_transformed(const Vector& x, const Vector& v, const Vector& r,
                                       double alpha, const ConsensusBasis& basis) {
    const Eigen::Index n = x.size();
    if (v.size() != n || r.size() != n || basis.size() != n) {
        throw std::invalid_argument("dimension mismatch in coordinate transform");
    }
    const double r_mean = r.mean();
    const Vector centered_r = r.array() - r_mean;
    const Vector w = v - alpha * centered_r;          // v - alpha * Pi r
    const Vector y = x.array() - r_mean;              // x - mean(r) * 1
    const Vector dir = basis.consensus_direction();
    const Matrix& rest = basis.complement();
    TransformedState out;
    out.q1 = dir.dot(w);
    out.q2n = rest.transpose() * (alpha * y + w);
    out.z1 = dir.dot(y);
    out.z2n = rest.transpose() * y;
    return out;
}

/// Per-agent distance to the instantaneous input average.
inline Vector tracking_error(const Vector& x, double input_mean) {
    return (x.array() - input_mean).abs();
}

}  // namespace detcon
