#pragma once

#include <Eigen/Dense>

#include "tginee/factors.hpp"
#include "tginee/link.hpp"

namespace tginee {

/// Structured per-pair Jacobian of the M-vector Theta_{i,j,.} (or P_{i,j,.})
/// with respect to gamma. Only the nonzero footprint is stored: the columns
/// of alpha rows i and j, and per layer m the R slots of beta row m. For
/// k not in {i, j} the alpha-row-k block is identically zero.
///
/// alpha_i_block(m, r) = dTheta_{i,j,m} / dalpha_{i,r}
/// alpha_j_block(m, r) = dTheta_{i,j,m} / dalpha_{j,r}   (unused when i == j)
/// beta_coeff(m, r)    = dTheta_{i,j,m} / dbeta_{m,r}
struct PairJacobian {
    int i = 0;
    int j = 0;       // canonical: i <= j
    int n = 0;
    Matrix alpha_i_block;  // M x R
    Matrix alpha_j_block;  // M x R
    Matrix beta_coeff;     // M x R

    int M() const { return static_cast<int>(beta_coeff.rows()); }
    int R() const { return static_cast<int>(beta_coeff.cols()); }
    bool diagonal() const { return i == j; }

    /// Dense M x (n+M)R materialization; test/debug only.
    Matrix dense() const {
        const int m_rows = M(), rank = R();
        Matrix J = Matrix::Zero(m_rows, static_cast<Eigen::Index>(n + m_rows) * rank);
        for (int m = 0; m < m_rows; ++m) {
            for (int r = 0; r < rank; ++r) {
                J(m, static_cast<Eigen::Index>(r) * n + i) += alpha_i_block(m, r);
                if (!diagonal())
                    J(m, static_cast<Eigen::Index>(r) * n + j) += alpha_j_block(m, r);
                J(m, static_cast<Eigen::Index>(n) * rank +
                         static_cast<Eigen::Index>(r) * m_rows + m) = beta_coeff(m, r);
            }
        }
        return J;
    }

    /// Accumulates J^T v into a flat gradient of length (n+M)R.
    void transpose_apply_accumulate(const Vector& v, Vector& grad) const {
        const int m_rows = M(), rank = R();
        for (int r = 0; r < rank; ++r) {
            double gi = 0.0, gj = 0.0;
            for (int m = 0; m < m_rows; ++m) {
                gi += v(m) * alpha_i_block(m, r);
                if (!diagonal()) gj += v(m) * alpha_j_block(m, r);
            }
            grad(static_cast<Eigen::Index>(r) * n + i) += gi;
            if (!diagonal()) grad(static_cast<Eigen::Index>(r) * n + j) += gj;
            for (int m = 0; m < m_rows; ++m)
                grad(static_cast<Eigen::Index>(n) * rank +
                     static_cast<Eigen::Index>(r) * m_rows + m) += v(m) * beta_coeff(m, r);
        }
    }
};

/// P_{i,j,.} = g^{-1}(Theta_{i,j,.}) componentwise.
inline Vector pair_probability(const FactorPair& f, const LinkFunction& link, int i, int j) {
    Vector fiber = theta_fiber(f, i, j);
    for (Eigen::Index m = 0; m < fiber.size(); ++m) fiber(m) = link.inverse(fiber(m));
    return fiber;
}

/// dTheta_{i,j,.}/dgamma in structured form. For i != j the alpha entries are
/// beta_{m,r} alpha_{j,r} (row i) and beta_{m,r} alpha_{i,r} (row j); the
/// diagonal pair picks up a factor 2 from differentiating alpha_{i,r}^2.
inline PairJacobian theta_pair_jacobian(const FactorPair& f, int i, int j) {
    check_pair_indices(f, i, j);
    auto [lo, hi] = canonical_pair(i, j);
    const int M = f.M(), R = f.R();
    PairJacobian J;
    J.i = lo;
    J.j = hi;
    J.n = f.n();
    J.alpha_i_block.resize(M, R);
    J.alpha_j_block.resize(M, R);
    J.beta_coeff.resize(M, R);
    for (int m = 0; m < M; ++m) {
        for (int r = 0; r < R; ++r) {
            double b = f.beta(m, r);
            if (lo == hi) {
                J.alpha_i_block(m, r) = 2.0 * b * f.alpha(lo, r);
                J.alpha_j_block(m, r) = 0.0;
            } else {
                J.alpha_i_block(m, r) = b * f.alpha(hi, r);
                J.alpha_j_block(m, r) = b * f.alpha(lo, r);
            }
            J.beta_coeff(m, r) = f.alpha(lo, r) * f.alpha(hi, r);
        }
    }
    return J;
}

/// dP_{i,j,.}/dgamma: row m of the Theta Jacobian scaled by 1/g'(P_{i,j,m}).
inline PairJacobian prob_pair_jacobian(const FactorPair& f, const LinkFunction& link,
                                       int i, int j) {
    PairJacobian J = theta_pair_jacobian(f, i, j);
    Vector p = pair_probability(f, link, i, j);
    for (int m = 0; m < J.M(); ++m) {
        double scale = 1.0 / link.derivative_of_g_at(p(m));
        J.alpha_i_block.row(m) *= scale;
        J.alpha_j_block.row(m) *= scale;
        J.beta_coeff.row(m) *= scale;
    }
    return J;
}

}  // namespace tginee
