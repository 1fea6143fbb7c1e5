#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tginee/errors.hpp"
#include "tginee/factors.hpp"

namespace tginee {

/// Diagonal of the per-pair Bernoulli variance matrix Gamma_{i,j}:
/// entries P_{i,j,m}(1 - P_{i,j,m}), strictly positive under link clamping.
struct PairVariance {
    Vector gamma_diag;  // length M

    static PairVariance from_probabilities(const Vector& p) {
        PairVariance v;
        v.gamma_diag = (p.array() * (1.0 - p.array())).matrix();
        return v;
    }
};

/// Componentwise (observed - predicted) / sqrt(p(1-p)).
inline Vector standardized_residual(const PairVariance& gv, const Vector& observed,
                                    const Vector& predicted) {
    return ((observed - predicted).array() / gv.gamma_diag.array().sqrt()).matrix();
}

/// Streaming accumulator for the pooled correlation estimate
/// W_hat = (1/N) sum r_tilde r_tilde^T.
class PooledCorrelation {
public:
    explicit PooledCorrelation(int M) : sum_(Matrix::Zero(M, M)), count_(0) {}

    void add(const Vector& r_tilde) {
        sum_.selfadjointView<Eigen::Lower>().rankUpdate(r_tilde);
        ++count_;
    }

    void merge(const PooledCorrelation& other) {
        sum_ += other.sum_;
        count_ += other.count_;
    }

    long long count() const { return count_; }

    Matrix estimate() const {
        if (count_ == 0)
            throw InsufficientDataError("estimate_w_pooled: no residuals accumulated");
        Matrix w = sum_.selfadjointView<Eigen::Lower>();
        return w / static_cast<double>(count_);
    }

private:
    Matrix sum_;
    long long count_;
};

/// Shared layer-correlation matrix W with ridge-stabilized inversion and the
/// momentum update used in mini-batch training. The Cholesky factorization of
/// W + eps I is cached and invalidated on every W update.
class WorkingCovariance {
public:
    explicit WorkingCovariance(int M, double ridge_eps = -1.0, double momentum_mu = 0.9,
                               int warmup_epochs = 0)
        : W_(Matrix::Identity(M, M)),
          ridge_eps_(ridge_eps),
          momentum_mu_(momentum_mu),
          warmup_epochs_(warmup_epochs) {
        if (momentum_mu_ < 0.0 || momentum_mu_ >= 1.0)
            throw std::invalid_argument("momentum_mu must lie in [0, 1)");
        refresh_factorization();
    }

    const Matrix& W() const { return W_; }
    int M() const { return static_cast<int>(W_.rows()); }
    double momentum_mu() const { return momentum_mu_; }
    int warmup_epochs() const { return warmup_epochs_; }

    /// Effective ridge: explicit value if set, otherwise 1e-4 trace(W)/M
    /// floored at 1e-8.
    double effective_ridge() const {
        if (ridge_eps_ >= 0.0) return ridge_eps_;
        return std::max(1e-4 * W_.trace() / M(), 1e-8);
    }

    void set_w(const Matrix& w) {
        check_dims(w);
        W_ = 0.5 * (w + w.transpose());
        refresh_factorization();
    }

    void reset_identity() {
        W_.setIdentity();
        refresh_factorization();
    }

    /// W <- mu W_prev + (1 - mu) W_batch; symmetry preserved exactly.
    void momentum_update(const Matrix& w_batch) {
        check_dims(w_batch);
        W_ = momentum_mu_ * W_ + (1.0 - momentum_mu_) * w_batch;
        W_ = 0.5 * (W_ + W_.transpose()).eval();
        refresh_factorization();
    }

    /// Sigma_hat^{-1} v = Gamma^{-1/2} (W + eps I)^{-1} Gamma^{-1/2} v.
    Vector sigma_inverse_apply(const PairVariance& gv, const Vector& v) const {
        Vector half = (v.array() / gv.gamma_diag.array().sqrt()).matrix();
        half = llt_.solve(half);
        return (half.array() / gv.gamma_diag.array().sqrt()).matrix();
    }

    /// (W + eps I)^{-1} v on an already standardized residual.
    Vector w_inverse_apply(const Vector& v) const { return llt_.solve(v); }

    /// Solve with W restricted to a subset of layer indices (mini-batch GEE
    /// on sampled layers only). Not cached; subsets vary per batch.
    Vector w_inverse_apply_subset(const std::vector<int>& layers, const Vector& v) const {
        const int k = static_cast<int>(layers.size());
        Matrix sub(k, k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) sub(a, b) = W_(layers[a], layers[b]);
        sub.diagonal().array() += effective_ridge();
        Eigen::LLT<Matrix> llt(sub);
        if (llt.info() != Eigen::Success)
            throw CovarianceSingularError("W subset not positive definite; increase ridge");
        return llt.solve(v);
    }

private:
    void check_dims(const Matrix& w) const {
        if (w.rows() != W_.rows() || w.cols() != W_.cols())
            throw std::invalid_argument("W update: dimension mismatch");
    }

    void refresh_factorization() {
        Matrix ridged = W_;
        ridged.diagonal().array() += effective_ridge();
        llt_.compute(ridged);
        if (llt_.info() != Eigen::Success)
            throw CovarianceSingularError(
                "W + eps I is not positive definite; ridge too small");
    }

    Matrix W_;
    double ridge_eps_;
    double momentum_mu_;
    int warmup_epochs_;
    Eigen::LLT<Matrix> llt_;
};

/// Convenience wrapper matching the per-operation contract.
inline Vector pair_sigma_inverse_apply(const WorkingCovariance& wc, const PairVariance& gv,
                                       const Vector& v) {
    return wc.sigma_inverse_apply(gv, v);
}

}  // namespace tginee
