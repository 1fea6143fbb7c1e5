#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "tginee/graph.hpp"

namespace tginee {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// The CP parameter gamma = (alpha, beta): node factors alpha (n x R) and
/// layer factors beta (M x R). The flattened layout is fixed project-wide:
/// column-major vec(alpha) followed by column-major vec(beta).
struct FactorPair {
    Matrix alpha;  // n x R
    Matrix beta;   // M x R

    FactorPair() = default;
    FactorPair(Matrix a, Matrix b) : alpha(std::move(a)), beta(std::move(b)) {
        if (alpha.cols() != beta.cols())
            throw std::invalid_argument("FactorPair: alpha and beta must share R");
    }

    int n() const { return static_cast<int>(alpha.rows()); }
    int M() const { return static_cast<int>(beta.rows()); }
    int R() const { return static_cast<int>(alpha.cols()); }
    Eigen::Index param_dim() const { return alpha.size() + beta.size(); }

    /// Column index of alpha(i, r) in the flattened gamma vector.
    Eigen::Index alpha_index(int i, int r) const {
        return static_cast<Eigen::Index>(r) * n() + i;
    }
    /// Column index of beta(m, r) in the flattened gamma vector.
    Eigen::Index beta_index(int m, int r) const {
        return alpha.size() + static_cast<Eigen::Index>(r) * M() + m;
    }

    Vector flatten() const {
        Vector v(param_dim());
        v.head(alpha.size()) = Eigen::Map<const Vector>(alpha.data(), alpha.size());
        v.tail(beta.size()) = Eigen::Map<const Vector>(beta.data(), beta.size());
        return v;
    }

    static FactorPair unflatten(const Vector& v, int n, int M, int R) {
        if (v.size() != static_cast<Eigen::Index>(n + M) * R)
            throw std::invalid_argument("unflatten: size mismatch");
        FactorPair f;
        f.alpha = Eigen::Map<const Matrix>(v.data(), n, R);
        f.beta = Eigen::Map<const Matrix>(v.data() + static_cast<Eigen::Index>(n) * R, M, R);
        return f;
    }
};

inline void check_pair_indices(const FactorPair& f, int i, int j) {
    if (i < 0 || i >= f.n() || j < 0 || j >= f.n())
        throw std::out_of_range("theta: node index out of range");
}

/// Theta_{i,j,m} = sum_r alpha_{i,r} alpha_{j,r} beta_{m,r}. Indices are
/// canonicalized first so (i,j) and (j,i) take the same arithmetic path.
inline double theta_entry(const FactorPair& f, int i, int j, int m) {
    check_pair_indices(f, i, j);
    if (m < 0 || m >= f.M()) throw std::out_of_range("theta: layer index out of range");
    auto [lo, hi] = canonical_pair(i, j);
    double s = 0.0;
    for (int r = 0; r < f.R(); ++r)
        s += f.alpha(lo, r) * f.alpha(hi, r) * f.beta(m, r);
    return s;
}

/// The length-M fiber Theta_{i,j,.} = beta * (alpha_i .* alpha_j).
inline Vector theta_fiber(const FactorPair& f, int i, int j) {
    check_pair_indices(f, i, j);
    auto [lo, hi] = canonical_pair(i, j);
    Vector w = (f.alpha.row(lo).array() * f.alpha.row(hi).array()).transpose();
    return f.beta * w;
}

}  // namespace tginee
