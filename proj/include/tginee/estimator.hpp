#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tginee/covariance.hpp"
#include "tginee/errors.hpp"
#include "tginee/eval.hpp"
#include "tginee/factors.hpp"
#include "tginee/graph.hpp"
#include "tginee/jacobian.hpp"
#include "tginee/link.hpp"
#include "tginee/rng.hpp"
#include "tginee/sampling.hpp"

namespace tginee {

enum class FitMode { full_batch, mini_batch };

inline const char* to_string(FitMode m) {
    return m == FitMode::full_batch ? "full_batch" : "mini_batch";
}

inline FitMode fit_mode_from_string(const std::string& s) {
    if (s == "full_batch") return FitMode::full_batch;
    if (s == "mini_batch") return FitMode::mini_batch;
    throw std::invalid_argument("unknown fit mode: " + s);
}

struct FitConfig {
    int R = 32;
    LinkFunction link = LinkFunction::logit();
    double learning_rate = 0.01;
    double weight_decay = 1e-5;
    int epochs = 50;
    int batch_size = 10000;
    double gee_lambda = 0.1;
    int cov_refresh_every = 5;
    double momentum_mu = 0.9;
    int warmup_epochs = 5;
    int neg_ratio = 3;
    FitMode mode = FitMode::full_batch;
    std::uint64_t seed = 42;
    double init_scale = 0.1;
    double ridge_eps = -1.0;     // < 0: auto 1e-4 trace(W)/M
    bool gee_full_fiber = false; // mini-batch GEE residual over sampled layers only
    bool normalize_correlation = false;
    // Full-batch only: backtrack on the descent direction so the quadratic
    // loss never increases while W is fixed. Slower to fit; off by default.
    bool monotone_descent = false;

    void validate() const {
        if (R < 1) throw std::invalid_argument("FitConfig: R >= 1");
        if (learning_rate <= 0) throw std::invalid_argument("FitConfig: learning_rate > 0");
        if (weight_decay < 0) throw std::invalid_argument("FitConfig: weight_decay >= 0");
        if (epochs < 1) throw std::invalid_argument("FitConfig: epochs >= 1");
        if (batch_size < 1) throw std::invalid_argument("FitConfig: batch_size >= 1");
        if (gee_lambda < 0) throw std::invalid_argument("FitConfig: gee_lambda >= 0");
        if (cov_refresh_every < 1)
            throw std::invalid_argument("FitConfig: cov_refresh_every >= 1");
        if (momentum_mu < 0 || momentum_mu >= 1)
            throw std::invalid_argument("FitConfig: momentum_mu in [0,1)");
        if (warmup_epochs < 0) throw std::invalid_argument("FitConfig: warmup_epochs >= 0");
        if (neg_ratio < 1) throw std::invalid_argument("FitConfig: neg_ratio >= 1");
        if (init_scale <= 0) throw std::invalid_argument("FitConfig: init_scale > 0");
    }
};

struct EpochLoss {
    double bce = 0.0;
    double gee = 0.0;
    double total = 0.0;
};

struct FitReport {
    FactorPair factors;
    Matrix w_final;
    std::vector<EpochLoss> loss_trace;      // one entry per epoch
    std::vector<double> score_norm_trace;   // per covariance refresh, full-batch mode
    Diagnostics diag;
    double wall_time_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Full-batch score / loss

namespace detail {

inline Vector observed_fiber(const SparseMultiLayerGraph& graph, int i, int j) {
    Vector a(graph.layer_count());
    for (int m = 0; m < graph.layer_count(); ++m)
        a(m) = graph.has_edge(i, j, m) ? 1.0 : 0.0;
    return a;
}

}  // namespace detail

/// The estimating-equation score s(gamma): the exact sum over all pairs
/// i <= j of J_{ij}^T Sigma_hat_{ij}^{-1} (A_{ij,.} - P_{ij,.}), with the
/// working covariance held fixed at the supplied state.
inline Vector score(const SparseMultiLayerGraph& graph, const FactorPair& f,
                    const LinkFunction& link, const WorkingCovariance& wc) {
    const int n = graph.node_count();
    Vector s = Vector::Zero(f.param_dim());
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vector p = pair_probability(f, link, i, j);
            Vector r = detail::observed_fiber(graph, i, j) - p;
            PairVariance gv = PairVariance::from_probabilities(p);
            Vector v = wc.sigma_inverse_apply(gv, r);
            prob_pair_jacobian(f, link, i, j).transpose_apply_accumulate(v, s);
        }
    }
    return s;
}

/// Quadratic relaxation: 1/2 sum_{i<=j} r^T Sigma_hat^{-1} r. When sigma_at
/// is supplied, the covariance (including the Bernoulli variances) is frozen
/// at that parameter point; this is the form whose negative gradient the
/// score reproduces exactly.
inline double quadratic_loss(const SparseMultiLayerGraph& graph, const FactorPair& f,
                             const LinkFunction& link, const WorkingCovariance& wc,
                             const FactorPair* sigma_at = nullptr) {
    const int n = graph.node_count();
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vector p = pair_probability(f, link, i, j);
            Vector r = detail::observed_fiber(graph, i, j) - p;
            Vector p_sigma = sigma_at ? pair_probability(*sigma_at, link, i, j) : p;
            PairVariance gv = PairVariance::from_probabilities(p_sigma);
            loss += 0.5 * r.dot(wc.sigma_inverse_apply(gv, r));
        }
    }
    return loss;
}

/// Negative score, exposed as a gradient contract for first-order optimizers
/// (covariance frozen; same code path as score).
inline Vector gradient_of_quadratic_loss(const SparseMultiLayerGraph& graph,
                                         const FactorPair& f, const LinkFunction& link,
                                         const WorkingCovariance& wc) {
    return -score(graph, f, link, wc);
}

/// Mean per-pair binary cross-entropy over all pairs, summed across layers
/// (trace reporting for full-batch mode).
inline double full_batch_bce(const SparseMultiLayerGraph& graph, const FactorPair& f,
                             const LinkFunction& link) {
    const int n = graph.node_count();
    double total = 0.0;
    long long pairs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vector p = pair_probability(f, link, i, j);
            for (int m = 0; m < graph.layer_count(); ++m) {
                double a = graph.has_edge(i, j, m) ? 1.0 : 0.0;
                total -= a * std::log(p(m)) + (1.0 - a) * std::log(1.0 - p(m));
            }
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

/// Pooled correlation estimate over all pairs at the current parameters.
inline Matrix estimate_w_full(const SparseMultiLayerGraph& graph, const FactorPair& f,
                              const LinkFunction& link) {
    const int n = graph.node_count();
    PooledCorrelation pool(graph.layer_count());
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vector p = pair_probability(f, link, i, j);
            PairVariance gv = PairVariance::from_probabilities(p);
            pool.add(standardized_residual(gv, detail::observed_fiber(graph, i, j), p));
        }
    }
    return pool.estimate();
}

// ---------------------------------------------------------------------------
// Mini-batch Batch-GEE loss

struct BatchLossOptions {
    double lambda = 0.1;
    bool gee_full_fiber = false;
    const SparseMultiLayerGraph* graph = nullptr;  // required when gee_full_fiber
};

/// L_total = L_BCE + lambda L_GEE over a labeled triplet batch. BCE is summed
/// over each pair's layers then averaged over pairs; the GEE term averages the
/// quadratic form r_tilde^T (W + eps I)^{-1} r_tilde per pair. When
/// accumulate_grad is non-null, the gradient (covariance frozen) is added.
inline EpochLoss batch_gee_loss(const TripletBatch& batch, const FactorPair& f,
                                const LinkFunction& link, const WorkingCovariance& wc,
                                const BatchLossOptions& opts,
                                Vector* accumulate_grad = nullptr) {
    if (batch.entries.empty()) throw InsufficientDataError("batch_gee_loss: empty batch");
    if (opts.gee_full_fiber && opts.graph == nullptr)
        throw std::invalid_argument("batch_gee_loss: gee_full_fiber requires the graph");

    const double n_pairs = static_cast<double>(batch.pair_groups.size());
    double bce = 0.0, gee = 0.0;

    for (const auto& [pair, slots] : batch.pair_groups) {
        auto [i, j] = pair;
        Vector fiber = theta_fiber(f, i, j);
        PairJacobian J;
        if (accumulate_grad) J = theta_pair_jacobian(f, i, j);

        // BCE across this pair's batch entries, plus its gradient
        std::vector<int> layers;
        std::vector<double> labels;
        for (int slot : slots) {
            const LabeledTriplet& e = batch.entries[static_cast<std::size_t>(slot)];
            double p = link.inverse(fiber(e.m));
            double a = e.label;
            bce -= a * std::log(p) + (1.0 - a) * std::log(1.0 - p);
            bool seen = false;
            for (std::size_t k = 0; k < layers.size(); ++k)
                if (layers[k] == e.m) seen = true;
            if (!seen) {
                layers.push_back(e.m);
                labels.push_back(a);
            }
            if (accumulate_grad) {
                // dBCE/dtheta = (p - a) / (p(1-p) g'(p)), averaged over pairs
                double dtheta = (p - a) / (p * (1.0 - p) * link.derivative_of_g_at(p)) / n_pairs;
                Vector unit = Vector::Zero(f.M());
                unit(e.m) = dtheta;
                J.transpose_apply_accumulate(unit, *accumulate_grad);
            }
        }

        // GEE quadratic form over the pair's layers (sampled subset or the
        // full fiber against graph membership)
        std::vector<int> gee_layers;
        Vector r_obs, r_pred;
        if (opts.gee_full_fiber) {
            gee_layers.resize(static_cast<std::size_t>(f.M()));
            for (int m = 0; m < f.M(); ++m) gee_layers[static_cast<std::size_t>(m)] = m;
            r_obs = detail::observed_fiber(*opts.graph, i, j);
            r_pred.resize(f.M());
            for (int m = 0; m < f.M(); ++m) r_pred(m) = link.inverse(fiber(m));
        } else {
            gee_layers = layers;
            r_obs.resize(static_cast<Eigen::Index>(layers.size()));
            r_pred.resize(static_cast<Eigen::Index>(layers.size()));
            for (std::size_t k = 0; k < layers.size(); ++k) {
                r_obs(static_cast<Eigen::Index>(k)) = labels[k];
                r_pred(static_cast<Eigen::Index>(k)) = link.inverse(fiber(layers[k]));
            }
        }
        Vector gamma_diag = (r_pred.array() * (1.0 - r_pred.array())).matrix();
        Vector r_tilde = ((r_obs - r_pred).array() / gamma_diag.array().sqrt()).matrix();
        Vector u = static_cast<int>(gee_layers.size()) == f.M() && opts.gee_full_fiber
                       ? wc.w_inverse_apply(r_tilde)
                       : wc.w_inverse_apply_subset(gee_layers, r_tilde);
        gee += r_tilde.dot(u);

        if (accumulate_grad && opts.lambda > 0.0) {
            // d(r~^T W^-1 r~)/dgamma with Gamma and W frozen:
            // -2 (Gamma^{-1/2} u)_m dP_m/dgamma
            Vector v = Vector::Zero(f.M());
            for (std::size_t k = 0; k < gee_layers.size(); ++k) {
                int m = gee_layers[k];
                double p = r_pred(static_cast<Eigen::Index>(k));
                double coeff = -2.0 * opts.lambda / n_pairs *
                               u(static_cast<Eigen::Index>(k)) /
                               std::sqrt(gamma_diag(static_cast<Eigen::Index>(k)));
                v(m) += coeff / link.derivative_of_g_at(p);
            }
            J.transpose_apply_accumulate(v, *accumulate_grad);
        }
    }

    EpochLoss out;
    out.bce = bce / n_pairs;
    out.gee = gee / n_pairs;
    out.total = out.bce + opts.lambda * out.gee;
    return out;
}

// ---------------------------------------------------------------------------
// Optimizer (adaptive-moment method with decoupled weight decay)

namespace detail {

struct AdamState {
    Vector m;
    Vector v;
    long long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(Eigen::Index dim) : m(Vector::Zero(dim)), v(Vector::Zero(dim)) {}

    void step(Vector& param, const Vector& grad, double lr, double weight_decay) {
        ++t;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        Vector update =
            (m / bc1).array() / ((v / bc2).array().sqrt() + eps) * lr;
        param -= update.matrix() + lr * weight_decay * param;
    }
};

/// Sign-based per-coordinate adaptive steps (resilient propagation), suited to
/// the deterministic full-batch gradient; initial step equals the learning
/// rate. direction() returns a strict descent direction whenever grad != 0.
struct RpropState {
    Vector step;
    Vector prev;
    double grow = 1.5;
    double shrink = 0.5;
    double step_max = 1.0;
    double step_min = 1e-8;

    RpropState(Eigen::Index dim, double lr)
        : step(Vector::Constant(dim, lr)), prev(Vector::Zero(dim)) {}

    void adapt(const Vector& grad) {
        for (Eigen::Index k = 0; k < step.size(); ++k) {
            double s = grad(k) * prev(k);
            if (s > 0) step(k) = std::min(step(k) * grow, step_max);
            else if (s < 0) step(k) = std::max(step(k) * shrink, step_min);
        }
    }
    Vector direction(const Vector& grad) const {
        Vector d = Vector::Zero(step.size());
        for (Eigen::Index k = 0; k < step.size(); ++k) {
            if (grad(k) > 0) d(k) = -step(k);
            else if (grad(k) < 0) d(k) = step(k);
        }
        return d;
    }
    void remember(const Vector& grad) { prev = grad; }
    void reject() {
        step *= shrink;
        prev.setZero();
    }
};

inline FactorPair init_factors(int n, int M, int R, double scale, Rng& rng) {
    FactorPair f;
    f.alpha.resize(n, R);
    f.beta.resize(M, R);
    for (int r = 0; r < R; ++r)
        for (int i = 0; i < n; ++i) f.alpha(i, r) = scale * rng.gauss();
    for (int r = 0; r < R; ++r)
        for (int m = 0; m < M; ++m) f.beta(m, r) = scale * rng.gauss();
    return f;
}

inline Matrix batch_w_estimate(const TripletBatch& batch, const SparseMultiLayerGraph& graph,
                               const FactorPair& f, const LinkFunction& link) {
    PooledCorrelation pool(f.M());
    for (const auto& [pair, slots] : batch.pair_groups) {
        auto [i, j] = pair;
        Vector p = pair_probability(f, link, i, j);
        PairVariance gv = PairVariance::from_probabilities(p);
        pool.add(standardized_residual(gv, observed_fiber(graph, i, j), p));
    }
    return pool.estimate();
}

inline Matrix maybe_normalize_correlation(Matrix w, bool normalize) {
    if (!normalize) return w;
    Vector d = w.diagonal().array().sqrt().matrix();
    for (Eigen::Index a = 0; a < w.rows(); ++a)
        for (Eigen::Index b = 0; b < w.cols(); ++b) {
            double denom = d(a) * d(b);
            w(a, b) = denom > 0 ? w(a, b) / denom : (a == b ? 1.0 : 0.0);
        }
    return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Training

/// Fits the CP factors to a multilayer graph. Full-batch mode runs gradient
/// descent on the quadratic relaxation with the working covariance refreshed
/// periodically from pooled residuals; mini-batch mode trains the Batch-GEE
/// loss on positives plus dynamically sampled negatives with a momentum
/// covariance update. Deterministic given the seed.
inline FitReport fit(const SparseMultiLayerGraph& graph, const FitConfig& cfg) {
    cfg.validate();
    if (graph.total_edges() == 0)
        throw InsufficientDataError("fit: graph has no edges");
    const auto start = std::chrono::steady_clock::now();
    const int n = graph.node_count();
    const int M = graph.layer_count();

    Rng root(cfg.seed);
    Rng init_rng = root.substream("init");
    FactorPair f = detail::init_factors(n, M, cfg.R, cfg.init_scale, init_rng);
    WorkingCovariance wc(M, cfg.ridge_eps, cfg.momentum_mu, cfg.warmup_epochs);

    Vector gamma = f.flatten();
    detail::AdamState adam(gamma.size());

    FitReport report;
    report.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));

    auto refresh_due = [&](int epoch) {
        return epoch + 1 > cfg.warmup_epochs && (epoch + 1) % cfg.cov_refresh_every == 0;
    };
    auto guard = [&](double value, int epoch) {
        if (!std::isfinite(value))
            throw DivergedError("fit: non-finite loss at epoch " + std::to_string(epoch),
                                epoch);
    };

    if (cfg.mode == FitMode::full_batch) {
        detail::RpropState rprop(gamma.size(), cfg.learning_rate);
        double current = quadratic_loss(graph, f, cfg.link, wc);
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            Vector s = score(graph, f, cfg.link, wc);
            Vector grad = -s;
            rprop.adapt(grad);
            Vector d = rprop.direction(grad);

            if (cfg.monotone_descent) {
                // backtracking on the sign-descent direction keeps the
                // quadratic loss non-increasing while W is held fixed
                bool accepted = false;
                double scale = 1.0;
                for (int tries = 0; tries < 13; ++tries, scale *= 0.5) {
                    Vector cand = gamma + scale * d;
                    cand -= cfg.learning_rate * cfg.weight_decay * cand;
                    FactorPair fc = FactorPair::unflatten(cand, n, M, cfg.R);
                    double cl = quadratic_loss(graph, fc, cfg.link, wc);
                    if (std::isfinite(cl) && cl <= current + 1e-12) {
                        gamma = std::move(cand);
                        f = std::move(fc);
                        current = cl;
                        accepted = true;
                        break;
                    }
                }
                if (accepted) rprop.remember(grad);
                else rprop.reject();
            } else {
                gamma += d;
                gamma -= cfg.learning_rate * cfg.weight_decay * gamma;
                f = FactorPair::unflatten(gamma, n, M, cfg.R);
                rprop.remember(grad);
                current = quadratic_loss(graph, f, cfg.link, wc);
            }

            EpochLoss loss;
            loss.gee = current;
            loss.bce = full_batch_bce(graph, f, cfg.link);
            loss.total = current;
            guard(loss.total, epoch);
            report.loss_trace.push_back(loss);

            if (refresh_due(epoch)) {
                report.score_norm_trace.push_back(s.norm());
                Matrix w = detail::maybe_normalize_correlation(
                    estimate_w_full(graph, f, cfg.link), cfg.normalize_correlation);
                wc.set_w(w);
                current = quadratic_loss(graph, f, cfg.link, wc);
            }
        }
    } else {
        const std::vector<Triplet>& positives = graph.triplets();
        Rng sample_rng = root.substream("sampling");
        BatchLossOptions opts;
        opts.lambda = cfg.gee_lambda;
        opts.gee_full_fiber = cfg.gee_full_fiber;
        opts.graph = &graph;

        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            std::vector<LabeledTriplet> labeled;
            labeled.reserve(positives.size());
            for (const Triplet& t : positives) labeled.push_back({t.i, t.j, t.m, 1});
            // batch over positives; negatives drawn per batch
            std::vector<TripletBatch> pos_batches = iterate_batches(
                std::move(labeled), static_cast<std::size_t>(cfg.batch_size), sample_rng,
                /*shuffle=*/true);

            EpochLoss epoch_loss;
            bool do_refresh = refresh_due(epoch);
            for (TripletBatch& batch : pos_batches) {
                std::vector<Triplet> batch_pos;
                batch_pos.reserve(batch.entries.size());
                for (const LabeledTriplet& e : batch.entries)
                    batch_pos.push_back({e.i, e.j, e.m});
                for (const LabeledTriplet& neg :
                     sample_negatives(graph, batch_pos, cfg.neg_ratio, sample_rng))
                    batch.entries.push_back(neg);
                batch.build_groups();

                Vector grad = Vector::Zero(gamma.size());
                EpochLoss bl = batch_gee_loss(batch, f, cfg.link, wc, opts, &grad);
                adam.step(gamma, grad, cfg.learning_rate, cfg.weight_decay);
                f = FactorPair::unflatten(gamma, n, M, cfg.R);

                epoch_loss.bce += bl.bce;
                epoch_loss.gee += bl.gee;
                epoch_loss.total += bl.total;

                if (do_refresh) {
                    Matrix w_batch = detail::maybe_normalize_correlation(
                        detail::batch_w_estimate(batch, graph, f, cfg.link),
                        cfg.normalize_correlation);
                    wc.momentum_update(w_batch);
                }
            }
            double nb = static_cast<double>(pos_batches.size());
            epoch_loss.bce /= nb;
            epoch_loss.gee /= nb;
            epoch_loss.total /= nb;
            guard(epoch_loss.total, epoch);
            report.loss_trace.push_back(epoch_loss);
        }
    }

    report.factors = std::move(f);
    report.w_final = wc.W();
    report.diag = diagnostics(graph, cfg.R);
    if (cfg.R <= 12)
        report.diag.kruskal_ok = kruskal_check(report.factors).satisfied;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Checkpoint format: `#tginee-model n=<n> M=<M> R=<R> link=<kind> s=<s>` then
// n alpha rows, M beta rows, M rows of W; 17 significant digits throughout.

struct Checkpoint {
    FactorPair factors;
    Matrix W;
    LinkFunction link;
};

inline void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    const FactorPair& f = ckpt.factors;
    out << "#tginee-model n=" << f.n() << " M=" << f.M() << " R=" << f.R()
        << " link=" << to_string(ckpt.link.kind) << " s=" << ckpt.link.s << "\n";
    out.precision(17);
    auto write_rows = [&](const Matrix& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (c) out << ' ';
                out << m(i, c);
            }
            out << '\n';
        }
    };
    write_rows(f.alpha);
    write_rows(f.beta);
    write_rows(ckpt.W);
}

inline Checkpoint read_checkpoint(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("checkpoint: empty input");
    int n = -1, M = -1, R = -1;
    char kind_buf[32] = {0};
    double s = 1.0;
    if (std::sscanf(header.c_str(), "#tginee-model n=%d M=%d R=%d link=%31s s=%lf", &n, &M,
                    &R, kind_buf, &s) != 5)
        throw ParseError("checkpoint: bad header: " + header);
    Checkpoint ckpt;
    ckpt.link = LinkFunction(link_kind_from_string(kind_buf), s);
    ckpt.factors.alpha.resize(n, R);
    ckpt.factors.beta.resize(M, R);
    ckpt.W.resize(M, M);
    auto read_rows = [&](Matrix& m, const char* what) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::string line;
            if (!std::getline(in, line))
                throw ParseError(std::string("checkpoint: truncated ") + what);
            std::istringstream ls(line);
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                if (!(ls >> m(i, c)))
                    throw ParseError(std::string("checkpoint: bad row in ") + what);
        }
    };
    read_rows(ckpt.factors.alpha, "alpha");
    read_rows(ckpt.factors.beta, "beta");
    read_rows(ckpt.W, "W");
    return ckpt;
}

inline void write_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_checkpoint(out, ckpt);
}

inline Checkpoint read_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_checkpoint(in);
}

/// W exported as CSV, M rows, 6 significant digits.
inline void write_w_csv(std::ostream& out, const Matrix& w) {
    out.precision(6);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (j) out << ',';
            out << w(i, j);
        }
        out << '\n';
    }
}

}  // namespace tginee
