#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tginee/errors.hpp"
#include "tginee/factors.hpp"
#include "tginee/graph.hpp"
#include "tginee/link.hpp"
#include "tginee/rng.hpp"

namespace tginee {

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    std::uint64_t seed = 42;

    void validate() const {
        if (train_frac < 0 || val_frac < 0 || test_frac < 0)
            throw std::invalid_argument("split fractions must be nonnegative");
        if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
            throw std::invalid_argument("split fractions must sum to 1");
    }
};

struct Split {
    std::vector<Triplet> positives;
    std::vector<Triplet> negatives;  // uniformly sampled non-edges, |pos| of them
};

struct SplitResult {
    Split train;
    Split val;
    Split test;
};

/// Shuffles positives per seed, partitions by fractions, and attaches an equal
/// number of uniformly sampled non-edges to each split for balanced evaluation.
inline SplitResult split_triplets(const SparseMultiLayerGraph& graph, const SplitSpec& spec) {
    spec.validate();
    std::vector<Triplet> positives = graph.triplets();
    Rng root(spec.seed);
    Rng shuffle_rng = root.substream("split-shuffle");
    for (std::size_t k = positives.size(); k > 1; --k) {
        std::size_t pick = static_cast<std::size_t>(shuffle_rng.uniform_index(k));
        std::swap(positives[k - 1], positives[pick]);
    }
    const auto total = static_cast<long long>(positives.size());
    long long n_train = std::llround(spec.train_frac * total);
    long long n_val = std::llround(spec.val_frac * total);
    n_train = std::min(n_train, total);
    n_val = std::min(n_val, total - n_train);
    long long n_test = total - n_train - n_val;

    auto check = [&](double frac, long long count, const char* name) {
        if (frac > 0.0 && count == 0)
            throw InsufficientDataError(std::string("split received zero positives: ") + name);
    };
    check(spec.train_frac, n_train, "train");
    check(spec.val_frac, n_val, "val");
    check(spec.test_frac, n_test, "test");

    SplitResult out;
    out.train.positives.assign(positives.begin(), positives.begin() + n_train);
    out.val.positives.assign(positives.begin() + n_train, positives.begin() + n_train + n_val);
    out.test.positives.assign(positives.begin() + n_train + n_val, positives.end());

    const int n = graph.node_count();
    const int M = graph.layer_count();
    Rng neg_rng = root.substream("split-negatives");
    auto sample_nonedges = [&](std::size_t count) {
        std::vector<Triplet> negs;
        negs.reserve(count);
        while (negs.size() < count) {
            int i = static_cast<int>(neg_rng.uniform_index(static_cast<std::uint64_t>(n)));
            int j = static_cast<int>(neg_rng.uniform_index(static_cast<std::uint64_t>(n)));
            int m = static_cast<int>(neg_rng.uniform_index(static_cast<std::uint64_t>(M)));
            if (i == j) continue;
            if (graph.has_edge(i, j, m)) continue;
            auto [lo, hi] = canonical_pair(i, j);
            negs.push_back({lo, hi, m});
        }
        return negs;
    };
    out.train.negatives = sample_nonedges(out.train.positives.size());
    out.val.negatives = sample_nonedges(out.val.positives.size());
    out.test.negatives = sample_nonedges(out.test.positives.size());
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

/// Mann-Whitney AUC with midrank tie handling: the probability that a random
/// positive outscores a random negative, ties counted one half.
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc: scores/labels size mismatch");
    std::size_t pos = 0, neg = 0;
    for (int l : labels) (l != 0 ? pos : neg)++;
    if (pos == 0 || neg == 0)
        throw UndefinedMetricError("auc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t idx = 0;
    while (idx < order.size()) {
        std::size_t run_end = idx;
        while (run_end + 1 < order.size() &&
               scores[order[run_end + 1]] == scores[order[idx]])
            ++run_end;
        double midrank = 0.5 * (static_cast<double>(idx + 1) + static_cast<double>(run_end + 1));
        for (std::size_t k = idx; k <= run_end; ++k)
            if (labels[order[k]] != 0) pos_rank_sum += midrank;
        idx = run_end + 1;
    }
    double u = pos_rank_sum - static_cast<double>(pos) * (pos + 1) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

/// predict_score = g^{-1}(Theta_{i,j,m}); equals pair_probability(...)[m].
inline double predict_score(const FactorPair& f, const LinkFunction& link, int i, int j,
                            int m) {
    return link.inverse(theta_entry(f, i, j, m));
}

/// AUC of a model over a positive/negative triplet evaluation set.
inline double auc_on_split(const FactorPair& f, const LinkFunction& link, const Split& split) {
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(split.positives.size() + split.negatives.size());
    for (const Triplet& t : split.positives) {
        scores.push_back(predict_score(f, link, t.i, t.j, t.m));
        labels.push_back(1);
    }
    for (const Triplet& t : split.negatives) {
        scores.push_back(predict_score(f, link, t.i, t.j, t.m));
        labels.push_back(0);
    }
    return auc(scores, labels);
}

// ---------------------------------------------------------------------------
// Diagnostics

/// R ~ round(C ln(min(n, M))), floored at 1.
inline int suggest_rank(int n, int M, double C) {
    if (n < 2 || M < 2) throw std::invalid_argument("suggest_rank: need n, M >= 2");
    if (C <= 0.0) throw std::invalid_argument("suggest_rank: C must be positive");
    long r = std::lround(C * std::log(static_cast<double>(std::min(n, M))));
    return static_cast<int>(std::max(1L, r));
}

struct Diagnostics {
    std::int64_t N = 0;       // n(n+1)/2
    std::int64_t p = 0;       // (n+M)R
    std::int64_t e_obs = 0;   // observed positive triplet count
    double ratio_pairs = 0.0; // N / p
    double ratio_edges = 0.0; // e_obs / p
    std::optional<bool> kruskal_ok;
    int suggested_R = 1;
};

inline Diagnostics diagnostics(const SparseMultiLayerGraph& graph, int R, double C = 8.0) {
    if (R < 1) throw std::invalid_argument("diagnostics: R >= 1 required");
    Dims d(graph.node_count(), graph.layer_count(), R);
    Diagnostics out;
    out.N = d.pair_count();
    out.p = d.param_dim();
    out.e_obs = static_cast<std::int64_t>(graph.total_edges());
    out.ratio_pairs = static_cast<double>(out.N) / static_cast<double>(out.p);
    out.ratio_edges = static_cast<double>(out.e_obs) / static_cast<double>(out.p);
    if (graph.node_count() >= 2 && graph.layer_count() >= 2)
        out.suggested_R = suggest_rank(graph.node_count(), graph.layer_count(), C);
    return out;
}

/// Diagnostics from bare counts (for published-table reproduction where the
/// dataset itself is not available).
inline Diagnostics diagnostics_from_counts(std::int64_t n, std::int64_t M, int R,
                                           std::int64_t e_obs) {
    Diagnostics out;
    out.N = n * (n + 1) / 2;
    out.p = (n + M) * R;
    out.e_obs = e_obs;
    out.ratio_pairs = static_cast<double>(out.N) / static_cast<double>(out.p);
    out.ratio_edges = static_cast<double>(out.e_obs) / static_cast<double>(out.p);
    return out;
}

// ---------------------------------------------------------------------------
// Kruskal uniqueness check

namespace detail {

inline int matrix_rank_svd(const Matrix& m, double rel_tol) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double top = sv(0);
    if (top <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > rel_tol * top) ++rank;
    return rank;
}

/// Largest k such that every k-column subset is linearly independent.
inline int kruskal_rank(const Matrix& m, double rel_tol = 1e-9) {
    const int R = static_cast<int>(m.cols());
    const int rows = static_cast<int>(m.rows());
    int best = 0;
    for (int k = 1; k <= std::min(R, rows); ++k) {
        std::vector<int> subset(static_cast<std::size_t>(k));
        std::iota(subset.begin(), subset.end(), 0);
        bool all_independent = true;
        for (;;) {
            Matrix cols(rows, k);
            for (int c = 0; c < k; ++c) cols.col(c) = m.col(subset[static_cast<std::size_t>(c)]);
            if (matrix_rank_svd(cols, rel_tol) < k) {
                all_independent = false;
                break;
            }
            // next k-combination
            int pos = k - 1;
            while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == R - k + pos) --pos;
            if (pos < 0) break;
            ++subset[static_cast<std::size_t>(pos)];
            for (int c = pos + 1; c < k; ++c)
                subset[static_cast<std::size_t>(c)] = subset[static_cast<std::size_t>(c - 1)] + 1;
        }
        if (!all_independent) break;
        best = k;
    }
    return best;
}

}  // namespace detail

struct KruskalResult {
    int k_alpha = 0;
    int k_beta = 0;
    bool satisfied = false;  // 2 k_alpha + k_beta >= 2R + 2
};

inline KruskalResult kruskal_check(const FactorPair& f, double rel_tol = 1e-9) {
    if (f.R() > 12)
        throw std::invalid_argument(
            "kruskal_check: R > 12 refused (combinatorial subset enumeration)");
    KruskalResult out;
    out.k_alpha = detail::kruskal_rank(f.alpha, rel_tol);
    out.k_beta = detail::kruskal_rank(f.beta, rel_tol);
    out.satisfied = 2 * out.k_alpha + out.k_beta >= 2 * f.R() + 2;
    return out;
}

// ---------------------------------------------------------------------------
// Triangle prediction (Appendix-style protocol, mask-during-single-fit)

using GraphScorer = std::function<double(int i, int j, int m)>;
using FitFunction = std::function<GraphScorer(const SparseMultiLayerGraph&)>;

struct TriangleOptions {
    std::size_t max_triangles = 200;
};

/// Enumerates within-layer triangles, removes one uniformly chosen edge per
/// sampled triangle, fits once on the masked graph, and scores each held-out
/// edge against a matched random non-edge in the same layer.
inline double triangle_prediction(const SparseMultiLayerGraph& graph, const FitFunction& fit_fn,
                                  Rng& rng, const TriangleOptions& opts = {}) {
    const int n = graph.node_count();
    const int M = graph.layer_count();

    struct TriangleRef {
        int a, b, c, m;
    };
    std::vector<TriangleRef> triangles;
    for (int m = 0; m < M; ++m) {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const Triplet& t : graph.triplets())
            if (t.m == m && t.i != t.j) {
                adj[static_cast<std::size_t>(t.i)].push_back(t.j);
                adj[static_cast<std::size_t>(t.j)].push_back(t.i);
            }
        for (auto& lst : adj) std::sort(lst.begin(), lst.end());
        for (int a = 0; a < n; ++a)
            for (int b : adj[static_cast<std::size_t>(a)]) {
                if (b <= a) continue;
                for (int c : adj[static_cast<std::size_t>(b)]) {
                    if (c <= b) continue;
                    if (graph.has_edge(a, c, m)) triangles.push_back({a, b, c, m});
                }
            }
    }
    if (triangles.empty())
        throw TaskUndefinedError("triangle_prediction: graph has no within-layer triangles");

    // sample triangles without replacement
    for (std::size_t k = triangles.size(); k > 1; --k) {
        std::size_t pick = static_cast<std::size_t>(rng.uniform_index(k));
        std::swap(triangles[k - 1], triangles[pick]);
    }
    if (triangles.size() > opts.max_triangles) triangles.resize(opts.max_triangles);

    SparseMultiLayerGraph masked = graph;
    struct Trial {
        Triplet held_out;
        Triplet non_edge;
    };
    std::vector<Trial> trials;
    for (const TriangleRef& tri : triangles) {
        int edge_pick = static_cast<int>(rng.uniform_index(3));
        Triplet e;
        if (edge_pick == 0) e = {tri.a, tri.b, tri.m};
        else if (edge_pick == 1) e = {tri.b, tri.c, tri.m};
        else e = {tri.a, tri.c, tri.m};
        if (!masked.has_edge(e.i, e.j, e.m)) continue;  // removed by an earlier triangle
        masked.remove_edge(e.i, e.j, e.m);

        Triplet non_edge{};
        bool found = false;
        for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
            int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            if (i == j) continue;
            if (graph.has_edge(i, j, e.m)) continue;
            auto [lo, hi] = canonical_pair(i, j);
            non_edge = {lo, hi, e.m};
            found = true;
        }
        if (!found) continue;
        trials.push_back({e, non_edge});
    }
    if (trials.empty())
        throw TaskUndefinedError("triangle_prediction: no usable trials");

    GraphScorer scorer = fit_fn(masked);
    double hits = 0.0;
    for (const Trial& tr : trials) {
        double se = scorer(tr.held_out.i, tr.held_out.j, tr.held_out.m);
        double sn = scorer(tr.non_edge.i, tr.non_edge.j, tr.non_edge.m);
        if (se > sn) hits += 1.0;
        else if (se == sn) hits += 0.5;
    }
    return hits / static_cast<double>(trials.size());
}

// ---------------------------------------------------------------------------
// Zero-shot layer scoring

enum class ZeroShotStrategy { mean_beta, nearest_beta, provided_beta };

inline ZeroShotStrategy zero_shot_strategy_from_string(const std::string& s) {
    if (s == "mean_beta") return ZeroShotStrategy::mean_beta;
    if (s == "nearest_beta") return ZeroShotStrategy::nearest_beta;
    if (s == "provided_beta") return ZeroShotStrategy::provided_beta;
    throw std::invalid_argument("unknown zero-shot strategy: " + s);
}

/// Side information for choosing the surrogate layer embedding: similarity of
/// the unseen layer to each trained layer (nearest_beta) or an explicit row
/// (provided_beta).
struct ZeroShotContext {
    ZeroShotStrategy strategy = ZeroShotStrategy::mean_beta;
    std::optional<Vector> similarity_to_trained;  // length = trained layer count
    std::optional<Vector> provided_beta;          // length R
};

/// Surrogate beta row for a layer with no training edges.
inline Vector zero_shot_beta(const FactorPair& trained, const ZeroShotContext& ctx) {
    switch (ctx.strategy) {
        case ZeroShotStrategy::mean_beta:
            return trained.beta.colwise().mean().transpose();
        case ZeroShotStrategy::nearest_beta: {
            if (!ctx.similarity_to_trained ||
                ctx.similarity_to_trained->size() != trained.M())
                throw std::invalid_argument(
                    "zero_shot: nearest_beta needs a similarity entry per trained layer");
            Eigen::Index best;
            ctx.similarity_to_trained->maxCoeff(&best);
            return trained.beta.row(best).transpose();
        }
        case ZeroShotStrategy::provided_beta:
            if (!ctx.provided_beta || ctx.provided_beta->size() != trained.R())
                throw std::invalid_argument("zero_shot: provided_beta of length R required");
            return *ctx.provided_beta;
    }
    throw std::invalid_argument("zero_shot: bad strategy");
}

/// Scores pair (i, j) on the unseen layer via the surrogate beta row.
inline double zero_shot_layer_score(const FactorPair& trained, const LinkFunction& link,
                                    const ZeroShotContext& ctx, int i, int j) {
    check_pair_indices(trained, i, j);
    Vector beta_row = zero_shot_beta(trained, ctx);
    auto [lo, hi] = canonical_pair(i, j);
    double theta = 0.0;
    for (int r = 0; r < trained.R(); ++r)
        theta += trained.alpha(lo, r) * trained.alpha(hi, r) * beta_row(r);
    return link.inverse(theta);
}

/// Jaccard similarity of two layers' edge sets (shared context for ordering
/// checks and nearest_beta inputs).
inline double layer_jaccard(const SparseMultiLayerGraph& g, int m1, int m2) {
    std::size_t both = 0, either = 0;
    for (const Triplet& t : g.triplets()) {
        if (t.m == m1) {
            ++either;
            if (g.has_edge(t.i, t.j, m2)) ++both;
        } else if (t.m == m2) {
            ++either;
        }
    }
    either -= both;  // union = |A| + |B| - |A and B|
    return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace tginee
