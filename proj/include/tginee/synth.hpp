#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tginee/factors.hpp"
#include "tginee/graph.hpp"
#include "tginee/link.hpp"
#include "tginee/rng.hpp"

namespace tginee {

/// Ground-truth edge probabilities for off-diagonal pairs i < j; diagonal
/// probabilities are identically zero (generators emit no self-loops).
class TruthTable {
public:
    TruthTable() = default;
    TruthTable(int n, int M)
        : n_(n), M_(M),
          p_(static_cast<std::size_t>(n) * (n - 1) / 2 * M, 0.0) {}

    int n() const { return n_; }
    int M() const { return M_; }

    double operator()(int i, int j, int m) const {
        if (i == j) return 0.0;
        return p_[offset(i, j, m)];
    }
    void set(int i, int j, int m, double v) { p_[offset(i, j, m)] = v; }

private:
    std::size_t offset(int i, int j, int m) const {
        auto [lo, hi] = canonical_pair(i, j);
        // pairs with lo < hi enumerated lexicographically
        std::size_t pair_idx = static_cast<std::size_t>(lo) * n_ -
                               static_cast<std::size_t>(lo) * (lo + 1) / 2 +
                               (hi - lo - 1);
        return pair_idx * M_ + m;
    }
    int n_ = 0, M_ = 0;
    std::vector<double> p_;
};

enum class BaseKind { uniform_random, block };

/// Synthetic generator settings: P_{i,j,m} = rho P^base_{i,j} + (1-rho) U_{i,j,m}
/// with edges drawn by thresholding an independent uniform V. Heterogeneous
/// mode mixes in per-layer-pair shared components weighted by layer_rho.
struct SynthSpec {
    int n = 100;
    int M = 3;
    double rho = 0.2;
    BaseKind base_kind = BaseKind::uniform_random;
    std::vector<int> block_sizes;
    double within_prob = 0.8;
    double between_prob = 0.1;
    std::optional<Matrix> layer_rho;  // symmetric M x M, off-diagonal used
    std::uint64_t seed = 42;

    void validate() const {
        if (n < 2 || M < 1) throw std::invalid_argument("SynthSpec: need n >= 2, M >= 1");
        if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("SynthSpec: rho in [0,1]");
        if (base_kind == BaseKind::block) {
            long long total = 0;
            for (int b : block_sizes) total += b;
            if (total != n)
                throw std::invalid_argument("SynthSpec: block sizes must sum to n");
            if (within_prob < 0 || within_prob > 1 || between_prob < 0 || between_prob > 1)
                throw std::invalid_argument("SynthSpec: block probabilities in [0,1]");
        }
        if (layer_rho) {
            if (layer_rho->rows() != M || layer_rho->cols() != M)
                throw std::invalid_argument("SynthSpec: layer_rho must be M x M");
            for (int m = 0; m < M; ++m) {
                double total = rho;
                for (int m2 = 0; m2 < M; ++m2) {
                    if (m2 == m) continue;
                    double w = (*layer_rho)(m, m2);
                    if (w < 0.0) throw std::invalid_argument("SynthSpec: layer_rho >= 0");
                    if (std::abs(w - (*layer_rho)(m2, m)) > 1e-12)
                        throw std::invalid_argument("SynthSpec: layer_rho must be symmetric");
                    total += w;
                }
                if (total > 1.0 + 1e-12)
                    throw std::invalid_argument(
                        "SynthSpec: rho + sum of layer_rho weights exceeds 1 for a layer");
            }
        }
    }
};

struct SynthResult {
    SparseMultiLayerGraph graph;
    TruthTable truth;
    Matrix planted_similarity;  // heterogeneous mode only; empty otherwise
};

namespace detail {

inline std::vector<int> block_membership(const SynthSpec& spec) {
    std::vector<int> community(spec.n, 0);
    int node = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
        for (int k = 0; k < spec.block_sizes[b]; ++k) community[node++] = static_cast<int>(b);
    return community;
}

inline Matrix draw_base_table(const SynthSpec& spec, Rng& rng) {
    Matrix base = Matrix::Zero(spec.n, spec.n);
    std::vector<int> community;
    if (spec.base_kind == BaseKind::block) community = block_membership(spec);
    for (int i = 0; i < spec.n; ++i) {
        for (int j = i + 1; j < spec.n; ++j) {
            double p;
            if (spec.base_kind == BaseKind::uniform_random)
                p = rng.uniform();
            else
                p = community[i] == community[j] ? spec.within_prob : spec.between_prob;
            base(i, j) = base(j, i) = p;
        }
    }
    return base;
}

}  // namespace detail

/// Homogeneous generator: shared base table mixed with independent per-layer
/// noise at weight rho; deterministic per seed, no diagonal edges.
inline SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    Rng root(spec.seed);
    Rng base_rng = root.substream("base");
    Matrix base = detail::draw_base_table(spec, base_rng);
    SynthResult out{SparseMultiLayerGraph(spec.n, spec.M), TruthTable(spec.n, spec.M), {}};
    Rng noise = root.substream("noise");
    for (int i = 0; i < spec.n; ++i) {
        for (int j = i + 1; j < spec.n; ++j) {
            for (int m = 0; m < spec.M; ++m) {
                double u = noise.uniform();
                double v = noise.uniform();
                double p = spec.rho * base(i, j) + (1.0 - spec.rho) * u;
                out.truth.set(i, j, m, p);
                if (v < p) out.graph.add_edge(i, j, m);
            }
        }
    }
    return out;
}

/// Heterogeneous generator: every unordered layer pair (m, m') shares an extra
/// uniform component with weight layer_rho(m, m') on top of the common base,
/// so planted pairwise layer similarity is ordered by layer_rho. The exact
/// mixture is this artifact's construction; only the ordering is calibrated.
inline SynthResult generate_heterogeneous(const SynthSpec& spec) {
    if (!spec.layer_rho)
        throw std::invalid_argument("generate_heterogeneous: layer_rho required");
    spec.validate();
    const Matrix& lr = *spec.layer_rho;
    Rng root(spec.seed);
    Rng base_rng = root.substream("base");
    Matrix base = detail::draw_base_table(spec, base_rng);
    SynthResult out{SparseMultiLayerGraph(spec.n, spec.M), TruthTable(spec.n, spec.M), {}};
    out.planted_similarity = Matrix::Identity(spec.M, spec.M);
    for (int a = 0; a < spec.M; ++a)
        for (int b = 0; b < spec.M; ++b)
            if (a != b) out.planted_similarity(a, b) = lr(a, b);

    Rng noise = root.substream("noise");
    std::vector<double> shared(static_cast<std::size_t>(spec.M) * spec.M);
    std::vector<double> p(static_cast<std::size_t>(spec.M));
    for (int i = 0; i < spec.n; ++i) {
        for (int j = i + 1; j < spec.n; ++j) {
            for (int a = 0; a < spec.M; ++a)
                for (int b = a + 1; b < spec.M; ++b)
                    shared[static_cast<std::size_t>(a) * spec.M + b] = noise.uniform();
            for (int m = 0; m < spec.M; ++m) {
                double weight_used = spec.rho;
                double mix = spec.rho * base(i, j);
                for (int m2 = 0; m2 < spec.M; ++m2) {
                    if (m2 == m) continue;
                    auto [a, b] = canonical_pair(m, m2);
                    double w = lr(m, m2);
                    mix += w * shared[static_cast<std::size_t>(a) * spec.M + b];
                    weight_used += w;
                }
                mix += (1.0 - weight_used) * noise.uniform();
                p[static_cast<std::size_t>(m)] = mix;
            }
            for (int m = 0; m < spec.M; ++m) {
                out.truth.set(i, j, m, p[static_cast<std::size_t>(m)]);
                if (noise.uniform() < p[static_cast<std::size_t>(m)])
                    out.graph.add_edge(i, j, m);
            }
        }
    }
    return out;
}

struct PerturbResult {
    SparseMultiLayerGraph graph;
    std::vector<int> shortfall;  // per layer: requested - performed edits
};

/// Deletes a uniform fraction noise_ratio/2 of each layer's edges and adds an
/// equal count of uniform non-edges, keeping density approximately constant.
inline PerturbResult perturb(const SparseMultiLayerGraph& graph, double noise_ratio,
                             Rng& rng) {
    if (noise_ratio < 0.0 || noise_ratio > 1.0)
        throw std::invalid_argument("perturb: noise_ratio in [0,1]");
    const int n = graph.node_count();
    const int M = graph.layer_count();
    PerturbResult out{graph, std::vector<int>(static_cast<std::size_t>(M), 0)};
    if (noise_ratio == 0.0) return out;

    for (int m = 0; m < M; ++m) {
        std::vector<Triplet> layer_edges;
        for (const Triplet& t : graph.triplets())
            if (t.m == m) layer_edges.push_back(t);
        const auto E = static_cast<long long>(layer_edges.size());
        long long edits = static_cast<long long>(std::llround(noise_ratio * E / 2.0));

        // deletions: partial Fisher-Yates picks `edits` distinct edges
        long long deletions = std::min(edits, E);
        for (long long k = 0; k < deletions; ++k) {
            std::size_t pick =
                k + static_cast<std::size_t>(rng.uniform_index(
                        static_cast<std::uint64_t>(E - k)));
            std::swap(layer_edges[static_cast<std::size_t>(k)], layer_edges[pick]);
            const Triplet& t = layer_edges[static_cast<std::size_t>(k)];
            out.graph.remove_edge(t.i, t.j, t.m);
        }
        out.shortfall[static_cast<std::size_t>(m)] += static_cast<int>(edits - deletions);

        // additions: rejection-sample off-diagonal non-edges
        long long possible =
            static_cast<long long>(n) * (n - 1) / 2 - static_cast<long long>(out.graph.edge_count(m));
        long long additions = std::min(edits, possible);
        long long added = 0;
        long long attempts = 0;
        const long long max_attempts = std::max<long long>(1000, 200 * additions);
        while (added < additions && attempts < max_attempts) {
            ++attempts;
            int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            if (i == j) continue;
            if (out.graph.has_edge(i, j, m)) continue;
            out.graph.add_edge(i, j, m);
            ++added;
        }
        out.shortfall[static_cast<std::size_t>(m)] += static_cast<int>(edits - added);
    }
    return out;
}

/// Draws ground-truth CP factors (scaled so logit probabilities spread over
/// roughly [0.05, 0.95]) and samples each off-diagonal edge independently.
inline std::pair<FactorPair, SparseMultiLayerGraph> plant_cp_model(
    int n, int M, int R, const LinkFunction& link, std::uint64_t seed) {
    Dims dims(n, M, R);
    Rng root(seed);
    Rng factor_rng = root.substream("factors");
    // sd(theta) = sqrt(R) sigma_a^2 sigma_b; target spread ~1.8
    double sigma_a = std::sqrt(1.8 / std::sqrt(static_cast<double>(R)));
    FactorPair f;
    f.alpha.resize(n, R);
    f.beta.resize(M, R);
    for (int r = 0; r < R; ++r)
        for (int i = 0; i < n; ++i) f.alpha(i, r) = sigma_a * factor_rng.gauss();
    for (int r = 0; r < R; ++r)
        for (int m = 0; m < M; ++m) f.beta(m, r) = factor_rng.gauss();

    SparseMultiLayerGraph g(n, M);
    Rng edge_rng = root.substream("edges");
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Vector fiber = theta_fiber(f, i, j);
            for (int m = 0; m < M; ++m) {
                double p = link.inverse(fiber(m));
                if (edge_rng.uniform() < p) g.add_edge(i, j, m);
            }
        }
    }
    return {std::move(f), std::move(g)};
}

// Truth sidecar format: `#tginee-truth n=<n> M=<M>` then one line per pair
// `i<TAB>j<TAB>p_1 ... p_M`. Intended for small n only.
inline void write_truth_file(const std::string& path, const TruthTable& truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "#tginee-truth n=" << truth.n() << " M=" << truth.M() << "\n";
    out.precision(17);
    for (int i = 0; i < truth.n(); ++i) {
        for (int j = i + 1; j < truth.n(); ++j) {
            out << i << '\t' << j;
            for (int m = 0; m < truth.M(); ++m) out << '\t' << truth(i, j, m);
            out << '\n';
        }
    }
}

}  // namespace tginee
