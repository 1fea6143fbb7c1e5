#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tginee/errors.hpp"

namespace tginee {

/// Problem dimensions: n nodes, M layers, CP rank R. N and p are derived
/// on demand so they can never go stale.
struct Dims {
    int n = 0;
    int M = 0;
    int R = 1;

    Dims() = default;
    Dims(int n_, int M_, int R_ = 1) : n(n_), M(M_), R(R_) {
        if (n < 1 || M < 1 || R < 1)
            throw std::invalid_argument("Dims: n, M, R must be >= 1");
    }

    /// Number of unordered node pairs including the diagonal, n(n+1)/2.
    std::int64_t pair_count() const {
        return static_cast<std::int64_t>(n) * (n + 1) / 2;
    }
    /// Effective parameter dimension (n+M)R.
    std::int64_t param_dim() const {
        return static_cast<std::int64_t>(n + M) * R;
    }
};

/// Sorted copy of an index pair; the canonical i <= j representative.
inline std::pair<int, int> canonical_pair(int i, int j) {
    return i <= j ? std::make_pair(i, j) : std::make_pair(j, i);
}

struct Triplet {
    int i;
    int j;
    int m;
};

inline bool operator==(const Triplet& a, const Triplet& b) {
    return a.i == b.i && a.j == b.j && a.m == b.m;
}

/// Undirected multilayer graph stored as per-layer hash sets of canonical
/// pairs plus a flat triplet list for iteration. Membership is O(1); Theta
/// and P are never materialized as n x n x M arrays.
class SparseMultiLayerGraph {
public:
    SparseMultiLayerGraph() = default;
    SparseMultiLayerGraph(int n, int M)
        : dims_(n, M), layers_(static_cast<std::size_t>(M)) {}
    explicit SparseMultiLayerGraph(const Dims& d)
        : dims_(d), layers_(static_cast<std::size_t>(d.M)) {}

    const Dims& dims() const { return dims_; }
    int node_count() const { return dims_.n; }
    int layer_count() const { return dims_.M; }

    void add_edge(int i, int j, int m) {
        check_indices(i, j, m);
        auto [lo, hi] = canonical_pair(i, j);
        auto [it, inserted] = layers_[m].insert(key(lo, hi));
        if (inserted) triplets_.push_back({lo, hi, m});
    }

    bool remove_edge(int i, int j, int m) {
        check_indices(i, j, m);
        auto [lo, hi] = canonical_pair(i, j);
        if (layers_[m].erase(key(lo, hi)) == 0) return false;
        for (std::size_t t = 0; t < triplets_.size(); ++t) {
            if (triplets_[t].i == lo && triplets_[t].j == hi && triplets_[t].m == m) {
                triplets_[t] = triplets_.back();
                triplets_.pop_back();
                break;
            }
        }
        return true;
    }

    bool has_edge(int i, int j, int m) const {
        check_indices(i, j, m);
        auto [lo, hi] = canonical_pair(i, j);
        return layers_[m].count(key(lo, hi)) != 0;
    }

    std::size_t edge_count(int m) const { return layers_.at(m).size(); }
    std::size_t total_edges() const { return triplets_.size(); }

    /// Flat list of observed positive triplets, canonicalized, insertion order.
    const std::vector<Triplet>& triplets() const { return triplets_; }

private:
    void check_indices(int i, int j, int m) const {
        if (i < 0 || i >= dims_.n || j < 0 || j >= dims_.n)
            throw std::out_of_range("node index out of range");
        if (m < 0 || m >= dims_.M)
            throw std::out_of_range("layer index out of range");
    }
    std::uint64_t key(int lo, int hi) const {
        return (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
    }

    Dims dims_{1, 1, 1};
    std::vector<std::unordered_set<std::uint64_t>> layers_;
    std::vector<Triplet> triplets_;
};

// ---------------------------------------------------------------------------
// Edge-list text format: header line `#tginee n=<n> M=<M>` then one triplet
// per line `i<TAB>j<TAB>m`, 0-based. Lines with i > j are canonicalized.

inline void write_edge_list(std::ostream& out, const SparseMultiLayerGraph& g) {
    out << "#tginee n=" << g.node_count() << " M=" << g.layer_count() << "\n";
    for (const Triplet& t : g.triplets())
        out << t.i << '\t' << t.j << '\t' << t.m << '\n';
}

inline SparseMultiLayerGraph read_edge_list(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw ParseError("edge list: empty input");
    int n = -1, M = -1;
    if (std::sscanf(header.c_str(), "#tginee n=%d M=%d", &n, &M) != 2)
        throw ParseError("edge list: bad header: " + header);
    SparseMultiLayerGraph g(n, M);
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        int i, j, m;
        if (std::sscanf(line.c_str(), "%d\t%d\t%d", &i, &j, &m) != 3 &&
            std::sscanf(line.c_str(), "%d %d %d", &i, &j, &m) != 3)
            throw ParseError("edge list: bad triplet at line " + std::to_string(lineno));
        try {
            g.add_edge(i, j, m);
        } catch (const std::out_of_range&) {
            throw ParseError("edge list: index out of range at line " + std::to_string(lineno));
        }
    }
    return g;
}

inline void write_edge_list_file(const std::string& path, const SparseMultiLayerGraph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_edge_list(out, g);
}

inline SparseMultiLayerGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_edge_list(in);
}

}  // namespace tginee
