#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tginee/errors.hpp"
#include "tginee/graph.hpp"
#include "tginee/rng.hpp"

namespace tginee {

struct LabeledTriplet {
    int i;
    int j;
    int m;
    int label;  // 1 = observed positive, 0 = sampled negative
};

/// A mini-batch of labeled triplets plus a grouping index: each distinct pair
/// (i,j) occurring in the batch maps to the entry slots that belong to it.
struct TripletBatch {
    std::vector<LabeledTriplet> entries;
    // pair -> indices into `entries`; every entry appears exactly once
    std::vector<std::pair<std::pair<int, int>, std::vector<int>>> pair_groups;

    void build_groups() {
        std::map<std::pair<int, int>, std::vector<int>> groups;
        for (int t = 0; t < static_cast<int>(entries.size()); ++t)
            groups[{entries[t].i, entries[t].j}].push_back(t);
        pair_groups.assign(groups.begin(), groups.end());
    }
};

/// Uniform dynamic negative sampling: for each positive (u,v,m) emits k
/// triplets (u,v',m) with v' uniform over nodes. Collisions with true edges
/// are kept (labeled 0); only self-pairs u = v' are redrawn.
inline std::vector<LabeledTriplet> sample_negatives(const SparseMultiLayerGraph& graph,
                                                    const std::vector<Triplet>& positives,
                                                    int ratio, Rng& rng) {
    if (ratio < 1) throw std::invalid_argument("negative sampling ratio must be >= 1");
    const int n = graph.node_count();
    if (n <= 1)
        throw DegenerateGraphError("negative sampling requires at least 2 nodes");
    std::vector<LabeledTriplet> negatives;
    negatives.reserve(positives.size() * static_cast<std::size_t>(ratio));
    for (const Triplet& pos : positives) {
        for (int k = 0; k < ratio; ++k) {
            int v;
            do {
                v = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            } while (v == pos.i);
            auto [lo, hi] = canonical_pair(pos.i, v);
            negatives.push_back({lo, hi, pos.m, 0});
        }
    }
    return negatives;
}

/// Order-preserving (or shuffled) partition of a triplet list into batches of
/// `batch_size`; the final batch may be short.
inline std::vector<TripletBatch> iterate_batches(std::vector<LabeledTriplet> triplets,
                                                 std::size_t batch_size, Rng& rng,
                                                 bool shuffle) {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (shuffle) {
        for (std::size_t k = triplets.size(); k > 1; --k) {
            std::size_t pick = static_cast<std::size_t>(rng.uniform_index(k));
            std::swap(triplets[k - 1], triplets[pick]);
        }
    }
    std::vector<TripletBatch> batches;
    for (std::size_t start = 0; start < triplets.size(); start += batch_size) {
        TripletBatch b;
        std::size_t end = std::min(start + batch_size, triplets.size());
        b.entries.assign(triplets.begin() + static_cast<std::ptrdiff_t>(start),
                         triplets.begin() + static_cast<std::ptrdiff_t>(end));
        b.build_groups();
        batches.push_back(std::move(b));
    }
    return batches;
}

}  // namespace tginee
