#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tginee/eval.hpp"
#include "tginee/jacobian.hpp"
#include "tginee/synth.hpp"

using namespace tginee;

TEST_CASE("generate: full shared structure makes the layer probabilities equal") {
    SynthSpec spec;
    spec.n = 20;
    spec.M = 3;
    spec.rho = 1.0;
    spec.seed = 1;
    SynthResult res = generate(spec);
    for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j)
            for (int m = 1; m < spec.M; ++m)
                CHECK(res.truth(i, j, m) == doctest::Approx(res.truth(i, j, 0)));
}

TEST_CASE("generate: independent layers give density near one half") {
    SynthSpec spec;
    spec.n = 100;
    spec.M = 3;
    spec.rho = 0.0;
    spec.seed = 2;
    SynthResult res = generate(spec);
    double cells = static_cast<double>(spec.n) * (spec.n - 1) / 2 * spec.M;
    double density = static_cast<double>(res.graph.total_edges()) / cells;
    CHECK(std::abs(density - 0.5) < 0.02);
}

TEST_CASE("generate: deterministic per seed, no diagonal edges") {
    SynthSpec spec;
    spec.n = 30;
    spec.M = 2;
    spec.rho = 0.2;
    spec.seed = 7;
    SynthResult a = generate(spec);
    SynthResult b = generate(spec);
    CHECK(a.graph.total_edges() == b.graph.total_edges());
    for (const Triplet& t : a.graph.triplets()) {
        CHECK(b.graph.has_edge(t.i, t.j, t.m));
        CHECK(t.i != t.j);
    }
}

TEST_CASE("generate: empirical density tracks the mean of the truth table") {
    SynthSpec spec;
    spec.n = 80;
    spec.M = 3;
    spec.rho = 0.4;
    spec.seed = 11;
    SynthResult res = generate(spec);
    double pairs = static_cast<double>(spec.n) * (spec.n - 1) / 2;
    for (int m = 0; m < spec.M; ++m) {
        double mean_p = 0.0;
        for (int i = 0; i < spec.n; ++i)
            for (int j = i + 1; j < spec.n; ++j) mean_p += res.truth(i, j, m);
        mean_p /= pairs;
        double density = static_cast<double>(res.graph.edge_count(m)) / pairs;
        // 3 sigma binomial tolerance
        double sigma = std::sqrt(mean_p * (1.0 - mean_p) / pairs);
        CHECK(std::abs(density - mean_p) < 3.0 * sigma + 0.01);
    }
}

TEST_CASE("generate: block base respects community probabilities") {
    SynthSpec spec;
    spec.n = 60;
    spec.M = 1;
    spec.rho = 1.0;  // truth equals the block base exactly
    spec.base_kind = BaseKind::block;
    spec.block_sizes = {30, 30};
    spec.within_prob = 0.7;
    spec.between_prob = 0.1;
    spec.seed = 3;
    SynthResult res = generate(spec);
    CHECK(res.truth(0, 1, 0) == doctest::Approx(0.7));
    CHECK(res.truth(0, 31, 0) == doctest::Approx(0.1));
    CHECK(res.truth(31, 59, 0) == doctest::Approx(0.7));
}

TEST_CASE("generate: invalid specs rejected") {
    SynthSpec bad;
    bad.n = 1;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
    SynthSpec rho_bad;
    rho_bad.rho = 1.5;
    CHECK_THROWS_AS(generate(rho_bad), std::invalid_argument);
    SynthSpec blocks;
    blocks.base_kind = BaseKind::block;
    blocks.block_sizes = {10, 10};  // n stays 100
    CHECK_THROWS_AS(generate(blocks), std::invalid_argument);
}

TEST_CASE("generate_heterogeneous: planted similarity mirrors the weights") {
    SynthSpec spec;
    spec.n = 20;
    spec.M = 3;
    spec.rho = 0.1;
    spec.seed = 4;
    Matrix lr = Matrix::Zero(3, 3);
    lr(0, 1) = lr(1, 0) = 0.2;
    lr(0, 2) = lr(2, 0) = 0.2;
    lr(1, 2) = lr(2, 1) = 0.2;
    spec.layer_rho = lr;
    SynthResult res = generate_heterogeneous(spec);
    CHECK(res.planted_similarity(0, 1) == doctest::Approx(0.2));
    CHECK(res.planted_similarity(0, 2) == doctest::Approx(res.planted_similarity(1, 2)));
}

TEST_CASE("generate_heterogeneous: stronger weight raises empirical layer overlap") {
    int ordered = 0;
    const int trials = 20;
    for (std::uint64_t s = 1; s <= trials; ++s) {
        SynthSpec spec;
        spec.n = 100;
        spec.M = 3;
        spec.rho = 0.1;
        spec.seed = s;
        Matrix lr = Matrix::Zero(3, 3);
        lr(0, 2) = lr(2, 0) = 0.5;
        lr(0, 1) = lr(1, 0) = 0.05;
        lr(1, 2) = lr(2, 1) = 0.05;
        spec.layer_rho = lr;
        SynthResult res = generate_heterogeneous(spec);
        if (layer_jaccard(res.graph, 0, 2) > layer_jaccard(res.graph, 0, 1)) ++ordered;
    }
    CHECK(ordered >= 18);  // >= 90% of seeded runs
}

TEST_CASE("generate_heterogeneous: two layers fully sharing one component coincide") {
    SynthSpec spec;
    spec.n = 15;
    spec.M = 2;
    spec.rho = 0.0;
    spec.seed = 5;
    Matrix lr = Matrix::Zero(2, 2);
    lr(0, 1) = lr(1, 0) = 1.0;
    spec.layer_rho = lr;
    SynthResult res = generate_heterogeneous(spec);
    for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j)
            CHECK(res.truth(i, j, 0) == doctest::Approx(res.truth(i, j, 1)));
}

TEST_CASE("generate_heterogeneous: weight validation") {
    SynthSpec spec;
    spec.n = 10;
    spec.M = 2;
    spec.rho = 0.8;
    Matrix lr = Matrix::Zero(2, 2);
    lr(0, 1) = lr(1, 0) = 0.5;  // rho + weight > 1
    spec.layer_rho = lr;
    CHECK_THROWS_AS(generate_heterogeneous(spec), std::invalid_argument);
    SynthSpec missing;
    CHECK_THROWS_AS(generate_heterogeneous(missing), std::invalid_argument);
    SynthSpec asym;
    asym.n = 10;
    asym.M = 2;
    asym.rho = 0.1;
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 0.2;
    bad(1, 0) = 0.3;
    asym.layer_rho = bad;
    CHECK_THROWS_AS(generate_heterogeneous(asym), std::invalid_argument);
}

TEST_CASE("perturb: zero ratio returns the graph unchanged") {
    SynthSpec spec;
    spec.n = 40;
    spec.M = 2;
    spec.seed = 6;
    SynthResult res = generate(spec);
    Rng rng(1);
    PerturbResult out = perturb(res.graph, 0.0, rng);
    CHECK(out.graph.total_edges() == res.graph.total_edges());
    for (const Triplet& t : res.graph.triplets()) CHECK(out.graph.has_edge(t.i, t.j, t.m));
    for (int s : out.shortfall) CHECK(s == 0);
}

TEST_CASE("perturb: edit counts balance deletions and additions per layer") {
    SynthSpec spec;
    spec.n = 60;
    spec.M = 2;
    spec.rho = 0.2;
    spec.seed = 8;
    SynthResult res = generate(spec);
    Rng rng(2);
    const double ratio = 1.0;
    PerturbResult out = perturb(res.graph, ratio, rng);
    for (int m = 0; m < spec.M; ++m) {
        long long E = static_cast<long long>(res.graph.edge_count(m));
        long long edits = std::llround(ratio * static_cast<double>(E) / 2.0);
        // density preserved up to the recorded shortfall
        long long diff = static_cast<long long>(out.graph.edge_count(m)) - E;
        CHECK(std::llabs(diff) <= out.shortfall[static_cast<std::size_t>(m)]);
        // edits actually happened: originals left and new edges appeared
        long long removed = 0;
        for (const Triplet& t : res.graph.triplets())
            if (t.m == m && !out.graph.has_edge(t.i, t.j, t.m)) ++removed;
        long long added = 0;
        for (const Triplet& t : out.graph.triplets())
            if (t.m == m && !res.graph.has_edge(t.i, t.j, t.m)) ++added;
        // an added edge may re-fill a deleted slot, so removed can undershoot
        CHECK(removed <= edits);
        CHECK(added <= edits);
        CHECK(removed + added >= edits);
    }
}

TEST_CASE("perturb: deterministic per seed, invalid ratio rejected") {
    SynthSpec spec;
    spec.n = 30;
    spec.M = 1;
    spec.seed = 9;
    SynthResult res = generate(spec);
    Rng a(3), b(3);
    PerturbResult pa = perturb(res.graph, 0.3, a);
    PerturbResult pb = perturb(res.graph, 0.3, b);
    CHECK(pa.graph.total_edges() == pb.graph.total_edges());
    for (const Triplet& t : pa.graph.triplets()) CHECK(pb.graph.has_edge(t.i, t.j, t.m));
    Rng c(4);
    CHECK_THROWS_AS(perturb(res.graph, 1.5, c), std::invalid_argument);
}

TEST_CASE("plant_cp_model: deterministic, interior probabilities, matching density") {
    auto [f, g] = plant_cp_model(100, 2, 4, LinkFunction::logit(), 17);
    auto [f2, g2] = plant_cp_model(100, 2, 4, LinkFunction::logit(), 17);
    CHECK((f.alpha - f2.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.total_edges() == g2.total_edges());

    double mean_p = 0.0;
    double cells = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int j = i + 1; j < 100; ++j) {
            Vector p = pair_probability(f, LinkFunction::logit(), i, j);
            mean_p += p.sum();
            cells += static_cast<double>(p.size());
        }
    mean_p /= cells;
    double density = static_cast<double>(g.total_edges()) / cells;
    CHECK(std::abs(density - mean_p) < 0.02);
    // factor scale spreads probabilities: both classes well represented
    CHECK(density > 0.1);
    CHECK(density < 0.9);
}

TEST_CASE("truth sidecar file: header and one row per off-diagonal pair") {
    TruthTable t(4, 2);
    t.set(0, 1, 0, 0.25);
    t.set(2, 3, 1, 0.75);
    const std::string path = "truth_test_tmp.tsv";
    write_truth_file(path, t);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "#tginee-truth n=4 M=2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);  // 4 choose 2
    in.close();
    std::remove(path.c_str());
}
