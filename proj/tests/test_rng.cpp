#include <doctest.h>

#include <cmath>
#include <vector>

#include "tginee/rng.hpp"

using namespace tginee;

TEST_CASE("rng: same seed gives identical sequences") {
    Rng a(123), b(123);
    for (int k = 0; k < 1000; ++k) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int k = 0; k < 100; ++k)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("rng: named substreams are deterministic and distinct") {
    Rng root(42);
    Rng s1 = root.substream("init");
    Rng s2 = root.substream("init");
    Rng s3 = root.substream("sampling");
    CHECK(s1.next_u64() == s2.next_u64());
    Rng s4 = root.substream("init");
    CHECK(s4.next_u64() != s3.next_u64());
}

TEST_CASE("rng: substreaming does not advance the parent") {
    Rng a(7), b(7);
    (void)a.substream("x");
    (void)a.substream(99);
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: uniform lies in [0,1) and has the right mean") {
    Rng r(11);
    double sum = 0.0;
    const int N = 100000;
    for (int k = 0; k < N; ++k) {
        double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // sd of the mean is 1/sqrt(12 N) ~ 9.1e-4; allow 5 sigma
    CHECK(std::abs(sum / N - 0.5) < 5.0 / std::sqrt(12.0 * N));
}

TEST_CASE("rng: uniform draws fill bins evenly (chi-square sanity)") {
    Rng r(13);
    const int bins = 20, N = 100000;
    std::vector<int> count(bins, 0);
    for (int k = 0; k < N; ++k) ++count[static_cast<int>(r.uniform() * bins)];
    double expected = static_cast<double>(N) / bins;
    double chi2 = 0.0;
    for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
    // chi-square with 19 dof: mean 19, sd ~6.2; 60 is far beyond 5 sigma
    CHECK(chi2 < 60.0);
}

TEST_CASE("rng: uniform_index respects the bound and is unbiased") {
    Rng r(17);
    const std::uint64_t bound = 7;
    std::vector<int> count(bound, 0);
    const int N = 70000;
    for (int k = 0; k < N; ++k) {
        std::uint64_t v = r.uniform_index(bound);
        REQUIRE(v < bound);
        ++count[v];
    }
    double expected = static_cast<double>(N) / bound;
    for (int c : count) CHECK(std::abs(c - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("rng: gauss has zero mean, unit variance, small skew") {
    Rng r(19);
    const int N = 200000;
    double s1 = 0, s2 = 0, s3 = 0;
    for (int k = 0; k < N; ++k) {
        double g = r.gauss();
        s1 += g;
        s2 += g * g;
        s3 += g * g * g;
    }
    CHECK(std::abs(s1 / N) < 0.02);
    CHECK(std::abs(s2 / N - 1.0) < 0.03);
    CHECK(std::abs(s3 / N) < 0.1);
}

TEST_CASE("hash_name: stable and collision-free on distinct short names") {
    CHECK(hash_name("init") == hash_name("init"));
    CHECK(hash_name("init") != hash_name("sampling"));
    CHECK(hash_name("") != hash_name("a"));
}
