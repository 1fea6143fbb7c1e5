#include <doctest.h>

#include <stdexcept>

#include "tginee/factors.hpp"
#include "tginee/rng.hpp"

using namespace tginee;

namespace {

FactorPair random_factors(int n, int M, int R, std::uint64_t seed) {
    Rng rng(seed);
    FactorPair f;
    f.alpha.resize(n, R);
    f.beta.resize(M, R);
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < R; ++r) f.alpha(i, r) = rng.gauss();
    for (int m = 0; m < M; ++m)
        for (int r = 0; r < R; ++r) f.beta(m, r) = rng.gauss();
    return f;
}

}  // namespace

TEST_CASE("theta_entry: rank-one product and symmetry") {
    FactorPair f;
    f.alpha = Matrix(2, 1);
    f.alpha << 1.0, 2.0;
    f.beta = Matrix(1, 1);
    f.beta << 3.0;
    CHECK(theta_entry(f, 0, 1, 0) == doctest::Approx(6.0));
    CHECK(theta_entry(f, 1, 0, 0) == theta_entry(f, 0, 1, 0));
}

TEST_CASE("theta_entry: zero node factors give zero everywhere") {
    FactorPair f;
    f.alpha = Matrix::Zero(3, 2);
    f.beta = Matrix::Random(2, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 2; ++m) CHECK(theta_entry(f, i, j, m) == 0.0);
}

TEST_CASE("theta_fiber: rank-one two-layer example and diagonal fiber") {
    FactorPair f;
    f.alpha = Matrix(2, 1);
    f.alpha << 1.0, 2.0;
    f.beta = Matrix(2, 1);
    f.beta << 3.0, -1.0;
    Vector fiber = theta_fiber(f, 0, 1);
    CHECK(fiber(0) == doctest::Approx(6.0));
    CHECK(fiber(1) == doctest::Approx(-2.0));

    FactorPair g;
    g.alpha = Matrix(1, 1);
    g.alpha << 1.0;
    g.beta = Matrix(1, 1);
    g.beta << 3.0;
    CHECK(theta_fiber(g, 0, 0)(0) == doctest::Approx(3.0));
}

TEST_CASE("theta_fiber matches an exhaustive theta_entry loop") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        FactorPair f = random_factors(6, 4, 3, seed);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                Vector fiber = theta_fiber(f, i, j);
                for (int m = 0; m < 4; ++m)
                    CHECK(fiber(m) == doctest::Approx(theta_entry(f, i, j, m)).epsilon(1e-12));
            }
    }
}

TEST_CASE("theta symmetry is exact (identical arithmetic path)") {
    FactorPair f = random_factors(5, 3, 2, 77);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int m = 0; m < 3; ++m)
                CHECK(theta_entry(f, i, j, m) == theta_entry(f, j, i, m));
}

TEST_CASE("theta: index range errors") {
    FactorPair f = random_factors(3, 2, 1, 5);
    CHECK_THROWS_AS(theta_entry(f, 0, 3, 0), std::out_of_range);
    CHECK_THROWS_AS(theta_entry(f, 0, 1, 2), std::out_of_range);
    CHECK_THROWS_AS(theta_fiber(f, -1, 0), std::out_of_range);
}

TEST_CASE("flatten/unflatten round trip is exact") {
    FactorPair f = random_factors(7, 3, 4, 99);
    Vector v = f.flatten();
    CHECK(v.size() == (7 + 3) * 4);
    FactorPair g = FactorPair::unflatten(v, 7, 3, 4);
    CHECK((f.alpha - g.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK((f.beta - g.beta).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(FactorPair::unflatten(v, 7, 3, 3), std::invalid_argument);
}

TEST_CASE("flattened layout: column-major alpha block then column-major beta block") {
    FactorPair f = random_factors(4, 2, 3, 123);
    Vector v = f.flatten();
    for (int i = 0; i < 4; ++i)
        for (int r = 0; r < 3; ++r) CHECK(v(f.alpha_index(i, r)) == f.alpha(i, r));
    for (int m = 0; m < 2; ++m)
        for (int r = 0; r < 3; ++r) CHECK(v(f.beta_index(m, r)) == f.beta(m, r));
    CHECK(f.alpha_index(0, 0) == 0);
    CHECK(f.alpha_index(1, 0) == 1);
    CHECK(f.alpha_index(0, 1) == 4);
    CHECK(f.beta_index(0, 0) == 12);
    CHECK(f.beta_index(1, 2) == 12 + 2 * 2 + 1);
}

TEST_CASE("factor pair: mismatched ranks rejected") {
    CHECK_THROWS_AS(FactorPair(Matrix::Zero(3, 2), Matrix::Zero(2, 3)),
                    std::invalid_argument);
}
