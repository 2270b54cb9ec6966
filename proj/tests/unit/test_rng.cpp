#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "salnet/matrix.hpp"
#include "salnet/rng.hpp"

using namespace salnet;

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and child streams differ") {
    Rng a(1), b(2);
    CHECK(a.next_u64() != b.next_u64());
    Rng c0 = Rng::child(7, 0), c1 = Rng::child(7, 1), again = Rng::child(7, 0);
    const auto x0 = c0.next_u64();
    CHECK(x0 != c1.next_u64());
    CHECK(x0 == again.next_u64());
    CHECK(Rng::child_seed(7, 0) != Rng::child_seed(8, 0));
}

TEST_CASE("splitmix64 known sequence") {
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xE220A8397B1DCDAFull);
    CHECK(splitmix64(state) == 0x6E789E6AA1B965F4ull);
}

TEST_CASE("uniform stays in range with the right moments") {
    Rng rng(3);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(-0.5, 1.5);
        REQUIRE(u >= -0.5);
        REQUIRE(u < 1.5);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sq / n - mean * mean == doctest::Approx(4.0 / 12.0).epsilon(0.01));
}

TEST_CASE("uniform edge cases") {
    Rng rng(4);
    CHECK(rng.uniform(2.0, 2.0) == 2.0);
    CHECK_THROWS_AS(rng.uniform(1.0, 0.0), std::invalid_argument);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal has zero mean and unit variance") {
    Rng rng(5);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bernoulli frequency and below bounds") {
    Rng rng(6);
    int hits = 0;
    for (int i = 0; i < 100000; ++i) hits += rng.bernoulli(0.3);
    CHECK(hits / 100000.0 == doctest::Approx(0.3).epsilon(0.02));
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("random unit vector has the requested norm") {
    Rng rng(7);
    for (std::size_t dim : {1u, 3u, 100u}) {
        const auto v = random_unit_vector(rng, dim, 0.001);
        CHECK(v.size() == dim);
        CHECK(norm(v) == doctest::Approx(0.001).epsilon(1e-12));
    }
    CHECK_THROWS_AS(random_unit_vector(rng, 0), std::invalid_argument);
    CHECK_THROWS_AS(random_unit_vector(rng, 3, 0.0), std::invalid_argument);
}

TEST_CASE("shuffled indices are a permutation") {
    Rng rng(8);
    auto idx = shuffled_indices(rng, 256);
    CHECK(idx.size() == 256);
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(256);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted == expected);
    CHECK(idx != expected);
}
