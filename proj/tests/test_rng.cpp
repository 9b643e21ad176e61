#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "robcurve/rng.hpp"
#include "test_util.hpp"

using robcurve::PhiloxStream;

TEST_CASE("identical seed and substream reproduce the identical sequence", "[rng]") {
    PhiloxStream a(1234, 7);
    PhiloxStream b(1234, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams split off one seed are distinct", "[rng]") {
    PhiloxStream a(99, 0);
    PhiloxStream b(99, 1);
    int equal = 0;
    for (int i = 0; i < 256; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    REQUIRE(equal == 0);
}

TEST_CASE("unit draws stay inside the open interval and look uniform", "[rng]") {
    PhiloxStream rng(2024);
    const std::size_t n = 100000;
    std::vector<double> u(n);
    for (double& v : u) {
        v = rng.next_unit();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
    const double d = testutil::ks_uniform_statistic(u);
    REQUIRE(d < testutil::ks_critical(n, 1e-3));
}

TEST_CASE("normal draws have matching first moments", "[rng]") {
    PhiloxStream rng(5);
    const std::size_t n = 200000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        mean += z;
        m2 += z * z;
    }
    mean /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    REQUIRE(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    REQUIRE(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("exponential draws have unit mean", "[rng]") {
    PhiloxStream rng(6);
    const std::size_t n = 200000;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += rng.next_exponential();
    mean /= static_cast<double>(n);
    REQUIRE(std::abs(mean - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}
