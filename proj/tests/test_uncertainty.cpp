#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "robcurve/uncertainty.hpp"
#include "test_util.hpp"

using namespace robcurve;
using Catch::Approx;

namespace {

UncertaintySet make_set(NormFamily shape, std::size_t d) {
    return UncertaintySet(std::vector<double>(d, 0.0), shape,
                          std::vector<double>(d, 1.0));
}

} // namespace

TEST_CASE("gauge evaluates the weighted norms", "[uncertainty]") {
    const UncertaintySet linf = make_set(NormFamily::WeightedLinf, 2);
    REQUIRE(gauge(linf, std::array{0.5, -0.3}) == Approx(0.5));

    const UncertaintySet l2 = make_set(NormFamily::WeightedL2, 2);
    REQUIRE(gauge(l2, std::array{3.0, 4.0}) == Approx(5.0));

    // The two-parameter box around the nominal plant point.
    const UncertaintySet box = UncertaintySet::box({50.0, -10.0});
    REQUIRE(gauge(box, std::array{55.0, -12.0}) == Approx(5.0));

    const UncertaintySet weighted({1.0, 2.0}, NormFamily::WeightedL1, {2.0, 0.5});
    REQUIRE(gauge(weighted, std::array{2.0, 0.0}) == Approx(2.0 * 1.0 + 0.5 * 2.0));

    REQUIRE(gauge(box, std::array{50.0, -10.0}) == 0.0);
    REQUIRE_THROWS_AS(gauge(box, std::array{1.0, 2.0, 3.0}), input_error);
}

TEST_CASE("contains is closed-ball membership", "[uncertainty]") {
    const UncertaintySet l2 = make_set(NormFamily::WeightedL2, 2);
    REQUIRE(contains(l2, 5.0, std::array{3.0, 4.0}));        // boundary included
    REQUIRE_FALSE(contains(l2, 4.999, std::array{3.0, 4.0}));
    REQUIRE(contains(l2, 1e-12, std::array{0.0, 0.0}));       // center in every ball
    REQUIRE_THROWS_AS(contains(l2, 0.0, std::array{0.0, 0.0}), input_error);
}

TEST_CASE("gauge is positively homogeneous about the center", "[uncertainty]") {
    PhiloxStream rng(11);
    const std::vector<NormFamily> shapes{NormFamily::WeightedLinf, NormFamily::WeightedL2,
                                         NormFamily::WeightedL1};
    for (NormFamily shape : shapes) {
        UncertaintySet set({0.7, -1.3, 2.0}, shape, {1.0, 2.5, 0.25});
        for (int k = 0; k < 2000; ++k) {
            std::vector<double> x = sample_uniform(set, 3.0, rng);
            const double g = gauge(set, x);
            const double c = 2.0 * rng.next_unit();
            std::vector<double> scaled(3);
            for (std::size_t i = 0; i < 3; ++i)
                scaled[i] = set.center[i] + c * (x[i] - set.center[i]);
            REQUIRE(std::abs(gauge(set, scaled) - c * g) <= 1e-12 * (1.0 + c * g));
        }
    }
}

TEST_CASE("nestedness: membership at a radius implies membership at larger radii",
          "[uncertainty]") {
    PhiloxStream rng(12);
    const UncertaintySet set({0.0, 0.0}, NormFamily::WeightedL1, {1.0, 3.0});
    for (int k = 0; k < 500; ++k) {
        const std::vector<double> x = sample_uniform(set, 2.0, rng);
        const double rho = 0.1 + 1.9 * rng.next_unit();
        if (contains(set, rho, x)) {
            for (double scale : {1.0, 1.5, 4.0})
                REQUIRE(contains(set, rho * scale, x));
        }
    }
}

TEST_CASE("sampling law: the d-th power of the relative gauge is uniform",
          "[uncertainty]") {
    const std::size_t n = 100000;
    const double crit = testutil::ks_critical(n, 1e-3);
    std::uint64_t substream = 0;
    for (NormFamily shape : {NormFamily::WeightedLinf, NormFamily::WeightedL2,
                             NormFamily::WeightedL1}) {
        for (std::size_t d : {1u, 2u, 3u, 5u}) {
            UncertaintySet set(std::vector<double>(d, 0.5),
                               shape, std::vector<double>(d, 2.0));
            PhiloxStream rng(314159, substream++);
            std::vector<double> stat(n);
            const double r = 1.7;
            for (std::size_t k = 0; k < n; ++k) {
                const std::vector<double> x = sample_uniform(set, r, rng);
                const double g = gauge(set, x);
                REQUIRE(g <= r * (1.0 + 1e-12));
                stat[k] = std::pow(g / r, static_cast<double>(d));
            }
            INFO("shape " << static_cast<int>(shape) << " d " << d);
            REQUIRE(testutil::ks_uniform_statistic(stat) < crit);
        }
    }
}

TEST_CASE("one-dimensional box sampling has the uniform moments", "[uncertainty]") {
    const UncertaintySet set({0.0}, NormFamily::WeightedLinf, {1.0});
    PhiloxStream rng(21);
    const std::size_t n = 100000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = sample_uniform(set, 1.0, rng)[0];
        mean += x;
        m2 += x * x;
    }
    mean /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    const double sd_mean = std::sqrt(1.0 / 3.0 / static_cast<double>(n));
    REQUIRE(std::abs(mean) < 4.0 * sd_mean);
    const double sd_m2 = std::sqrt((0.2 - 1.0 / 9.0) / static_cast<double>(n));
    REQUIRE(std::abs(m2 - 1.0 / 3.0) < 4.0 * sd_m2);
}

TEST_CASE("mean gauge of the planar disc matches the radial-density integral",
          "[uncertainty]") {
    // Oracle 1: Simpson quadrature of rho * (2 rho) on (0,1).
    const int panels = 1 << 12;
    double integral = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = static_cast<double>(k) / panels;
        const double b = static_cast<double>(k + 1) / panels;
        const double mid = 0.5 * (a + b);
        const auto f = [](double rho) { return rho * 2.0 * rho; };
        integral += (b - a) / 6.0 * (f(a) + 4.0 * f(mid) + f(b));
    }
    REQUIRE(integral == Approx(2.0 / 3.0).epsilon(1e-10));

    // Oracle 2: rejection sampling from the bounding square.
    PhiloxStream rej(22);
    double rej_sum = 0.0;
    std::size_t accepted = 0;
    while (accepted < 100000) {
        const double x = rej.next_symmetric();
        const double y = rej.next_symmetric();
        const double g = std::sqrt(x * x + y * y);
        if (g <= 1.0) {
            rej_sum += g;
            ++accepted;
        }
    }
    const double rej_mean = rej_sum / static_cast<double>(accepted);

    // Sampler under test.
    const UncertaintySet disc = make_set(NormFamily::WeightedL2, 2);
    PhiloxStream rng(23);
    const std::size_t n = 100000;
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        mean += gauge(disc, sample_uniform(disc, 1.0, rng));
    mean /= static_cast<double>(n);

    const double se = std::sqrt(1.0 / 18.0 / static_cast<double>(n));
    REQUIRE(std::abs(mean - integral) < 4.0 * se);
    REQUIRE(std::abs(mean - rej_mean) < 6.0 * se);
}

TEST_CASE("radius_index localizes exactly like a linear scan", "[uncertainty]") {
    PhiloxStream rng(31);
    for (int trial = 0; trial < 10000; ++trial) {
        const double a = 0.5 + 10.0 * rng.next_unit();
        const double lambda = 1.2 + 8.0 * rng.next_unit();
        const std::int64_t m = 2 + static_cast<std::int64_t>(rng.next_unit() * 40.0);
        RadiusGrid grid;
        const int pick = static_cast<int>(rng.next_unit() * 3.0);
        if (pick == 0)
            grid = uniform_grid(a, lambda, m);
        else if (pick == 1)
            grid = geometric_grid(a, lambda, m);
        else {
            std::vector<double> radii(static_cast<std::size_t>(m));
            double acc = a / lambda;
            for (auto& r : radii) {
                r = acc;
                acc += (0.01 + rng.next_unit()) * a / static_cast<double>(m);
            }
            grid = explicit_grid(radii);
        }
        double g;
        const double u = rng.next_unit();
        if (u < 0.2) {
            // exact boundary hit
            const std::size_t k =
                static_cast<std::size_t>(rng.next_unit() * static_cast<double>(m));
            g = grid.radii[std::min(k, grid.radii.size() - 1)];
        } else if (u < 0.3) {
            g = 0.0;
        } else {
            g = rng.next_unit() * grid.radii.back() * 1.05;
        }
        const std::optional<std::int64_t> fast = radius_index(grid, g);
        std::optional<std::int64_t> scan;
        for (std::int64_t i = 1; i <= m; ++i) {
            if (grid.radii[static_cast<std::size_t>(i - 1)] >= g) {
                scan = i;
                break;
            }
        }
        REQUIRE(fast == scan);
    }
}

TEST_CASE("radius_index boundary cases", "[uncertainty]") {
    const RadiusGrid grid = geometric_grid(1.0, 4.0, 3); // 0.25, 0.5, 1.0
    REQUIRE(radius_index(grid, 0.0) == 1);
    REQUIRE(radius_index(grid, 0.5) == 2);  // boundary belongs to the ball
    REQUIRE(radius_index(grid, 0.3) == 2);
    REQUIRE(radius_index(grid, 1.0) == 3);
    REQUIRE_FALSE(radius_index(grid, 1.0000001).has_value());
    REQUIRE_THROWS_AS(radius_index(grid, -1.0), input_error);
}

TEST_CASE("set construction validates the fields", "[uncertainty]") {
    REQUIRE_THROWS_AS(UncertaintySet({}, NormFamily::WeightedL2, {}), input_error);
    REQUIRE_THROWS_AS(UncertaintySet({0.0}, NormFamily::WeightedL2, {0.0}), input_error);
    REQUIRE_THROWS_AS(UncertaintySet({0.0}, NormFamily::WeightedL2, {1.0, 2.0}),
                      input_error);
    PhiloxStream rng(1);
    const UncertaintySet set = UncertaintySet::box({0.0});
    REQUIRE_THROWS_AS(sample_uniform(set, -1.0, rng), input_error);
}
