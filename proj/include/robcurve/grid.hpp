#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "robcurve/errors.hpp"

namespace robcurve {

using bigint = boost::multiprecision::cpp_int;
using bigrational = boost::multiprecision::cpp_rational;
using float50 = boost::multiprecision::cpp_bin_float_50;

enum class GridScheme { Uniform, Geometric, Explicit };

/// Ordered radii r_1 < ... < r_m spanning [a/lambda, a].
///
/// lambda is the relative width r_m / r_1 (> 1 except for the degenerate
/// single-radius grid, where lambda = 1 and m = 1).
struct RadiusGrid {
    std::vector<double> radii;
    double a = 0.0;
    double lambda = 1.0;
    GridScheme scheme = GridScheme::Explicit;

    std::int64_t size() const { return static_cast<std::int64_t>(radii.size()); }
};

/// Analytic cost profile of a grid for dimension d and per-radius sample size N.
struct ComplexityReport {
    std::int64_t m = 0;
    double engp = 0.0;
    double engp_bound = 0.0;
    double reuse_factor = 0.0;
    std::vector<double> expected_samples;
    double max_gap = 0.0;
};

namespace detail {

/// Largest number of doubles a grid-building or plan-only call may allocate.
inline constexpr std::int64_t kDefaultAllocCap = 100'000'000;

inline void check_range_params(double a, double lambda) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw input_error("radius range: a must be positive and finite");
    if (!(lambda >= 1.0) || !std::isfinite(lambda))
        throw input_error("radius range: lambda must be >= 1 and finite");
}

inline void check_grid_size(double lambda, std::int64_t m, std::int64_t max_alloc) {
    if (lambda > 1.0 && m < 2)
        throw input_error("grid: m >= 2 required when lambda > 1");
    if (lambda == 1.0 && m != 1)
        throw input_error("grid: lambda = 1 only admits the single-radius grid (m = 1)");
    if (m > max_alloc)
        throw cap_exceeded("grid: m = " + std::to_string(m) +
                           " exceeds the allocation cap " + std::to_string(max_alloc));
}

/// Exact rational value of the shortest decimal that round-trips to x.
///
/// Sizing formulas are evaluated on the decimal the caller wrote (e.g. "1e-5"
/// means exactly 10^-5), not on the nearest binary double, so that floor/ceil
/// results at the 10^9 scale are reproducible.
inline bigrational decimal_value(double x) {
    if (!std::isfinite(x)) throw input_error("decimal_value: non-finite input");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    const std::string s(buf, res.ptr);

    bigint mantissa = 0;
    int frac_digits = 0;
    int exp10 = 0;
    bool negative = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        negative = (s[i] == '-');
        ++i;
    }
    bool in_fraction = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.') {
            in_fraction = true;
        } else if (c == 'e' || c == 'E') {
            exp10 = 0;
            int esign = 1;
            ++i;
            if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
                esign = (s[i] == '-') ? -1 : 1;
                ++i;
            }
            for (; i < s.size(); ++i) exp10 = exp10 * 10 + (s[i] - '0');
            exp10 *= esign;
            break;
        } else {
            mantissa = mantissa * 10 + (c - '0');
            if (in_fraction) ++frac_digits;
        }
    }
    if (negative) mantissa = -mantissa;
    const int shift = exp10 - frac_digits;
    bigrational value(mantissa);
    if (shift > 0) value *= bigrational(boost::multiprecision::pow(bigint(10), shift));
    if (shift < 0) value /= bigrational(boost::multiprecision::pow(bigint(10), -shift));
    return value;
}

inline bigint floor_rational(const bigrational& q) {
    bigint quot = boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
    // cpp_int division truncates toward zero; fix up negatives.
    if (q < 0 && bigrational(quot) != q) --quot;
    return quot;
}

inline bigint ceil_rational(const bigrational& q) { return -floor_rational(-q); }

inline void check_tolerance_inputs(double lambda, std::int64_t d, double eps) {
    if (!(lambda > 1.0) || !std::isfinite(lambda))
        throw input_error("sizing: lambda must be > 1 and finite");
    if (d < 1) throw input_error("sizing: d must be >= 1");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw input_error("sizing: eps must lie in (0,1)");
}

/// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace detail

/// Uniform partition of [a/lambda, a]: r_i = a - ((m-i)(lambda-1)/((m-1)lambda)) a.
inline RadiusGrid uniform_grid(double a, double lambda, std::int64_t m,
                               std::int64_t max_alloc = detail::kDefaultAllocCap) {
    detail::check_range_params(a, lambda);
    detail::check_grid_size(lambda, m, max_alloc);
    RadiusGrid grid;
    grid.a = a;
    grid.lambda = lambda;
    grid.scheme = GridScheme::Uniform;
    grid.radii.resize(static_cast<std::size_t>(m));
    if (m == 1) {
        grid.radii[0] = a;
        return grid;
    }
    for (std::int64_t i = 1; i <= m; ++i) {
        grid.radii[static_cast<std::size_t>(i - 1)] =
            a - (static_cast<double>(m - i) * (lambda - 1.0) /
                 (static_cast<double>(m - 1) * lambda)) * a;
    }
    grid.radii.back() = a;
    return grid;
}

/// Geometric partition: r_i = a (1/lambda)^((m-i)/(m-1)); constant ratio lambda^(1/(m-1)).
inline RadiusGrid geometric_grid(double a, double lambda, std::int64_t m,
                                 std::int64_t max_alloc = detail::kDefaultAllocCap) {
    detail::check_range_params(a, lambda);
    detail::check_grid_size(lambda, m, max_alloc);
    RadiusGrid grid;
    grid.a = a;
    grid.lambda = lambda;
    grid.scheme = GridScheme::Geometric;
    grid.radii.resize(static_cast<std::size_t>(m));
    if (m == 1) {
        grid.radii[0] = a;
        return grid;
    }
    for (std::int64_t i = 1; i <= m; ++i) {
        const double t = static_cast<double>(m - i) / static_cast<double>(m - 1);
        grid.radii[static_cast<std::size_t>(i - 1)] = a * std::pow(1.0 / lambda, t);
    }
    grid.radii.back() = a;
    return grid;
}

/// Grid from caller-supplied radii; lambda is derived as r_m / r_1.
inline RadiusGrid explicit_grid(std::vector<double> radii) {
    if (radii.empty()) throw input_error("explicit grid: no radii given");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
            throw input_error("explicit grid: radii must be positive and finite");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw input_error("explicit grid: radii must be strictly increasing");
    }
    RadiusGrid grid;
    grid.a = radii.back();
    grid.lambda = radii.back() / radii.front();
    grid.scheme = GridScheme::Explicit;
    grid.radii = std::move(radii);
    return grid;
}

inline RadiusGrid single_radius_grid(double a) {
    detail::check_range_params(a, 1.0);
    RadiusGrid grid;
    grid.a = a;
    grid.lambda = 1.0;
    grid.scheme = GridScheme::Explicit;
    grid.radii = {a};
    return grid;
}

/// Grid size certifying interpolation error < eps on a uniform partition:
/// m = 2 + floor((lambda-1) d / (2 eps)), evaluated exactly.
inline bigint size_uniform(double lambda, std::int64_t d, double eps) {
    detail::check_tolerance_inputs(lambda, d, eps);
    const bigrational q = (detail::decimal_value(lambda) - 1) * d /
                          (2 * detail::decimal_value(eps));
    return 2 + detail::floor_rational(q);
}

/// Grid size certifying interpolation error < eps on a geometric partition:
/// m = 2 + floor(ln(lambda) / ln(1 + 2 eps / d)), evaluated at 50 decimal digits.
inline bigint size_geometric(double lambda, std::int64_t d, double eps) {
    detail::check_tolerance_inputs(lambda, d, eps);
    const float50 log_lambda = boost::multiprecision::log(
        static_cast<float50>(detail::decimal_value(lambda)));
    const float50 step = boost::multiprecision::log(
        float50(1) + static_cast<float50>(detail::decimal_value(eps) * 2 / d));
    const float50 ratio = log_lambda / step;
    return 2 + static_cast<bigint>(boost::multiprecision::floor(ratio));
}

/// Classical zero-order bound: smallest m >= 1 + 2 (lambda-1) d / eps.
inline bigint size_barmish(double lambda, std::int64_t d, double eps) {
    detail::check_tolerance_inputs(lambda, d, eps);
    const bigrational q = 1 + 2 * (detail::decimal_value(lambda) - 1) * d /
                              detail::decimal_value(eps);
    return detail::ceil_rational(q);
}

/// Equivalent number of grid points of a materialized grid:
/// m - sum_{i<m} (r_i / r_{i+1})^d. Equals 1 for the single-radius grid.
inline double engp(const RadiusGrid& grid, std::int64_t d) {
    if (d < 1) throw input_error("engp: d must be >= 1");
    const std::int64_t m = grid.size();
    if (m <= 1) return 1.0;
    detail::CompensatedSum acc;
    for (std::int64_t i = 0; i + 1 < m; ++i) {
        acc.add(std::pow(grid.radii[static_cast<std::size_t>(i)] /
                             grid.radii[static_cast<std::size_t>(i + 1)],
                         static_cast<double>(d)));
    }
    return static_cast<double>(m) - acc.value();
}

/// ENGP of the uniform scheme evaluated from the closed-form consecutive
/// ratios, without materializing the grid. O(m) time, O(1) memory.
inline double engp_uniform_scheme(double lambda, std::int64_t m, std::int64_t d,
                                  std::int64_t terms_cap = detail::kDefaultAllocCap) {
    detail::check_range_params(1.0, lambda);
    if (m == 1) return 1.0;
    if (m < 2) throw input_error("engp_uniform_scheme: m must be >= 1");
    if (m - 1 > terms_cap)
        throw cap_exceeded("engp_uniform_scheme: m = " + std::to_string(m) +
                           " exceeds the term cap " + std::to_string(terms_cap));
    const double base = static_cast<double>(m - 1) / (lambda - 1.0);
    detail::CompensatedSum acc;
    for (std::int64_t i = 1; i <= m - 1; ++i) {
        acc.add(std::pow(1.0 - 1.0 / (base + static_cast<double>(i)),
                         static_cast<double>(d)));
    }
    return static_cast<double>(m) - acc.value();
}

/// ENGP of the geometric scheme in closed form (all consecutive ratios equal).
inline double engp_geometric_scheme(double lambda, std::int64_t m, std::int64_t d) {
    detail::check_range_params(1.0, lambda);
    if (m == 1) return 1.0;
    if (m < 2) throw input_error("engp_geometric_scheme: m must be >= 1");
    const double ratio_d = std::pow(1.0 / lambda,
                                    static_cast<double>(d) / static_cast<double>(m - 1));
    return static_cast<double>(m) - static_cast<double>(m - 1) * ratio_d;
}

/// Scheme-independent upper bound on the ENGP: 1 + d ln(lambda).
inline double engp_bound(std::int64_t d, double lambda) {
    if (d < 1) throw input_error("engp_bound: d must be >= 1");
    if (!(lambda >= 1.0)) throw input_error("engp_bound: lambda must be >= 1");
    return 1.0 + static_cast<double>(d) * std::log(lambda);
}

/// Diagnostic bound for a random upper radius U independent of the samples it
/// governs: 1 + d ln(E[U]/gamma).
inline double engp_bound_random_upper(std::int64_t d, double gamma, double expected_upper) {
    if (d < 1) throw input_error("engp_bound_random_upper: d must be >= 1");
    if (!(gamma > 0.0)) throw input_error("engp_bound_random_upper: gamma must be > 0");
    if (!(expected_upper >= gamma))
        throw input_error("engp_bound_random_upper: E[U] must be >= gamma");
    return 1.0 + static_cast<double>(d) * std::log(expected_upper / gamma);
}

/// Cost reduction over independent per-radius sampling: m / engp.
inline double reuse_factor(const RadiusGrid& grid, std::int64_t d) {
    return static_cast<double>(grid.size()) / engp(grid, d);
}

/// Expected draws issued at each radius: E[n_j] = (1 - (r_j/r_{j+1})^d) N for
/// j < m and E[n_m] = N. The entries sum to engp * N.
inline std::vector<double> expected_samples_per_radius(
    const RadiusGrid& grid, std::int64_t d, std::int64_t N,
    std::int64_t max_alloc = detail::kDefaultAllocCap) {
    if (d < 1) throw input_error("expected_samples_per_radius: d must be >= 1");
    if (N < 1) throw input_error("expected_samples_per_radius: N must be >= 1");
    const std::int64_t m = grid.size();
    if (m > max_alloc)
        throw cap_exceeded("expected_samples_per_radius: m = " + std::to_string(m) +
                           " exceeds the allocation cap " + std::to_string(max_alloc));
    std::vector<double> expected(static_cast<std::size_t>(m));
    for (std::int64_t j = 0; j + 1 < m; ++j) {
        const double ratio_d = std::pow(grid.radii[static_cast<std::size_t>(j)] /
                                            grid.radii[static_cast<std::size_t>(j + 1)],
                                        static_cast<double>(d));
        expected[static_cast<std::size_t>(j)] = (1.0 - ratio_d) * static_cast<double>(N);
    }
    expected.back() = static_cast<double>(N);
    return expected;
}

/// Largest gap between consecutive radii; 0 for the single-radius grid.
inline double max_gap(const RadiusGrid& grid) {
    double gap = 0.0;
    for (std::size_t i = 0; i + 1 < grid.radii.size(); ++i)
        gap = std::max(gap, grid.radii[i + 1] - grid.radii[i]);
    return gap;
}

inline ComplexityReport complexity_report(const RadiusGrid& grid, std::int64_t d,
                                          std::int64_t N,
                                          std::int64_t max_alloc = detail::kDefaultAllocCap) {
    ComplexityReport report;
    report.m = grid.size();
    report.engp = engp(grid, d);
    report.engp_bound = engp_bound(d, std::max(grid.lambda, 1.0));
    report.reuse_factor = static_cast<double>(report.m) / report.engp;
    report.expected_samples = expected_samples_per_radius(grid, d, N, max_alloc);
    report.max_gap = max_gap(grid);
    return report;
}

} // namespace robcurve
