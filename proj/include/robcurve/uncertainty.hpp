#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "robcurve/errors.hpp"
#include "robcurve/grid.hpp"
#include "robcurve/rng.hpp"

namespace robcurve {

enum class NormFamily { WeightedLinf, WeightedL2, WeightedL1 };

/// Centered homogeneous star-shaped bounding-set family B_r.
///
/// Membership is through the gauge (Minkowski functional) of the weighted
/// norm: X is in B_r iff gauge(X) <= r (closed balls). The unit-weight Linf
/// set around a nominal point is the classical parameter box; weights let
/// heterogeneous parameter scales share one radius axis.
struct UncertaintySet {
    std::vector<double> center;
    NormFamily shape = NormFamily::WeightedLinf;
    std::vector<double> weights;

    UncertaintySet(std::vector<double> center_, NormFamily shape_,
                   std::vector<double> weights_)
        : center(std::move(center_)), shape(shape_), weights(std::move(weights_)) {
        if (center.empty()) throw input_error("UncertaintySet: d must be >= 1");
        if (weights.size() != center.size())
            throw input_error("UncertaintySet: weights length must equal d");
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w))
                throw input_error("UncertaintySet: weights must be positive and finite");
        }
        for (double c : center) {
            if (!std::isfinite(c))
                throw input_error("UncertaintySet: center must be finite");
        }
    }

    std::int64_t dimension() const { return static_cast<std::int64_t>(center.size()); }

    /// Unit-weight box |x_i - c_i| <= r.
    static UncertaintySet box(std::vector<double> center_) {
        std::vector<double> weights_(center_.size(), 1.0);
        return UncertaintySet(std::move(center_), NormFamily::WeightedLinf,
                              std::move(weights_));
    }
};

/// Minkowski-functional radius of X: the r with X on the boundary of B_r.
inline double gauge(const UncertaintySet& set, std::span<const double> x) {
    if (static_cast<std::int64_t>(x.size()) != set.dimension())
        throw input_error("gauge: point dimension mismatch");
    const std::size_t d = x.size();
    switch (set.shape) {
    case NormFamily::WeightedLinf: {
        double g = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            g = std::max(g, set.weights[i] * std::abs(x[i] - set.center[i]));
        return g;
    }
    case NormFamily::WeightedL2: {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double t = set.weights[i] * (x[i] - set.center[i]);
            s += t * t;
        }
        return std::sqrt(s);
    }
    case NormFamily::WeightedL1: {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            s += set.weights[i] * std::abs(x[i] - set.center[i]);
        return s;
    }
    }
    throw internal_error("gauge: unknown norm family");
}

/// Closed-ball membership: gauge(X) <= r.
inline bool contains(const UncertaintySet& set, double r, std::span<const double> x) {
    if (!(r > 0.0)) throw input_error("contains: r must be > 0");
    return gauge(set, x) <= r;
}

/// Draw X uniformly (Lebesgue) over B_r.
///
/// Consumption per draw, in order:
///   Linf: d symmetric uniforms.
///   L2:   1 radial uniform, then d normals (two uniforms each).
///   L1:   1 radial uniform, then d exponentials, then d sign bits.
/// The radial factor r u^(1/d) together with a boundary-uniform direction
/// makes (gauge/r)^d uniform on (0,1), which is what uniformity over a
/// homogeneous star-shaped set means in the radial decomposition.
inline std::vector<double> sample_uniform(const UncertaintySet& set, double r,
                                          PhiloxStream& rng) {
    if (!(r > 0.0) || !std::isfinite(r)) throw input_error("sample_uniform: r must be > 0");
    const std::size_t d = static_cast<std::size_t>(set.dimension());
    std::vector<double> x(d);
    switch (set.shape) {
    case NormFamily::WeightedLinf: {
        for (std::size_t i = 0; i < d; ++i)
            x[i] = set.center[i] + r * rng.next_symmetric() / set.weights[i];
        break;
    }
    case NormFamily::WeightedL2: {
        const double radial =
            r * std::pow(rng.next_unit(), 1.0 / static_cast<double>(d));
        double norm2 = 0.0;
        std::vector<double> z(d);
        for (std::size_t i = 0; i < d; ++i) {
            z[i] = rng.next_normal();
            norm2 += z[i] * z[i];
        }
        const double norm = std::sqrt(norm2);
        if (!(norm > 0.0)) throw internal_error("sample_uniform: degenerate direction");
        for (std::size_t i = 0; i < d; ++i)
            x[i] = set.center[i] + radial * z[i] / (norm * set.weights[i]);
        break;
    }
    case NormFamily::WeightedL1: {
        const double radial =
            r * std::pow(rng.next_unit(), 1.0 / static_cast<double>(d));
        std::vector<double> e(d);
        double total = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            e[i] = rng.next_exponential();
            total += e[i];
        }
        if (!(total > 0.0)) throw internal_error("sample_uniform: degenerate simplex point");
        for (std::size_t i = 0; i < d; ++i) {
            const double sign = rng.next_sign_bit() ? 1.0 : -1.0;
            x[i] = set.center[i] + sign * radial * (e[i] / total) / set.weights[i];
        }
        break;
    }
    }
    for (double v : x) {
        if (!std::isfinite(v))
            throw internal_error("sample_uniform: non-finite draw; aborting the run");
    }
    return x;
}

/// Smallest grid index j* with r_{j*} >= gauge_value, so the sample lies in
/// B_{r_i} exactly for i >= j*. Returns nullopt when the gauge exceeds r_m.
///
/// Uniform and geometric schemes start from the closed-form inverse; the
/// candidate is then repaired by closed-membership comparisons against the
/// stored radii, so the result always agrees with a linear scan.
inline std::optional<std::int64_t> radius_index(const RadiusGrid& grid,
                                                double gauge_value) {
    if (grid.radii.empty()) throw input_error("radius_index: empty grid");
    if (!(gauge_value >= 0.0))
        throw input_error("radius_index: gauge value must be nonnegative");
    const auto& r = grid.radii;
    const std::int64_t m = grid.size();
    if (gauge_value > r.back()) return std::nullopt;
    if (gauge_value <= r.front()) return 1;

    std::int64_t candidate = 1;
    switch (grid.scheme) {
    case GridScheme::Uniform: {
        const double est = 1.0 + static_cast<double>(m - 1) *
                                     (gauge_value * grid.lambda / grid.a - 1.0) /
                                     (grid.lambda - 1.0);
        candidate = static_cast<std::int64_t>(std::ceil(est));
        break;
    }
    case GridScheme::Geometric: {
        const double est = static_cast<double>(m) +
                           static_cast<double>(m - 1) *
                               std::log(gauge_value / grid.a) / std::log(grid.lambda);
        candidate = static_cast<std::int64_t>(std::ceil(est));
        break;
    }
    case GridScheme::Explicit: {
        const auto it = std::lower_bound(r.begin(), r.end(), gauge_value);
        candidate = static_cast<std::int64_t>(it - r.begin()) + 1;
        break;
    }
    }
    candidate = std::clamp<std::int64_t>(candidate, 1, m);
    while (candidate > 1 && r[static_cast<std::size_t>(candidate - 2)] >= gauge_value)
        --candidate;
    while (r[static_cast<std::size_t>(candidate - 1)] < gauge_value)
        ++candidate;
    return candidate;
}

} // namespace robcurve
