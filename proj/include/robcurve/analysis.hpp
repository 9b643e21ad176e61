#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "robcurve/engine.hpp"
#include "robcurve/errors.hpp"
#include "robcurve/grid.hpp"

namespace robcurve {

/// Linear interpolant of P between two grid radii; endpoint-exact.
inline double interpolate(double r_i, double r_ip1, double P_i, double P_ip1, double r) {
    if (!(r_i < r_ip1)) throw input_error("interpolate: need r_i < r_ip1");
    if (!(r >= r_i && r <= r_ip1)) throw input_error("interpolate: r outside the interval");
    return ((r - r_i) * P_ip1 + (r_ip1 - r) * P_i) / (r_ip1 - r_i);
}

namespace detail {

/// g(r) = (r_ip1 - r)(r/r_i)^(-d) + (r - r_i)(r_ip1/r)^(-d); the interpolation
/// error over [r_i, r_ip1] is bounded by 1 - g(r*)/(r_ip1 - r_i) at g's
/// interior minimum r*.
inline double interp_g(double r_i, double r_ip1, std::int64_t d, double r) {
    const double dd = static_cast<double>(d);
    return (r_ip1 - r) * std::pow(r_i / r, dd) + (r - r_i) * std::pow(r / r_ip1, dd);
}

/// dg/dr = phi(r) - psi(r); phi increases and psi decreases in r, so the
/// derivative has exactly one zero inside the interval.
inline double interp_phi(double r_i, double r_ip1, std::int64_t d, double r) {
    const double dd = static_cast<double>(d);
    return std::pow(r / r_ip1, dd) * (1.0 + (1.0 - r_i / r) * dd);
}

inline double interp_psi(double r_i, double r_ip1, std::int64_t d, double r) {
    const double dd = static_cast<double>(d);
    return std::pow(r_i / r, dd) * (1.0 + (r_ip1 / r - 1.0) * dd);
}

} // namespace detail

/// Interior minimizer of g on (r_i, r_ip1), found by bisection on the
/// monotone derivative. The residual |phi - psi| at the result is within
/// tol * max(1, psi(r_i)); 200 iterations before giving up.
inline double find_r_star(double r_i, double r_ip1, std::int64_t d, double tol = 1e-12) {
    if (!(r_i > 0.0) || !(r_i < r_ip1)) throw input_error("find_r_star: need 0 < r_i < r_ip1");
    if (d < 1) throw input_error("find_r_star: d must be >= 1");
    if (!(tol > 0.0)) throw input_error("find_r_star: tol must be > 0");
    const double scale = std::max(1.0, detail::interp_psi(r_i, r_ip1, d, r_i));
    double lo = r_i, hi = r_ip1;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double h = detail::interp_phi(r_i, r_ip1, d, mid) -
                         detail::interp_psi(r_i, r_ip1, d, mid);
        if (std::abs(h) <= tol * scale) return mid;
        if (h < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw numerical_error("find_r_star: bisection did not meet the residual tolerance");
}

struct InterpErrorBound {
    double tight = 0.0; // 1 - g(r*)/(r_ip1 - r_i)
    double loose = 0.0; // d (r_ip1 - r_i) / (2 r_i)
};

/// Both interpolation error bounds for one interval; 0 <= tight <= loose.
/// Propagates numerical_error when the r* search fails (callers that can
/// degrade gracefully fall back to the loose bound).
inline InterpErrorBound interp_error_bound(double r_i, double r_ip1, std::int64_t d) {
    if (!(r_i > 0.0) || !(r_i < r_ip1))
        throw input_error("interp_error_bound: need 0 < r_i < r_ip1");
    if (d < 1) throw input_error("interp_error_bound: d must be >= 1");
    InterpErrorBound bound;
    bound.loose = static_cast<double>(d) * (r_ip1 - r_i) / (2.0 * r_i);
    const double r_star = find_r_star(r_i, r_ip1, d);
    bound.tight = 1.0 - detail::interp_g(r_i, r_ip1, d, r_star) / (r_ip1 - r_i);
    bound.tight = std::max(0.0, bound.tight);
    return bound;
}

/// Variation bound for any robustness proportion over nested sets:
/// |P(r + dr) - P(r)| <= 1 - (1 + dr/r)^(-d), itself below (d/r) dr.
inline double lipschitz_bound(double r, double delta_r, std::int64_t d) {
    if (!(r > 0.0)) throw input_error("lipschitz_bound: r must be > 0");
    if (!(delta_r >= 0.0)) throw input_error("lipschitz_bound: delta_r must be >= 0");
    if (d < 1) throw input_error("lipschitz_bound: d must be >= 1");
    return 1.0 - std::pow(1.0 + delta_r / r, -static_cast<double>(d));
}

struct ConfidenceLimits {
    double lower = 0.0;
    double upper = 1.0;
};

/// Two-sided limits for a binomial proportion from k successes out of N, at
/// confidence level 1 - delta, using the closed-form concentration limits
/// with theta = 9 / (8 ln(2/delta)). Cheap enough to evaluate per grid point,
/// unlike the exact tail-inversion interval. Clamped to [0,1];
/// lower <= k/N <= upper always.
inline ConfidenceLimits confidence_limits(std::int64_t k, std::int64_t N, double delta) {
    if (N < 1) throw input_error("confidence_limits: N must be >= 1");
    if (k < 0 || k > N) throw input_error("confidence_limits: k must lie in [0, N]");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw input_error("confidence_limits: delta must lie in (0,1)");
    const double theta = 9.0 / (8.0 * std::log(2.0 / delta));
    const double kf = static_cast<double>(k);
    const double Nf = static_cast<double>(N);
    const double phat = kf / Nf;
    const double root = std::sqrt(1.0 + 4.0 * theta * kf * (1.0 - phat));
    const double denom = 1.0 + theta * Nf;
    ConfidenceLimits limits;
    limits.lower = std::clamp(phat + 0.75 * (1.0 - 2.0 * phat - root) / denom, 0.0, 1.0);
    limits.upper = std::clamp(phat + 0.75 * (1.0 - 2.0 * phat + root) / denom, 0.0, 1.0);
    return limits;
}

/// Confidence-band configuration.
struct BandParams {
    double delta = 0.05;
    double theta = 0.0; // 9 / (8 ln(2/delta))
    std::int64_t N = 0;
    std::int64_t d = 0;

    static BandParams make(double delta, std::int64_t N, std::int64_t d) {
        if (!(delta > 0.0) || !(delta < 1.0))
            throw input_error("BandParams: delta must lie in (0,1)");
        if (N < 1) throw input_error("BandParams: N must be >= 1");
        if (d < 1) throw input_error("BandParams: d must be >= 1");
        BandParams p;
        p.delta = delta;
        p.theta = 9.0 / (8.0 * std::log(2.0 / delta));
        p.N = N;
        p.d = d;
        return p;
    }
};

/// Which endpoint limits the interpolation weight zeta multiplies. The
/// consistent pairing matches the interpolant (zeta weighs the right
/// endpoint); the literal pairing reproduces the displayed band formula,
/// which swaps them, and is kept for comparison.
enum class BandPairing { InterpolationConsistent, LiteralEndpoint };

/// Band over one interval, stored as endpoint values plus the interval's
/// interpolation slack. Evaluation lerps the endpoints and clamps to [0,1].
struct IntervalBand {
    double lower_lo = 0.0;
    double lower_hi = 0.0;
    double upper_lo = 1.0;
    double upper_hi = 1.0;
    double slack = 0.0;
};

/// Robustness curve with estimates, running infimum, and confidence band.
struct RobustnessCurve {
    RadiusGrid grid;
    std::vector<double> estimates;
    std::vector<double> running_min;
    std::vector<IntervalBand> bands; // size m-1; empty when m = 1
    ConfidenceLimits point_limits;   // used when m = 1

    std::size_t interval_of(double r) const {
        const auto& radii = grid.radii;
        if (radii.size() < 2 || !(r >= radii.front() && r <= radii.back()))
            throw input_error("RobustnessCurve: r outside the banded range");
        const auto it = std::upper_bound(radii.begin(), radii.end(), r);
        std::size_t i = static_cast<std::size_t>(it - radii.begin());
        if (i == 0) i = 1;
        if (i >= radii.size()) i = radii.size() - 1;
        return i - 1;
    }

    /// Band evaluation without the [0,1] clamp; this is the function the
    /// per-interval coverage statement is about (the raw upper limit can
    /// exceed one, which is what lets it strictly contain a probability of
    /// exactly one).
    double lower_at_raw(double r) const {
        if (grid.size() == 1) return point_limits.lower;
        const std::size_t i = interval_of(r);
        const double zeta =
            (r - grid.radii[i]) / (grid.radii[i + 1] - grid.radii[i]);
        const IntervalBand& b = bands[i];
        return zeta * b.lower_hi + (1.0 - zeta) * b.lower_lo;
    }

    double upper_at_raw(double r) const {
        if (grid.size() == 1) return point_limits.upper;
        const std::size_t i = interval_of(r);
        const double zeta =
            (r - grid.radii[i]) / (grid.radii[i + 1] - grid.radii[i]);
        const IntervalBand& b = bands[i];
        return zeta * b.upper_hi + (1.0 - zeta) * b.upper_lo;
    }

    double lower_at(double r) const { return std::clamp(lower_at_raw(r), 0.0, 1.0); }

    double upper_at(double r) const { return std::clamp(upper_at_raw(r), 0.0, 1.0); }

    /// Band at a grid node, conservative across the adjacent intervals.
    double lower_at_node(std::size_t i) const {
        if (grid.size() == 1) return point_limits.lower;
        double lo = 1.0;
        if (i > 0) lo = std::min(lo, std::clamp(bands[i - 1].lower_hi, 0.0, 1.0));
        if (i + 1 < grid.radii.size())
            lo = std::min(lo, std::clamp(bands[i].lower_lo, 0.0, 1.0));
        return lo;
    }

    double upper_at_node(std::size_t i) const {
        if (grid.size() == 1) return point_limits.upper;
        double hi = 0.0;
        if (i > 0) hi = std::max(hi, std::clamp(bands[i - 1].upper_hi, 0.0, 1.0));
        if (i + 1 < grid.radii.size())
            hi = std::max(hi, std::clamp(bands[i].upper_lo, 0.0, 1.0));
        return hi;
    }
};

/// Assemble the robustness curve from a finished run: per-radius estimates,
/// the running infimum, and a band that holds over every whole interval with
/// probability > 1 - delta. Interval slack is the tight interpolation bound,
/// falling back to the loose one when the r* search fails.
inline RobustnessCurve build_band(const RunResult& result, const BandParams& params,
                                  BandPairing pairing = BandPairing::InterpolationConsistent) {
    const std::int64_t m = result.grid.size();
    if (m < 1) throw input_error("build_band: empty run result");
    if (static_cast<std::int64_t>(result.violations_final.size()) != m)
        throw input_error("build_band: result and grid sizes differ");
    RobustnessCurve curve;
    curve.grid = result.grid;
    curve.estimates = result.estimates;
    curve.running_min.resize(curve.estimates.size());
    double acc = 1.0;
    for (std::size_t i = 0; i < curve.estimates.size(); ++i) {
        acc = std::min(acc, curve.estimates[i]);
        curve.running_min[i] = acc;
    }

    std::vector<ConfidenceLimits> limits(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        const std::int64_t satisfied = params.N - result.violations_final[static_cast<std::size_t>(i)];
        limits[static_cast<std::size_t>(i)] = confidence_limits(satisfied, params.N, params.delta);
    }
    if (m == 1) {
        curve.point_limits = limits[0];
        return curve;
    }

    curve.bands.resize(static_cast<std::size_t>(m - 1));
    for (std::int64_t i = 0; i + 1 < m; ++i) {
        const double r_lo = result.grid.radii[static_cast<std::size_t>(i)];
        const double r_hi = result.grid.radii[static_cast<std::size_t>(i + 1)];
        double slack;
        try {
            slack = interp_error_bound(r_lo, r_hi, params.d).tight;
        } catch (const numerical_error&) {
            slack = static_cast<double>(params.d) * (r_hi - r_lo) / (2.0 * r_lo);
        }
        const ConfidenceLimits& at_lo = limits[static_cast<std::size_t>(i)];
        const ConfidenceLimits& at_hi = limits[static_cast<std::size_t>(i + 1)];
        IntervalBand band;
        band.slack = slack;
        if (pairing == BandPairing::InterpolationConsistent) {
            band.lower_lo = at_lo.lower - slack;
            band.lower_hi = at_hi.lower - slack;
            band.upper_lo = at_lo.upper + slack;
            band.upper_hi = at_hi.upper + slack;
        } else {
            band.lower_lo = at_hi.lower - slack;
            band.lower_hi = at_lo.lower - slack;
            band.upper_lo = at_hi.upper + slack;
            band.upper_hi = at_lo.upper + slack;
        }
        curve.bands[static_cast<std::size_t>(i)] = band;
    }
    return curve;
}

/// Predicted bounds on the violation-matrix row count.
struct MemoryBoundReport {
    double rho0 = 0.0;           // largest radius with P = 1 (clamped to the range)
    double hbar = 1.0;           // max(min(lambda, a/rho0), 1)
    double bound_integral = 1.0; // 1 + N [P_e(a) + 2 d I], I = int P_e(x)/x dx
    double bound_loose = 1.0;    // 1 + N P_e(a) (1 + 2 d ln hbar)
};

namespace detail {

/// Running-minimum envelope of P over [lo, hi] on a dense log-spaced grid;
/// env(x) = min over [lo, x] of P, exact for nonincreasing P and within one
/// cell's variation otherwise.
class MinEnvelope {
public:
    MinEnvelope(const std::function<double(double)>& P, double lo, double hi,
                std::size_t points = 4097)
        : lo_(lo), hi_(hi), x_(points), min_(points) {
        const double ratio = std::log(hi / lo);
        double run = 1.0;
        for (std::size_t k = 0; k < points; ++k) {
            x_[k] = lo * std::exp(ratio * static_cast<double>(k) /
                                  static_cast<double>(points - 1));
            run = std::min(run, P(x_[k]));
            min_[k] = run;
        }
        x_.front() = lo;
        x_.back() = hi;
    }

    double operator()(const std::function<double(double)>& P, double x) const {
        if (x <= x_.front()) return std::min(1.0, P(x_.front()));
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t cell = static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(min_[cell], P(std::min(x, hi_)));
    }

private:
    double lo_, hi_;
    std::vector<double> x_;
    std::vector<double> min_;
};

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw numerical_error("memory_bound: quadrature tolerance not met");
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(std::abs(whole), 1e-3) * rel_tol;
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

/// Evaluate the violation-row memory predictor for a known robustness curve.
inline MemoryBoundReport memory_bound(const std::function<double(double)>& P, double a,
                                      double lambda, std::int64_t d, std::int64_t N) {
    if (!(a > 0.0)) throw input_error("memory_bound: a must be > 0");
    if (!(lambda >= 1.0)) throw input_error("memory_bound: lambda must be >= 1");
    if (d < 1 || N < 1) throw input_error("memory_bound: d and N must be >= 1");
    const double lo = a / lambda;

    MemoryBoundReport report;
    if (P(a) >= 1.0) {
        report.rho0 = a;
        report.hbar = 1.0;
        const double pe_a = std::clamp(1.0 - P(a), 0.0, 1.0);
        report.bound_integral = 1.0 + static_cast<double>(N) * pe_a;
        report.bound_loose = report.bound_integral;
        return report;
    }
    if (P(lo) < 1.0) {
        report.rho0 = 0.0; // no unit-probability radius inside the range
        report.hbar = lambda;
    } else {
        double left = lo, right = a;
        const double tol = 1e-9 * a;
        while (right - left > tol) {
            const double mid = 0.5 * (left + right);
            if (P(mid) >= 1.0)
                left = mid;
            else
                right = mid;
        }
        report.rho0 = left;
        report.hbar = std::max(std::min(lambda, a / report.rho0), 1.0);
    }

    detail::MinEnvelope envelope(P, lo, a);
    const auto pe = [&](double x) {
        return std::clamp(1.0 - envelope(P, x), 0.0, 1.0);
    };
    const double pe_a = pe(a);
    const double from = std::max(a / report.hbar, std::max(lo, report.rho0));
    const double integral =
        detail::integrate([&](double x) { return pe(x) / x; }, from, a, 1e-8);
    report.bound_integral =
        1.0 + static_cast<double>(N) * (pe_a + 2.0 * static_cast<double>(d) * integral);
    report.bound_loose =
        1.0 + static_cast<double>(N) * pe_a *
                  (1.0 + 2.0 * static_cast<double>(d) * std::log(report.hbar));
    return report;
}

} // namespace robcurve
