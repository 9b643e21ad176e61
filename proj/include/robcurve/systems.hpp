#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "robcurve/errors.hpp"

namespace robcurve {

/// A total, deterministic indicator over the uncertain-parameter space:
/// violated(X) is true when the robustness requirement fails at X.
///
/// This is also the plug-in contract for user-defined problems: supply the
/// dimension and an evaluator that decides every point.
struct ViolationPredicate {
    std::int64_t dimension = 0;
    std::function<bool(std::span<const double>)> violated;
};

/// Two-controller feedback example: plant q/(s - p) with uncertain (q, p)
/// ranging over the box |q - q0| <= r, |p - p0| <= r. Controller A is
/// K_A/(s + sigma), controller B the static gain K_B. The closed-form
/// robustness functions below make this the end-to-end test oracle.
struct FeedbackExampleParams {
    double p0 = -10.0;
    double q0 = 50.0;
    double sigma = 40.0;
    double K_A = 4000.0;
    double K_B = 10.0;

    void validate() const {
        if (!(p0 < 0.0)) throw input_error("feedback example: p0 must be negative");
        if (!(q0 > 0.0)) throw input_error("feedback example: q0 must be positive");
        if (!(sigma > 0.0)) throw input_error("feedback example: sigma must be positive");
        if (!(K_A > 0.0 && K_B > 0.0))
            throw input_error("feedback example: gains must be positive");
        if (!(1.0 < K_B && K_B < K_A / sigma))
            throw input_error("feedback example: need 1 < K_B < K_A/sigma");
        if (!((K_A * q0 - sigma * p0) / (K_A + sigma) < sigma - p0))
            throw input_error("feedback example: margin constraint violated");
    }
};

/// Deterministic robustness margins and the branch switch points of the two
/// closed-form curves.
struct Margins {
    double rho_A = 0.0;
    double rho_B = 0.0;
    double rho_A_star = 0.0;
    double rho_B_star = 0.0;
};

inline Margins margins(const FeedbackExampleParams& p) {
    p.validate();
    Margins m;
    m.rho_A = (p.K_A * p.q0 - p.sigma * p.p0) / (p.K_A + p.sigma);
    m.rho_A_star = (p.K_A * p.q0 - p.sigma * p.p0) / (p.K_A - p.sigma);
    m.rho_B = (p.K_B * p.q0 - p.p0) / (p.K_B + 1.0);
    m.rho_B_star = (p.K_B * p.q0 - p.p0) / (p.K_B - 1.0);
    return m;
}

/// Controller A closed loop: s^2 + (sigma - p) s + (K_A q - sigma p).
/// Stable iff both non-leading coefficients are positive; marginal cases
/// (a zero coefficient) count as violations.
inline ViolationPredicate predicate_A(const FeedbackExampleParams& p) {
    p.validate();
    ViolationPredicate pred;
    pred.dimension = 2;
    pred.violated = [p](std::span<const double> x) {
        if (x.size() != 2) throw input_error("predicate_A: expected a (q, p) point");
        const double q = x[0];
        const double pp = x[1];
        return !(p.sigma - pp > 0.0 && p.K_A * q - p.sigma * pp > 0.0);
    };
    return pred;
}

/// Controller B closed loop: s + (K_B q - p). Violated iff K_B q - p <= 0.
inline ViolationPredicate predicate_B(const FeedbackExampleParams& p) {
    p.validate();
    ViolationPredicate pred;
    pred.dimension = 2;
    pred.violated = [p](std::span<const double> x) {
        if (x.size() != 2) throw input_error("predicate_B: expected a (q, p) point");
        return p.K_B * x[0] - x[1] <= 0.0;
    };
    return pred;
}

/// Closed-form robustness function of controller A over the box of radius r.
inline double closed_form_P_A(const FeedbackExampleParams& p, double r) {
    if (!(r > 0.0)) throw input_error("closed_form_P_A: r must be > 0");
    const Margins m = margins(p);
    if (r < m.rho_A) return 1.0;
    const double beta = std::min(p.sigma, p.p0 + r);
    if (r <= m.rho_A_star) {
        const double t = r + p.sigma * beta / p.K_A - p.q0;
        return 0.5 - p.K_A * t * t / (8.0 * p.sigma * r * r) - (p.p0 - beta) / (2.0 * r);
    }
    const double t = r + p.sigma * (beta + p.p0 - r) / (2.0 * p.K_A) - p.q0;
    return 0.5 - (r + beta - p.p0) * t / (4.0 * r * r) - (p.p0 - beta) / (2.0 * r);
}

/// Closed-form robustness function of controller B.
inline double closed_form_P_B(const FeedbackExampleParams& p, double r) {
    if (!(r > 0.0)) throw input_error("closed_form_P_B: r must be > 0");
    const Margins m = margins(p);
    if (r < m.rho_B) return 1.0;
    if (r <= m.rho_B_star) {
        const double t = r + (p.p0 + r) / p.K_B - p.q0;
        return 1.0 - p.K_B * t * t / (8.0 * r * r);
    }
    return 0.5 - (p.p0 / p.K_B - p.q0) / (2.0 * r);
}

/// Strict Hurwitz test via the Routh array. Coefficients are given leading
/// first (descending powers). Marginal cases (any zero or sign change in the
/// first column, degenerate rows) report unstable.
inline bool routh_hurwitz_stable(std::span<const double> coeffs) {
    std::size_t lo = 0;
    while (lo < coeffs.size() && coeffs[lo] == 0.0) ++lo;
    const std::size_t n = coeffs.size() - lo;
    if (n == 0) return false;
    for (std::size_t i = lo; i < coeffs.size(); ++i) {
        if (!std::isfinite(coeffs[i]))
            throw input_error("routh_hurwitz_stable: non-finite coefficient");
    }
    std::vector<double> c(coeffs.begin() + static_cast<std::ptrdiff_t>(lo), coeffs.end());
    if (c[0] < 0.0)
        for (double& v : c) v = -v;
    if (n == 1) return true; // nonzero constant, no roots
    // All coefficients must be strictly positive for a Hurwitz polynomial.
    for (double v : c) {
        if (!(v > 0.0)) return false;
    }
    if (n <= 3) return true; // orders 1 and 2: positivity is sufficient
    // Routh array, two working rows.
    std::vector<double> prev, curr;
    for (std::size_t i = 0; i < n; i += 2) prev.push_back(c[i]);
    for (std::size_t i = 1; i < n; i += 2) curr.push_back(c[i]);
    while (!curr.empty()) {
        if (!(curr[0] > 0.0) || !std::isfinite(curr[0])) return false;
        std::vector<double> next(prev.size() - 1);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            const double above = (i + 1 < curr.size()) ? curr[i + 1] : 0.0;
            next[i] = prev[i + 1] - prev[0] * above / curr[0];
        }
        prev = std::move(curr);
        curr = std::move(next);
    }
    return true;
}

/// Generic stability predicate: map an uncertain point to polynomial
/// coefficients (leading first) and require them Hurwitz.
inline ViolationPredicate hurwitz_predicate(
    std::function<std::vector<double>(std::span<const double>)> coefficient_map,
    std::int64_t d) {
    if (d < 1) throw input_error("hurwitz_predicate: d must be >= 1");
    ViolationPredicate pred;
    pred.dimension = d;
    pred.violated = [map = std::move(coefficient_map)](std::span<const double> x) {
        const std::vector<double> coeffs = map(x);
        return !routh_hurwitz_stable(coeffs);
    };
    return pred;
}

} // namespace robcurve
