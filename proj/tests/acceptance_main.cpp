// Acceptance suite: every release criterion, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "robcurve/analysis.hpp"
#include "robcurve/cli.hpp"
#include "robcurve/engine.hpp"
#include "robcurve/grid.hpp"
#include "robcurve/systems.hpp"
#include "robcurve/uncertainty.hpp"

using namespace robcurve;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %s  (%s)\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void criterion(int number, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [pass, detail] = body();
        report(number, name, pass, detail);
    } catch (const std::exception& e) {
        report(number, name, false, std::string("exception: ") + e.what());
    }
}

const FeedbackExampleParams kParams;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// 1. Deterministic margins of the two-controller example.
std::pair<bool, std::string> margins_criterion() {
    const Margins m = margins(kParams);
    const bool pass = std::abs(m.rho_A - 49.6040) <= 5e-5 &&
                      std::abs(m.rho_B - 46.3636) <= 5e-5;
    return {pass, "rho_A=" + fmt(m.rho_A) + " rho_B=" + fmt(m.rho_B)};
}

// 2. ENGP of any grid stays strictly below 1 + d ln(lambda).
std::pair<bool, std::string> engp_bound_criterion() {
    PhiloxStream rng(202);
    int checked = 0;
    double min_gap = 1e300;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::int64_t d = 1 + static_cast<std::int64_t>(rng.next_unit() * 2047.0);
        const double lambda = std::pow(10.0, 0.01 + 5.99 * rng.next_unit());
        const std::int64_t m = 2 + static_cast<std::int64_t>(rng.next_unit() * 498.0);
        const double a = std::pow(10.0, -3.0 + 6.0 * rng.next_unit());
        std::vector<double> radii{a / lambda};
        bool ok = true;
        std::vector<double> interior(static_cast<std::size_t>(m - 2));
        for (double& u : interior) u = rng.next_unit();
        std::sort(interior.begin(), interior.end());
        for (double u : interior) {
            const double r = a / lambda + (a - a / lambda) * u;
            if (r <= radii.back()) ok = false;
            radii.push_back(r);
        }
        if (a <= radii.back()) ok = false;
        radii.push_back(a);
        if (!ok) continue;
        const double value = engp(explicit_grid(radii), d);
        const double bound = engp_bound(d, lambda);
        min_gap = std::min(min_gap, bound - value);
        if (!(value < bound)) return {false, "violated at trial " + std::to_string(trial)};
        ++checked;
    }
    return {checked >= 995, std::to_string(checked) + " grids, min gap " + fmt(min_gap)};
}

// 3. Exact grid sizing at the worked tolerances.
std::pair<bool, std::string> sizing_criterion() {
    const bigint barmish = size_barmish(10.0, 1800, 1e-5);
    const bigint uniform = size_uniform(10.0, 1800, 1e-5);
    const double ratio = static_cast<double>(uniform) / static_cast<double>(barmish);
    const bool pass = barmish == bigint(3240000001LL) && uniform == bigint(810000002) &&
                      ratio >= 0.24 && ratio <= 0.26;
    return {pass, "barmish=" + barmish.str() + " uniform=" + uniform.str() +
                      " ratio=" + fmt(ratio)};
}

// 4. Reuse factors of sized geometric grids beat the theorem's floor.
std::pair<bool, std::string> reuse_factor_criterion() {
    const double lambda = 10.0;
    double factor_at_large_d = 0.0;
    for (std::int64_t d : {2, 5, 50}) {
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const std::int64_t m = static_cast<std::int64_t>(size_geometric(lambda, d, eps));
            const double factor =
                static_cast<double>(m) / engp_geometric_scheme(lambda, m, d);
            const double floor_bound =
                (1.0 / (2.0 * eps)) *
                (1.0 - 1.0 / (1.0 + static_cast<double>(d) * std::log(lambda)));
            if (!(factor > floor_bound))
                return {false, "floor violated at d=" + std::to_string(d) +
                                   " eps=" + fmt(eps)};
            if (d == 50 && eps == 1e-4) factor_at_large_d = factor;
        }
    }
    return {factor_at_large_d > 4900.0,
            "factor(d=50, eps=1e-4)=" + fmt(factor_at_large_d)};
}

// 5. Compressed state equals the definition-level oracle at every step.
std::pair<bool, std::string> oracle_equivalence_criterion() {
    PhiloxStream meta(205);
    std::int64_t steps_checked = 0;
    for (int config = 0; config < 200; ++config) {
        const std::int64_t m = 2 + static_cast<std::int64_t>(meta.next_unit() * 48.0);
        const std::int64_t N = 1 + static_cast<std::int64_t>(meta.next_unit() * 199.0);
        const std::size_t dim = 1 + static_cast<std::size_t>(meta.next_unit() * 4.0);
        const NormFamily shape =
            static_cast<NormFamily>(static_cast<int>(meta.next_unit() * 3.0) % 3);
        const double a = 0.5 + 4.0 * meta.next_unit();
        const double lambda = 1.2 + 9.0 * meta.next_unit();
        const RadiusGrid grid = (config % 2 == 0) ? geometric_grid(a, lambda, m)
                                                  : uniform_grid(a, lambda, m);
        UncertaintySet set(std::vector<double>(dim, meta.next_symmetric()), shape,
                           std::vector<double>(dim, 0.5 + meta.next_unit()));
        const double threshold = a * (0.1 + 0.85 * meta.next_unit());
        ViolationPredicate pred;
        pred.dimension = set.dimension();
        pred.violated = [set, threshold](std::span<const double> x) {
            return gauge(set, x) > threshold;
        };
        ReuseRun engine(set, grid, N, pred, 50000 + static_cast<std::uint64_t>(config),
                        /*audit=*/true);
        OracleAccumulator oracle(m, N);
        while (!engine.done()) {
            engine.step();
            oracle.apply(engine.audit_log().back());
            if (decompress(engine.sample_sizes().rows, m) != oracle.sample_counts())
                return {false, "sample state diverged, config " + std::to_string(config)};
            if (decompress(engine.violations().rows, m) != oracle.violation_counts())
                return {false, "violation state diverged, config " + std::to_string(config)};
            if (static_cast<std::int64_t>(engine.sample_sizes().rows.size()) > N)
                return {false, "row count exceeded N, config " + std::to_string(config)};
            ++steps_checked;
        }
    }
    return {true, "200 runs, " + std::to_string(steps_checked) + " steps compared"};
}

// 6. Total and per-radius draw counts match the reuse expectations.
std::pair<bool, std::string> empirical_engp_criterion() {
    const RadiusGrid grid = geometric_grid(100.0, 10.0, 50);
    const std::int64_t N = 2000;
    const std::int64_t d = 2;
    const UncertaintySet set = UncertaintySet::box({kParams.q0, kParams.p0});
    const ViolationPredicate pred = predicate_B(kParams);
    const int seeds = 50;
    double mean_engp = 0.0;
    std::vector<double> mean_draws(static_cast<std::size_t>(grid.size()), 0.0);
    for (int k = 0; k < seeds; ++k) {
        const RunResult rr = run(set, grid, N, pred, 600 + k);
        mean_engp += rr.empirical_engp;
        for (std::size_t i = 0; i < mean_draws.size(); ++i)
            mean_draws[i] += static_cast<double>(rr.per_radius_draws[i]);
    }
    mean_engp /= seeds;
    const double analytic = engp(grid, d);
    if (std::abs(mean_engp - analytic) > 0.05 * analytic)
        return {false, "mean engp " + fmt(mean_engp) + " vs analytic " + fmt(analytic)};
    const std::vector<double> expected = expected_samples_per_radius(grid, d, N);
    double worst = 0.0;
    for (std::size_t i = 0; i < mean_draws.size(); ++i) {
        mean_draws[i] /= seeds;
        const double rel = std::abs(mean_draws[i] - expected[i]) / expected[i];
        worst = std::max(worst, rel);
        if (rel > 0.10)
            return {false, "radius " + std::to_string(i + 1) + " off by " + fmt(rel)};
    }
    return {true, "mean engp " + fmt(mean_engp) + " vs " + fmt(analytic) +
                      ", worst per-radius rel err " + fmt(worst)};
}

// 7. Curve accuracy against the closed form at binomial resolution.
std::pair<bool, std::string> curve_accuracy_criterion() {
    const RadiusGrid grid = geometric_grid(100.0, 10.0, 50);
    const std::int64_t N = 10000;
    const UncertaintySet set = UncertaintySet::box({kParams.q0, kParams.p0});
    const RunResult rr = run(set, grid, N, predicate_B(kParams), 777);
    int within = 0;
    for (std::size_t i = 0; i < rr.estimates.size(); ++i) {
        const double truth = closed_form_P_B(kParams, grid.radii[i]);
        const double tol =
            4.0 * std::sqrt(truth * (1.0 - truth) / static_cast<double>(N));
        if (std::abs(rr.estimates[i] - truth) <= tol) ++within;
    }
    return {within >= 48, std::to_string(within) + "/50 grid points inside 4 sigma"};
}

// 8. Confidence-band coverage over the interval holding the margin knee.
std::pair<bool, std::string> band_coverage_criterion() {
    const RadiusGrid grid = geometric_grid(100.0, 10.0, 50);
    const std::int64_t N = 1000;
    const std::int64_t d = 2;
    const double rho_b = margins(kParams).rho_B;
    std::size_t knee = 0;
    for (std::size_t i = 0; i + 1 < grid.radii.size(); ++i)
        if (grid.radii[i] <= rho_b && rho_b < grid.radii[i + 1]) knee = i;
    const UncertaintySet set = UncertaintySet::box({kParams.q0, kParams.p0});
    const ViolationPredicate pred = predicate_B(kParams);
    const BandParams params = BandParams::make(0.05, N, d);
    const int seeds = 200;
    int covered = 0;
    for (int k = 0; k < seeds; ++k) {
        const RunResult rr = run(set, grid, N, pred, 8000 + k);
        const RobustnessCurve curve = build_band(rr, params);
        bool inside = true;
        for (int t = 0; t <= 200 && inside; ++t) {
            const double r = (t == 200) ? grid.radii[knee + 1]
                                        : grid.radii[knee] +
                                              (grid.radii[knee + 1] - grid.radii[knee]) *
                                                  t / 200.0;
            const double truth = closed_form_P_B(kParams, r);
            inside = curve.lower_at_raw(r) < truth && truth < curve.upper_at_raw(r);
        }
        covered += inside ? 1 : 0;
    }
    return {covered >= 186, std::to_string(covered) + "/200 runs covered the interval [" +
                                fmt(grid.radii[knee]) + ", " + fmt(grid.radii[knee + 1]) +
                                "]"};
}

// 9. Interpolation bounds hold with the tight/loose ordering.
std::pair<bool, std::string> interpolation_bound_criterion() {
    PhiloxStream rng(209);
    double worst_residual = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double r_lo = 5.0 + 110.0 * rng.next_unit();
        const double r_hi = r_lo * (1.0 + 0.001 + 1.5 * rng.next_unit());
        const std::int64_t d = 2 + static_cast<std::int64_t>(rng.next_unit() * 62.0);
        const InterpErrorBound bound = interp_error_bound(r_lo, r_hi, d);
        if (!(bound.tight <= bound.loose + 1e-12))
            return {false, "tight above loose at trial " + std::to_string(trial)};
        const double r_star = find_r_star(r_lo, r_hi, d);
        const double residual = std::abs(detail::interp_phi(r_lo, r_hi, d, r_star) -
                                         detail::interp_psi(r_lo, r_hi, d, r_star));
        const double scale = std::max(1.0, detail::interp_psi(r_lo, r_hi, d, r_lo));
        worst_residual = std::max(worst_residual, residual / scale);
        if (residual > 1e-10 * scale)
            return {false, "stationarity residual " + fmt(residual)};
        for (int side = 0; side < 2; ++side) {
            const auto closed = side == 0 ? &closed_form_P_A : &closed_form_P_B;
            const double p_lo = closed(kParams, r_lo);
            const double p_hi = closed(kParams, r_hi);
            for (int t = 0; t <= 50; ++t) {
                const double r =
                    (t == 50) ? r_hi : r_lo + (r_hi - r_lo) * t / 50.0;
                const double p_star = interpolate(r_lo, r_hi, p_lo, p_hi, r);
                if (std::abs(closed(kParams, r) - p_star) > bound.tight + 1e-12)
                    return {false, "tight bound violated at trial " + std::to_string(trial)};
            }
        }
    }
    return {true, "1000 intervals, worst scaled residual " + fmt(worst_residual)};
}

// 10. Variation bound on both closed-form curves.
std::pair<bool, std::string> lipschitz_criterion() {
    PhiloxStream rng(210);
    for (int trial = 0; trial < 10000; ++trial) {
        const double r = 0.5 + 180.0 * rng.next_unit();
        const double dr = 1e-4 + 120.0 * rng.next_unit();
        const double bound = lipschitz_bound(r, dr, 2);
        const double jump_a =
            std::abs(closed_form_P_A(kParams, r + dr) - closed_form_P_A(kParams, r));
        const double jump_b =
            std::abs(closed_form_P_B(kParams, r + dr) - closed_form_P_B(kParams, r));
        if (jump_a > bound + 1e-12 || jump_b > bound + 1e-12)
            return {false, "violated at trial " + std::to_string(trial)};
    }
    return {true, "10000 pairs, zero violations"};
}

// 11. Violation-row memory bound: measured rows and the worked byte budget.
std::pair<bool, std::string> memory_bound_criterion() {
    const double a = 60.0, lambda = 2.0;
    const std::int64_t N = 1000, d = 2;
    const auto closed = [&](double r) { return closed_form_P_B(kParams, r); };
    const double pe_a = 1.0 - closed(a);
    if (!(pe_a <= 0.2)) return {false, "setup error: P_e(a) = " + fmt(pe_a)};
    const MemoryBoundReport mem = memory_bound(closed, a, lambda, d, N);
    const RadiusGrid grid = geometric_grid(a, lambda, 50);
    const UncertaintySet set = UncertaintySet::box({kParams.q0, kParams.p0});
    const ViolationPredicate pred = predicate_B(kParams);
    double mean_rows = 0.0;
    const int seeds = 100;
    for (int k = 0; k < seeds; ++k)
        mean_rows += static_cast<double>(run(set, grid, N, pred, 880000 + k).max_V_rows);
    mean_rows /= seeds;
    if (!(mean_rows <= mem.bound_integral))
        return {false, "measured " + fmt(mean_rows) + " rows vs bound " +
                           fmt(mem.bound_integral)};

    const auto near_one = [](double r) { return r <= 2.0 ? 1.0 : 1.0 - 0.001 * (r - 2.0); };
    const MemoryBoundReport worked = memory_bound(near_one, 3.0, 3.0, 1800, 1000000);
    const double bytes = 4.0 * worked.bound_loose;
    const bool pass = bytes < 6.2e6 && worked.hbar < 1.5 + 1e-6;
    return {pass, "mean rows " + fmt(mean_rows) + " <= " + fmt(mem.bound_integral) +
                      ", worked bytes " + fmt(bytes)};
}

// 12. The demo exhibits the margin-versus-curve reversal.
std::pair<bool, std::string> demo_criterion() {
    RunConfig cfg;
    cfg.seed = 17;
    const auto dir = std::filesystem::temp_directory_path() / "robcurve_acceptance_demo";
    std::filesystem::remove_all(dir);
    cfg.out_dir = dir.string();
    std::ostringstream sink;
    if (cmd_demo(cfg, sink) != 0) return {false, "demo command failed"};
    std::ifstream kv_file(dir / "demo_report.kv");
    std::map<std::string, double> kv;
    std::string line;
    while (std::getline(kv_file, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos)
            kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    }
    const double r = kv["crossover_radius"];
    const bool pass = kv["rho_A"] > kv["rho_B"] && r > 0.0 &&
                      closed_form_P_B(kParams, r) > closed_form_P_A(kParams, r) &&
                      kv["p_b_at_crossover"] > kv["p_a_at_crossover"];
    std::filesystem::remove_all(dir);
    return {pass, "crossover at r = " + fmt(r) + " with p_b " + fmt(kv["p_b_at_crossover"]) +
                      " > p_a " + fmt(kv["p_a_at_crossover"])};
}

} // namespace

int main() {
    criterion(1, "deterministic margins", margins_criterion);
    criterion(2, "engp strictly below the dimension-log bound", engp_bound_criterion);
    criterion(3, "exact grid sizing and the quarter ratio", sizing_criterion);
    criterion(4, "geometric reuse factor floor", reuse_factor_criterion);
    criterion(5, "compressed state equals the oracle at every step",
              oracle_equivalence_criterion);
    criterion(6, "empirical engp and per-radius draws", empirical_engp_criterion);
    criterion(7, "curve accuracy against the closed form", curve_accuracy_criterion);
    criterion(8, "confidence-band coverage at the margin knee", band_coverage_criterion);
    criterion(9, "interpolation error bounds", interpolation_bound_criterion);
    criterion(10, "variation bound on the closed forms", lipschitz_criterion);
    criterion(11, "violation-row memory bounds", memory_bound_criterion);
    criterion(12, "margin ranking reversal in the demo", demo_criterion);
    if (failures == 0)
        std::printf("all 12 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
