#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "robcurve/analysis.hpp"
#include "robcurve/engine.hpp"
#include "robcurve/errors.hpp"
#include "robcurve/grid.hpp"
#include "robcurve/io.hpp"
#include "robcurve/systems.hpp"
#include "robcurve/uncertainty.hpp"

namespace robcurve {

/// Configuration shared by the CLI subcommands. Defaults are documented in
/// the README; every field can come from the key=value config file or be
/// overridden on the command line.
struct RunConfig {
    std::string system = "feedback_B"; // feedback_A | feedback_B
    double a = 100.0;
    double lambda = 10.0;
    std::string scheme = "geometric"; // uniform | geometric | explicit
    std::vector<double> radii;        // used by the explicit scheme
    double eps = 0.01;                // interpolation tolerance for sizing
    std::int64_t m = 0;               // 0: derive from eps via the scheme's rule
    std::int64_t N = 10000;
    double delta = 0.05;
    std::int64_t d = 0;               // 0: take the system's dimension
    std::uint64_t seed = 1;
    std::string engine = "reuse";     // reuse | conventional | both
    std::int64_t max_m = 1'000'000;
    std::int64_t max_draws = 1'000'000'000;
    std::int64_t engp_terms_cap = 100'000'000;
    bool audit = false;
    int repeats = 1;
    int workers = 1;
    std::string band = "consistent"; // consistent | literal
    std::string out_dir = ".";
    // compare sweep
    double eps_min = 1e-4;
    double eps_max = 1e-1;
    int eps_steps = 13;
};

/// A runnable problem: uncertainty set, violation predicate, and (when known)
/// the closed-form robustness function used for side-by-side reporting.
struct SystemBundle {
    std::string name;
    UncertaintySet set;
    ViolationPredicate predicate;
    std::function<double(double)> closed_form; // empty when unknown
};

inline SystemBundle make_system(const RunConfig& cfg) {
    const FeedbackExampleParams params;
    if (cfg.system == "feedback_A") {
        return SystemBundle{
            "feedback_A", UncertaintySet::box({params.q0, params.p0}), predicate_A(params),
            [params](double r) { return closed_form_P_A(params, r); }};
    }
    if (cfg.system == "feedback_B") {
        return SystemBundle{
            "feedback_B", UncertaintySet::box({params.q0, params.p0}), predicate_B(params),
            [params](double r) { return closed_form_P_B(params, r); }};
    }
    throw input_error("unknown system '" + cfg.system +
                      "'; built-in systems are feedback_A and feedback_B "
                      "(custom predicates plug in through the library API)");
}

inline BandPairing band_pairing(const RunConfig& cfg) {
    if (cfg.band == "consistent") return BandPairing::InterpolationConsistent;
    if (cfg.band == "literal") return BandPairing::LiteralEndpoint;
    throw input_error("band must be 'consistent' or 'literal'");
}

namespace detail {

inline std::int64_t to_int64_or_cap(const bigint& value, const std::string& what) {
    if (value > bigint(std::numeric_limits<std::int64_t>::max()))
        throw cap_exceeded(what + " does not fit in a 64-bit count: " + value.str());
    return static_cast<std::int64_t>(value);
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::int64_t sized_m(const RunConfig& cfg) {
    if (cfg.scheme == "explicit") {
        if (cfg.radii.empty())
            throw input_error("explicit scheme: radii must be supplied; "
                              "tolerance sizing only certifies uniform and geometric grids");
        return static_cast<std::int64_t>(cfg.radii.size());
    }
    if (cfg.m > 0) return cfg.m;
    const std::int64_t d = cfg.d > 0 ? cfg.d : 2;
    if (cfg.lambda == 1.0) return 1;
    const bigint sized = (cfg.scheme == "uniform") ? size_uniform(cfg.lambda, d, cfg.eps)
                                                   : size_geometric(cfg.lambda, d, cfg.eps);
    return to_int64_or_cap(sized, "sized grid (scheme " + cfg.scheme + ")");
}

inline RadiusGrid build_grid(const RunConfig& cfg, std::int64_t m) {
    if (cfg.scheme == "explicit") return explicit_grid(cfg.radii);
    if (m == 1) return single_radius_grid(cfg.a);
    if (cfg.scheme == "uniform") return uniform_grid(cfg.a, cfg.lambda, m);
    if (cfg.scheme == "geometric") return geometric_grid(cfg.a, cfg.lambda, m);
    throw input_error("scheme must be uniform, geometric or explicit");
}

} // namespace detail

/// plan: sizing rules, ENGP and bounds, reuse factors, expected per-radius
/// samples, and the memory predictor -- all without allocating a grid unless
/// it fits the caps. Returns 0, or 3 when the per-radius vector had to be
/// refused (the sizing table is always printed first).
inline int cmd_plan(const RunConfig& cfg, std::ostream& out) {
    const std::int64_t d = cfg.d > 0 ? cfg.d : 2;
    const auto dir = detail::ensure_out_dir(cfg);
    KeyValueWriter kv((dir / "plan.kv").string());
    kv.put("a", cfg.a);
    kv.put("lambda", cfg.lambda);
    kv.put("d", d);
    kv.put("eps", cfg.eps);
    kv.put("N", cfg.N);

    if (cfg.lambda == 1.0) {
        out << "degenerate range (lambda = 1): m = 1, engp = 1, reuse_factor = 1\n";
        kv.put("m", std::int64_t{1});
        kv.put("engp", 1.0);
        kv.put("reuse_factor", 1.0);
        kv.put("max_gap", 0.0);
        return 0;
    }

    const bigint m_barmish = size_barmish(cfg.lambda, d, cfg.eps);
    const bigint m_uniform = size_uniform(cfg.lambda, d, cfg.eps);
    const bigint m_geometric = size_geometric(cfg.lambda, d, cfg.eps);
    const double bound = engp_bound(d, cfg.lambda);
    out << "grid sizes for tolerance eps = " << format_g17(cfg.eps) << ", d = " << d
        << ", lambda = " << format_g17(cfg.lambda) << ":\n";
    out << "  barmish    m = " << m_barmish.str() << "\n";
    out << "  uniform    m = " << m_uniform.str() << "\n";
    out << "  geometric  m = " << m_geometric.str() << "\n";
    out << "  engp bound (any scheme) = " << format_g17(bound) << "\n";
    kv.put("m_barmish", m_barmish.str());
    kv.put("m_uniform", m_uniform.str());
    kv.put("m_geometric", m_geometric.str());
    kv.put("engp_bound", bound);

    // Per-scheme ENGP, reuse factor, max gap (closed forms, no allocation).
    if (m_geometric <= bigint(std::numeric_limits<std::int64_t>::max())) {
        const std::int64_t mg = static_cast<std::int64_t>(m_geometric);
        const double engp_g = engp_geometric_scheme(cfg.lambda, mg, d);
        const double gap_g =
            cfg.a * (1.0 - std::pow(cfg.lambda, -1.0 / static_cast<double>(mg - 1)));
        out << "  geometric  engp = " << format_g17(engp_g)
            << "  reuse_factor = " << format_g17(static_cast<double>(mg) / engp_g)
            << "  max_gap = " << format_g17(gap_g) << "\n";
        kv.put("engp_geometric", engp_g);
        kv.put("reuse_geometric", static_cast<double>(mg) / engp_g);
        kv.put("max_gap_geometric", gap_g);
    }
    if (m_uniform <= bigint(cfg.engp_terms_cap)) {
        const std::int64_t mu = static_cast<std::int64_t>(m_uniform);
        const double engp_u = engp_uniform_scheme(cfg.lambda, mu, d, cfg.engp_terms_cap);
        const double gap_u = (cfg.lambda - 1.0) * cfg.a /
                             (static_cast<double>(mu - 1) * cfg.lambda);
        out << "  uniform    engp = " << format_g17(engp_u)
            << "  reuse_factor = " << format_g17(static_cast<double>(mu) / engp_u)
            << "  max_gap = " << format_g17(gap_u) << "\n";
        kv.put("engp_uniform", engp_u);
        kv.put("reuse_uniform", static_cast<double>(mu) / engp_u);
        kv.put("max_gap_uniform", gap_u);
    } else {
        out << "  uniform    engp skipped (m = " << m_uniform.str()
            << " exceeds the term cap " << cfg.engp_terms_cap
            << "); the bound above applies\n";
        kv.put("engp_uniform", std::string("skipped"));
    }

    // Memory predictor for the built-in systems.
    try {
        const SystemBundle bundle = make_system(cfg);
        if (bundle.closed_form) {
            const MemoryBoundReport mem =
                memory_bound(bundle.closed_form, cfg.a, cfg.lambda, d, cfg.N);
            out << "  violation rows: integral bound = " << format_g17(mem.bound_integral)
                << ", loose bound = " << format_g17(mem.bound_loose) << " (rho0 = "
                << format_g17(mem.rho0) << ", hbar = " << format_g17(mem.hbar)
                << ", 4 bytes/row -> " << format_g17(4.0 * mem.bound_loose)
                << " bytes)\n";
            kv.put("v_rows_bound_integral", mem.bound_integral);
            kv.put("v_rows_bound_loose", mem.bound_loose);
            kv.put("rho0", mem.rho0);
            kv.put("hbar", mem.hbar);
        }
    } catch (const input_error&) {
        // No closed form for this system; the predictor is skipped.
    }

    // Expected per-radius samples for the configured scheme.
    const std::int64_t m_planned = detail::sized_m(cfg);
    kv.put("m_planned", m_planned);
    if (m_planned > cfg.max_m) {
        out << "refused: planned grid for scheme '" << cfg.scheme << "' has m = "
            << m_planned << ", above max_m = " << cfg.max_m
            << "; not emitting the per-radius vector\n";
        return 3;
    }
    const RadiusGrid grid = detail::build_grid(cfg, m_planned);
    const ComplexityReport report = complexity_report(grid, d, cfg.N, cfg.max_m);
    {
        std::ofstream samples = open_output((dir / "plan_expected_samples.csv").string());
        samples << "radius,expected_draws\n";
        for (std::size_t i = 0; i < grid.radii.size(); ++i)
            samples << format_g17(grid.radii[i]) << ','
                    << format_g17(report.expected_samples[i]) << '\n';
    }
    double total = 0.0;
    for (double e : report.expected_samples) total += e;
    out << "planned scheme '" << cfg.scheme << "': m = " << report.m
        << ", engp = " << format_g17(report.engp)
        << ", expected total draws = " << format_g17(total)
        << ", max_gap = " << format_g17(report.max_gap) << "\n";
    kv.put("engp_planned", report.engp);
    kv.put("expected_total_draws", total);
    kv.put("max_gap_planned", report.max_gap);
    return 0;
}

namespace detail {

struct RepeatStats {
    double mean_empirical_engp = 0.0;
    double mean_total_draws = 0.0;
    double mean_max_v_rows = 0.0;
    double coverage_fraction = 0.0; // runs whose band holds at every grid node
};

inline RepeatStats run_repeats(const SystemBundle& bundle, const RadiusGrid& grid,
                               const RunConfig& cfg, std::int64_t d) {
    const int repeats = std::max(1, cfg.repeats);
    std::vector<RunResult> results(static_cast<std::size_t>(repeats));
    const int workers = std::clamp(cfg.workers, 1, repeats);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (int k = next.fetch_add(1); k < repeats; k = next.fetch_add(1)) {
            results[static_cast<std::size_t>(k)] =
                run(bundle.set, grid, cfg.N, bundle.predicate,
                    cfg.seed + static_cast<std::uint64_t>(k));
        }
    };
    if (workers == 1) {
        worker();
    } else {
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const BandParams params = BandParams::make(cfg.delta, cfg.N, d);
    RepeatStats stats;
    int covered = 0;
    for (const RunResult& rr : results) {
        stats.mean_empirical_engp += rr.empirical_engp;
        stats.mean_total_draws += static_cast<double>(rr.total_draws);
        stats.mean_max_v_rows += static_cast<double>(rr.max_V_rows);
        if (bundle.closed_form) {
            const RobustnessCurve curve = build_band(rr, params, band_pairing(cfg));
            bool inside = true;
            for (std::size_t i = 0; i < grid.radii.size() && inside; ++i) {
                const double truth = bundle.closed_form(grid.radii[i]);
                inside = curve.lower_at_raw(grid.radii[i]) < truth &&
                         truth < curve.upper_at_raw(grid.radii[i]);
            }
            covered += inside ? 1 : 0;
        }
    }
    const double n = static_cast<double>(repeats);
    stats.mean_empirical_engp /= n;
    stats.mean_total_draws /= n;
    stats.mean_max_v_rows /= n;
    stats.coverage_fraction = static_cast<double>(covered) / n;
    return stats;
}

} // namespace detail

/// run: execute the configured engine(s), write curve/band CSVs and reports.
inline int cmd_run(const RunConfig& cfg, std::ostream& out) {
    if (cfg.engine != "reuse" && cfg.engine != "conventional" && cfg.engine != "both")
        throw input_error("engine must be reuse, conventional or both");
    const SystemBundle bundle = make_system(cfg);
    const std::int64_t d = cfg.d > 0 ? cfg.d : bundle.set.dimension();
    if (d != bundle.set.dimension())
        throw input_error("d does not match the system's uncertainty dimension");

    const std::int64_t m = detail::sized_m(cfg);
    if (m > cfg.max_m)
        throw cap_exceeded("run: grid needs m = " + std::to_string(m) +
                           " points, above max_m = " + std::to_string(cfg.max_m));
    const RadiusGrid grid = detail::build_grid(cfg, m);
    const double engp_analytic = engp(grid, d);
    const bool want_reuse = cfg.engine != "conventional";
    const bool want_conventional = cfg.engine != "reuse";
    if (want_reuse &&
        engp_analytic * static_cast<double>(cfg.N) > static_cast<double>(cfg.max_draws))
        throw cap_exceeded("run: expected reuse draws exceed max_draws");
    if (want_conventional && static_cast<double>(m) * static_cast<double>(cfg.N) >
                                 static_cast<double>(cfg.max_draws))
        throw cap_exceeded("run: conventional draws m*N exceed max_draws");

    const auto dir = detail::ensure_out_dir(cfg);
    const BandParams params = BandParams::make(cfg.delta, cfg.N, d);
    const auto started = std::chrono::steady_clock::now();

    RunResult reuse_result;
    RunResult conventional_result;
    if (want_reuse) {
        ReuseRun engine(bundle.set, grid, cfg.N, bundle.predicate, cfg.seed, cfg.audit);
        reuse_result = engine.finish();
        const RobustnessCurve curve = build_band(reuse_result, params, band_pairing(cfg));
        write_curve_csv((dir / "curve.csv").string(), curve, reuse_result);
        write_band_csv((dir / "band.csv").string(), curve);
        if (cfg.audit) {
            std::ofstream audit = open_output((dir / "audit.log").string());
            write_audit_log(audit, engine.audit_log());
        }
    }
    if (want_conventional) {
        conventional_result = run_conventional(bundle.set, grid, cfg.N, bundle.predicate, cfg.seed);
        const RobustnessCurve curve = build_band(conventional_result, params, band_pairing(cfg));
        write_curve_csv((dir / "curve_conventional.csv").string(), curve, conventional_result);
        if (!want_reuse) write_band_csv((dir / "band.csv").string(), curve);
    }

    // Expected vs measured per-radius draws.
    if (want_reuse) {
        const std::vector<double> expected = expected_samples_per_radius(grid, d, cfg.N);
        std::ofstream samples = open_output((dir / "samples.csv").string());
        samples << "radius,expected_draws,draws\n";
        for (std::size_t i = 0; i < grid.radii.size(); ++i)
            samples << format_g17(grid.radii[i]) << ',' << format_g17(expected[i]) << ','
                    << reuse_result.per_radius_draws[i] << '\n';
    }

    detail::RepeatStats stats;
    if (cfg.repeats > 1) stats = detail::run_repeats(bundle, grid, cfg, d);

    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - started)
                               .count();

    KeyValueWriter kv((dir / "report.kv").string());
    kv.put("system", bundle.name);
    kv.put("scheme", cfg.scheme);
    kv.put("engine", cfg.engine);
    kv.put("m", m);
    kv.put("N", cfg.N);
    kv.put("d", d);
    kv.put("delta", cfg.delta);
    kv.put("seed", cfg.seed);
    kv.put("band_pairing", cfg.band);
    kv.put("engp_analytic", engp_analytic);
    kv.put("engp_bound", engp_bound(d, std::max(grid.lambda, 1.0)));
    kv.put("expected_total_draws", engp_analytic * static_cast<double>(cfg.N));
    std::ostream& rep = out;
    rep << "system " << bundle.name << ", scheme " << cfg.scheme << ", m = " << m
        << ", N = " << cfg.N << ", seed = " << cfg.seed << "\n";
    rep << "analytic: engp = " << format_g17(engp_analytic)
        << " (bound " << format_g17(engp_bound(d, std::max(grid.lambda, 1.0)))
        << "), expected draws = " << format_g17(engp_analytic * static_cast<double>(cfg.N))
        << "\n";
    if (want_reuse) {
        kv.put("total_draws_reuse", reuse_result.total_draws);
        kv.put("empirical_engp", reuse_result.empirical_engp);
        kv.put("reuse_factor_analytic", static_cast<double>(m) / engp_analytic);
        kv.put("reuse_factor_measured",
               static_cast<double>(m * cfg.N) / static_cast<double>(reuse_result.total_draws));
        kv.put("max_s_rows", reuse_result.max_S_rows);
        kv.put("s_rows_bound", cfg.N);
        kv.put("max_v_rows", reuse_result.max_V_rows);
        kv.put("update_count_reuse", reuse_result.update_count);
        rep << "reuse: draws = " << reuse_result.total_draws << " (empirical engp "
            << format_g17(reuse_result.empirical_engp) << "), max S rows = "
            << reuse_result.max_S_rows << " (bound " << cfg.N << "), max V rows = "
            << reuse_result.max_V_rows << ", update_count = " << reuse_result.update_count
            << "\n";
        if (bundle.closed_form) {
            const MemoryBoundReport mem =
                memory_bound(bundle.closed_form, grid.a, std::max(grid.lambda, 1.0), d, cfg.N);
            kv.put("v_rows_bound_integral", mem.bound_integral);
            kv.put("v_rows_bound_loose", mem.bound_loose);
            rep << "violation-row bounds: integral " << format_g17(mem.bound_integral)
                << ", loose " << format_g17(mem.bound_loose) << " (measured max "
                << reuse_result.max_V_rows << ")\n";
        }
    }
    if (want_conventional) {
        kv.put("total_draws_conventional", conventional_result.total_draws);
        kv.put("update_count_conventional", conventional_result.update_count);
        rep << "conventional: draws = " << conventional_result.total_draws
            << " (= m*N), update_count = " << conventional_result.update_count << "\n";
    }
    if (cfg.repeats > 1) {
        kv.put("repeats", static_cast<std::int64_t>(cfg.repeats));
        kv.put("mean_empirical_engp", stats.mean_empirical_engp);
        kv.put("mean_total_draws", stats.mean_total_draws);
        kv.put("mean_max_v_rows", stats.mean_max_v_rows);
        kv.put("band_coverage_fraction", stats.coverage_fraction);
        rep << "repeats = " << cfg.repeats << ": mean empirical engp "
            << format_g17(stats.mean_empirical_engp) << ", band coverage fraction "
            << format_g17(stats.coverage_fraction) << "\n";
    }
    {
        std::ofstream txt = open_output((dir / "report.txt").string());
        txt << "see report.kv for machine-readable values\n";
        txt << "wall_ms " << format_g17(wall_ms) << "\n";
    }
    return 0;
}

/// compare: sweep the tolerance and emit sizing/ENGP/reuse columns for both
/// schemes.
inline int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    if (!(cfg.eps_min > 0.0) || !(cfg.eps_max < 1.0) || !(cfg.eps_min <= cfg.eps_max))
        throw input_error("compare: need 0 < eps_min <= eps_max < 1");
    if (cfg.eps_steps < 2) throw input_error("compare: eps_steps must be >= 2");
    const std::int64_t d = cfg.d > 0 ? cfg.d : 2;
    if (!(cfg.lambda > 1.0)) throw input_error("compare: lambda must be > 1");
    const auto dir = detail::ensure_out_dir(cfg);
    std::ofstream csv = open_output((dir / "compare.csv").string());
    csv << "eps,m_uniform,m_geometric,engp_uniform,engp_geometric,reuse_uniform,"
           "reuse_geometric,bound\n";
    const double bound = engp_bound(d, cfg.lambda);
    const double lg_lo = std::log10(cfg.eps_min);
    const double lg_hi = std::log10(cfg.eps_max);
    for (int k = 0; k < cfg.eps_steps; ++k) {
        const double eps = std::pow(
            10.0, lg_lo + (lg_hi - lg_lo) * static_cast<double>(k) /
                              static_cast<double>(cfg.eps_steps - 1));
        const bigint mu_big = size_uniform(cfg.lambda, d, eps);
        const bigint mg_big = size_geometric(cfg.lambda, d, eps);
        if (mu_big > bigint(cfg.engp_terms_cap))
            throw cap_exceeded("compare: uniform grid at eps = " + format_g17(eps) +
                               " needs m = " + mu_big.str() +
                               ", above the term cap; raise engp_terms_cap or eps_min");
        const std::int64_t mu = static_cast<std::int64_t>(mu_big);
        const std::int64_t mg = static_cast<std::int64_t>(mg_big);
        const double engp_u = engp_uniform_scheme(cfg.lambda, mu, d, cfg.engp_terms_cap);
        const double engp_g = engp_geometric_scheme(cfg.lambda, mg, d);
        csv << format_g17(eps) << ',' << mu << ',' << mg << ',' << format_g17(engp_u)
            << ',' << format_g17(engp_g) << ','
            << format_g17(static_cast<double>(mu) / engp_u) << ','
            << format_g17(static_cast<double>(mg) / engp_g) << ',' << format_g17(bound)
            << '\n';
    }
    out << "wrote " << (dir / "compare.csv").string() << "\n";
    return 0;
}

/// demo: closed-form curves for both controllers on a dense radius grid,
/// Monte Carlo overlays with confidence bands, margins, and the crossover
/// radius where the deterministic-margin ranking and the curves disagree.
inline int cmd_demo(const RunConfig& cfg, std::ostream& out) {
    const FeedbackExampleParams params;
    const Margins mg = margins(params);
    const auto dir = detail::ensure_out_dir(cfg);

    const double r_lo = 20.0, r_hi = 120.0;
    const int dense = 600;
    {
        std::ofstream csv = open_output((dir / "demo_closed_form.csv").string());
        csv << "radius,p_a,p_b\n";
        for (int k = 0; k < dense; ++k) {
            const double r = r_lo + (r_hi - r_lo) * static_cast<double>(k) /
                                        static_cast<double>(dense - 1);
            csv << format_g17(r) << ',' << format_g17(closed_form_P_A(params, r)) << ','
                << format_g17(closed_form_P_B(params, r)) << '\n';
        }
    }

    // Crossover: smallest radius where controller B's curve rises above A's.
    double crossover = 0.0;
    for (int k = 0; k + 1 < dense * 4; ++k) {
        const double r = r_lo + (r_hi - r_lo) * static_cast<double>(k) /
                                    static_cast<double>(dense * 4 - 1);
        if (closed_form_P_B(params, r) > closed_form_P_A(params, r)) {
            crossover = r;
            break;
        }
    }
    if (crossover == 0.0)
        throw numerical_error("demo: no crossover radius found in the scanned range");

    // Monte Carlo overlays.
    const std::int64_t m = 40, N = 2000;
    const RadiusGrid grid = geometric_grid(r_hi, r_hi / r_lo, m);
    const std::int64_t d = 2;
    const BandParams band = BandParams::make(cfg.delta, N, d);
    const UncertaintySet set = UncertaintySet::box({params.q0, params.p0});
    {
        const RunResult rr = run(set, grid, N, predicate_A(params), cfg.seed);
        const RobustnessCurve curve = build_band(rr, band);
        write_curve_csv((dir / "demo_curve_A.csv").string(), curve, rr);
    }
    {
        const RunResult rr = run(set, grid, N, predicate_B(params), cfg.seed + 1);
        const RobustnessCurve curve = build_band(rr, band);
        write_curve_csv((dir / "demo_curve_B.csv").string(), curve, rr);
    }

    KeyValueWriter kv((dir / "demo_report.kv").string());
    kv.put("rho_A", mg.rho_A);
    kv.put("rho_B", mg.rho_B);
    kv.put("rho_A_star", mg.rho_A_star);
    kv.put("rho_B_star", mg.rho_B_star);
    kv.put("crossover_radius", crossover);
    kv.put("p_a_at_crossover", closed_form_P_A(params, crossover));
    kv.put("p_b_at_crossover", closed_form_P_B(params, crossover));
    out << "margins: rho_A = " << format_g17(mg.rho_A) << " > rho_B = "
        << format_g17(mg.rho_B) << ", yet p_b(r) > p_a(r) for r >= "
        << format_g17(crossover) << " (e.g. p_b = "
        << format_g17(closed_form_P_B(params, crossover)) << " vs p_a = "
        << format_g17(closed_form_P_A(params, crossover)) << ")\n";
    return 0;
}

} // namespace robcurve
