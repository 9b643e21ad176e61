#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robcurve/errors.hpp"
#include "robcurve/grid.hpp"
#include "robcurve/rng.hpp"
#include "robcurve/systems.hpp"
#include "robcurve/uncertainty.hpp"

namespace robcurve {

// ---------------------------------------------------------------------------
// Run-length compressed per-radius state.
//
// The accumulated sample count s(i) and violation count v(i) are piecewise
// constant in the grid index i, so each is stored as rows (index, value):
// row l holds for indices in [row l index, row l+1 index), the last row to m.
// Sampling walks the radii from the largest down; the active frontier keeps
// the number of distinct values small, so state size tracks the frontier,
// not the grid.
// ---------------------------------------------------------------------------

struct RleRow {
    std::int64_t index = 0;
    std::int64_t value = 0;
    friend bool operator==(const RleRow&, const RleRow&) = default;
};

using RleRows = std::vector<RleRow>;

/// Expand compressed rows to the full per-index vector of length m. Indices
/// below the first row decode as zero (nothing recorded there yet).
inline std::vector<std::int64_t> decompress(const RleRows& rows, std::int64_t m) {
    if (m < 1) throw input_error("decompress: m must be >= 1");
    for (std::size_t l = 0; l < rows.size(); ++l) {
        if (rows[l].index < 1 || rows[l].index > m)
            throw input_error("decompress: row index out of range");
        if (l > 0 && rows[l].index <= rows[l - 1].index)
            throw input_error("decompress: row indices must be strictly increasing");
    }
    std::vector<std::int64_t> out(static_cast<std::size_t>(m), 0);
    for (std::size_t l = 0; l < rows.size(); ++l) {
        const std::int64_t hi = (l + 1 < rows.size()) ? rows[l + 1].index : m + 1;
        for (std::int64_t i = rows[l].index; i < hi; ++i)
            out[static_cast<std::size_t>(i - 1)] = rows[l].value;
    }
    return out;
}

/// Change-point scan; inverse of decompress for canonical row lists.
inline RleRows compress(std::span<const std::int64_t> values) {
    RleRows rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i == 0 || values[i] != values[i - 1])
            rows.push_back({static_cast<std::int64_t>(i) + 1, values[i]});
    }
    return rows;
}

/// Matrix of sample sizes. Invariants: indices strictly increasing, counts
/// strictly increasing, at most one count equal to the budget N (always the
/// last row), row count never exceeds N.
struct SampleSizeMatrix {
    RleRows rows;
    friend bool operator==(const SampleSizeMatrix&, const SampleSizeMatrix&) = default;
};

/// Matrix of violations. Indices strictly increasing, values in [0, N],
/// adjacent rows never share a value (canonical form).
struct ViolationMatrix {
    RleRows rows;
    friend bool operator==(const ViolationMatrix&, const ViolationMatrix&) = default;
};

namespace detail {

/// Greatest row position with rows[pos].index <= index; -1 when no such row.
inline std::ptrdiff_t last_row_at_or_before(const RleRows& rows, std::int64_t index) {
    if (rows.empty() || rows.front().index > index) return -1;
    std::size_t lo = 0, hi = rows.size();
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (rows[mid].index <= index)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<std::ptrdiff_t>(lo);
}

} // namespace detail

/// Fold one sample localized at grid index j_star into S, in place.
///
/// Decompressed effect: s(i) gains 1 at every i >= j_star whose count had not
/// yet reached the per-radius budget N; counts already at N stay at N. After
/// the fold, rows past the first row that reached N are dropped (those radii
/// ignore every later sample). Returns the number of rows structurally
/// inserted, the data-processing measure behind update_count.
///
/// The engine keeps S zero-suppressed: indices below the first row are an
/// implicit zero, so every stored count is >= 1 and, counts being strictly
/// increasing, the row count can never exceed N.
inline int apply_sample_update(SampleSizeMatrix& S, std::int64_t j_star, std::int64_t N) {
    if (j_star < 1) throw input_error("apply_sample_update: j_star must be >= 1");
    if (N < 1) throw input_error("apply_sample_update: N must be >= 1");
    RleRows& rows = S.rows;
    const std::ptrdiff_t anchor = detail::last_row_at_or_before(rows, j_star);
    if (anchor >= 0 && rows[static_cast<std::size_t>(anchor)].value >= N)
        return 0; // everything at or past j_star is saturated
    int writes = 0;
    std::ptrdiff_t first_bumped = anchor;
    if (anchor < 0 || rows[static_cast<std::size_t>(anchor)].index != j_star) {
        const std::int64_t base =
            anchor >= 0 ? rows[static_cast<std::size_t>(anchor)].value : 0;
        rows.insert(rows.begin() + anchor + 1, {j_star, base + 1});
        ++writes;
        first_bumped = anchor + 2;
    }
    for (std::size_t l = static_cast<std::size_t>(std::max<std::ptrdiff_t>(first_bumped, 0));
         l < rows.size(); ++l) {
        if (rows[l].value < N) ++rows[l].value;
    }
    if (rows.back().value >= N) {
        // Bisect to the first saturated row and drop everything behind it.
        std::size_t lo = 0, hi = rows.size() - 1;
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (rows[mid].value >= N)
                hi = mid;
            else
                lo = mid + 1;
        }
        rows.resize(lo + 1);
    }
    return writes;
}

/// Fold one violating sample localized at j_star into V, in place.
///
/// frozen_from is the smallest grid index whose sample budget was already
/// full before this draw (m + 1 when none), read off the sample-size state
/// prior to folding the draw; radii at or past it keep their recorded
/// violation counts forever. Decompressed effect: v(i) gains 1 exactly for
/// j_star <= i < frozen_from. Returns rows structurally inserted.
inline int apply_violation_update(ViolationMatrix& V, std::int64_t j_star,
                                  std::int64_t frozen_from, std::int64_t m) {
    if (m < 1) throw input_error("apply_violation_update: m must be >= 1");
    if (j_star < 1 || j_star > m)
        throw input_error("apply_violation_update: j_star out of range");
    if (frozen_from < 1 || frozen_from > m + 1)
        throw input_error("apply_violation_update: frozen boundary out of range");
    if (j_star >= frozen_from)
        throw internal_error(
            "apply_violation_update: sample localized inside the frozen region");
    RleRows& rows = V.rows;
    if (rows.empty()) rows.push_back({1, 0});
    int writes = 0;

    // One past the last row that may receive the bump.
    std::size_t active_end = rows.size();
    if (frozen_from <= m) {
        const std::ptrdiff_t bpos = detail::last_row_at_or_before(rows, frozen_from - 1);
        const std::int64_t boundary_value =
            bpos >= 0 ? rows[static_cast<std::size_t>(bpos)].value : 0;
        const bool boundary_present =
            bpos + 1 < static_cast<std::ptrdiff_t>(rows.size()) &&
            rows[static_cast<std::size_t>(bpos + 1)].index == frozen_from;
        if (!boundary_present) {
            // Split the straddling row so the frozen tail keeps its value.
            rows.insert(rows.begin() + bpos + 1, {frozen_from, boundary_value});
            ++writes;
        }
        active_end = static_cast<std::size_t>(bpos + 1);
    }

    const std::ptrdiff_t anchor = detail::last_row_at_or_before(rows, j_star);
    std::ptrdiff_t first_bumped = anchor;
    if (anchor < 0 || rows[static_cast<std::size_t>(anchor)].index != j_star) {
        const std::int64_t base =
            anchor >= 0 ? rows[static_cast<std::size_t>(anchor)].value : 0;
        rows.insert(rows.begin() + anchor + 1, {j_star, base + 1});
        ++writes;
        ++active_end;
        first_bumped = anchor + 2;
    }
    for (std::size_t l = static_cast<std::size_t>(std::max<std::ptrdiff_t>(first_bumped, 0));
         l < active_end; ++l)
        ++rows[l].value;

    // Canonical form: merge adjacent rows carrying equal values.
    std::size_t w = 1;
    for (std::size_t l = 1; l < rows.size(); ++l) {
        if (rows[l].value != rows[w - 1].value) rows[w++] = rows[l];
    }
    rows.resize(w);
    return writes;
}

/// Pure-value form of the sample-size fold.
inline SampleSizeMatrix update_sample_matrix(SampleSizeMatrix S, std::int64_t j_star,
                                             std::int64_t N) {
    apply_sample_update(S, j_star, N);
    return S;
}

/// Pure-value form of the violation fold; frozen_from = m + 1 expresses
/// "no radius saturated yet".
inline ViolationMatrix update_violation_matrix(ViolationMatrix V, std::int64_t j_star,
                                               std::int64_t frozen_from, std::int64_t m) {
    apply_violation_update(V, j_star, frozen_from, m);
    return V;
}

/// Overload deriving the frozen boundary from the sample-size state as it
/// stood before this draw was folded in.
inline ViolationMatrix update_violation_matrix(ViolationMatrix V,
                                               const SampleSizeMatrix& pre_update_S,
                                               std::int64_t j_star, std::int64_t N,
                                               std::int64_t m) {
    const std::int64_t frozen_from =
        (!pre_update_S.rows.empty() && pre_update_S.rows.back().value >= N)
            ? pre_update_S.rows.back().index
            : m + 1;
    apply_violation_update(V, j_star, frozen_from, m);
    return V;
}

/// One recorded draw, enough to replay the run from first principles.
struct AuditRecord {
    std::int64_t draw_index = 0;         // 1-based position in the draw sequence
    std::int64_t radius_index_drawn = 0; // grid index the draw was issued at
    double gauge = 0.0;
    std::int64_t j_star = 0;
    bool violated = false;
    friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

/// Per-radius outcome of one estimation run.
struct RunResult {
    RadiusGrid grid;
    std::vector<std::int64_t> violations_final;
    std::vector<double> estimates;       // 1 - violations/N
    std::vector<std::int64_t> per_radius_draws;
    std::int64_t total_draws = 0;
    double empirical_engp = 0.0;         // total_draws / N
    std::int64_t max_S_rows = 0;
    std::int64_t max_V_rows = 0;
    std::int64_t update_count = 0;       // structural row writes (see engine docs)
    std::uint64_t seed = 0;
};

/// Ground-truth recomputation of (s, v) from an audit log, straight from the
/// definitions: a draw counts for radius i iff j_star <= i and fewer than N
/// draws have counted for i so far; a counted violating draw bumps v(i).
/// Deliberately independent of the compressed updates; the engine's property
/// tests compare against this after every step.
class OracleAccumulator {
public:
    OracleAccumulator(std::int64_t m, std::int64_t N)
        : N_(N), s_(static_cast<std::size_t>(m), 0), v_(static_cast<std::size_t>(m), 0) {
        if (m < 1) throw input_error("OracleAccumulator: m must be >= 1");
        if (N < 1) throw input_error("OracleAccumulator: N must be >= 1");
    }

    void apply(const AuditRecord& rec) {
        if (rec.j_star < 1 || rec.j_star > static_cast<std::int64_t>(s_.size()))
            throw input_error("OracleAccumulator: j_star out of range");
        for (std::size_t i = static_cast<std::size_t>(rec.j_star - 1); i < s_.size(); ++i) {
            if (s_[i] < N_) {
                ++s_[i];
                if (rec.violated) ++v_[i];
            }
        }
    }

    const std::vector<std::int64_t>& sample_counts() const { return s_; }
    const std::vector<std::int64_t>& violation_counts() const { return v_; }

private:
    std::int64_t N_;
    std::vector<std::int64_t> s_;
    std::vector<std::int64_t> v_;
};

inline std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> oracle_state(
    std::span<const AuditRecord> log, const RadiusGrid& grid, std::int64_t N) {
    OracleAccumulator acc(grid.size(), N);
    for (const AuditRecord& rec : log) acc.apply(rec);
    return {acc.sample_counts(), acc.violation_counts()};
}

/// Sequential state machine for one sample-reuse run.
///
/// Draws are issued at the largest radius whose budget is incomplete; every
/// draw from B_{r_t} lands at some j* <= t, so the frontier only moves down
/// and the run terminates once every radius holds N equivalent samples.
///
/// The sampling radius depends only on S, never on violation outcomes, so
/// predicate evaluation could be batched or run concurrently as long as
/// results are folded in draw order; this implementation stays sequential.
/// RNG: one Philox substream per run, consumed in the order documented by
/// sample_uniform, which makes runs bit-reproducible per (config, seed).
class ReuseRun {
public:
    ReuseRun(UncertaintySet set, RadiusGrid grid, std::int64_t N,
             ViolationPredicate predicate, std::uint64_t seed, bool audit = false,
             std::uint64_t substream = 0)
        : set_(std::move(set)),
          grid_(std::move(grid)),
          N_(N),
          predicate_(std::move(predicate)),
          seed_(seed),
          rng_(seed, substream),
          audit_(audit) {
        if (N_ < 1) throw input_error("ReuseRun: N must be >= 1");
        if (grid_.radii.empty()) throw input_error("ReuseRun: empty grid");
        if (predicate_.dimension != set_.dimension())
            throw input_error("ReuseRun: predicate and uncertainty set dimensions differ");
        if (!predicate_.violated)
            throw input_error("ReuseRun: predicate evaluator missing");
        // S is zero-suppressed (no samples recorded yet); V records its
        // initial all-zero row, which counts as the first structural write.
        V_.rows = {{1, 0}};
        update_count_ = 1;
        per_radius_draws_.assign(static_cast<std::size_t>(grid_.size()), 0);
        max_S_rows_ = 0;
        max_V_rows_ = 1;
    }

    bool done() const {
        return S_.rows.size() == 1 && S_.rows.front().index == 1 &&
               S_.rows.front().value == N_;
    }

    /// Grid index the next draw will be issued at: the largest index whose
    /// accumulated count is still below N.
    std::int64_t sampling_index() const {
        if (done()) throw internal_error("sampling_index: run is complete");
        if (S_.rows.empty() || S_.rows.back().value < N_) return grid_.size();
        return S_.rows.back().index - 1;
    }

    void step() {
        const std::int64_t t = sampling_index();
        const double radius = grid_.radii[static_cast<std::size_t>(t - 1)];
        const std::vector<double> x = sample_uniform(set_, radius, rng_);
        const double g = gauge(set_, x);
        const std::optional<std::int64_t> located = radius_index(grid_, g);
        // A draw from B_{r_t} lies in B_{r_t}; gauge rounding can push the
        // located index one past t, never semantically.
        const std::int64_t j_star = located ? std::min(*located, t) : t;
        const bool violated = predicate_.violated(x);

        const std::int64_t frozen_from =
            (!S_.rows.empty() && S_.rows.back().value >= N_) ? S_.rows.back().index
                                                             : grid_.size() + 1;
        update_count_ += apply_sample_update(S_, j_star, N_);
        if (violated)
            update_count_ += apply_violation_update(V_, j_star, frozen_from, grid_.size());

        ++draws_;
        ++per_radius_draws_[static_cast<std::size_t>(t - 1)];
        max_S_rows_ = std::max<std::int64_t>(max_S_rows_,
                                             static_cast<std::int64_t>(S_.rows.size()));
        max_V_rows_ = std::max<std::int64_t>(max_V_rows_,
                                             static_cast<std::int64_t>(V_.rows.size()));
        if (audit_) log_.push_back({draws_, t, g, j_star, violated});
    }

    RunResult finish() {
        while (!done()) step();
        RunResult result;
        result.grid = grid_;
        result.violations_final = decompress(V_.rows, grid_.size());
        result.estimates.reserve(result.violations_final.size());
        for (std::int64_t v : result.violations_final)
            result.estimates.push_back(1.0 -
                                       static_cast<double>(v) / static_cast<double>(N_));
        result.per_radius_draws = per_radius_draws_;
        result.total_draws = draws_;
        result.empirical_engp = static_cast<double>(draws_) / static_cast<double>(N_);
        result.max_S_rows = max_S_rows_;
        result.max_V_rows = max_V_rows_;
        result.update_count = update_count_;
        result.seed = seed_;
        return result;
    }

    const SampleSizeMatrix& sample_sizes() const { return S_; }
    const ViolationMatrix& violations() const { return V_; }
    const std::vector<AuditRecord>& audit_log() const { return log_; }
    std::int64_t draws() const { return draws_; }
    std::int64_t sample_budget() const { return N_; }

private:
    UncertaintySet set_;
    RadiusGrid grid_;
    std::int64_t N_;
    ViolationPredicate predicate_;
    std::uint64_t seed_;
    PhiloxStream rng_;
    bool audit_;
    SampleSizeMatrix S_;
    ViolationMatrix V_;
    std::vector<AuditRecord> log_;
    std::vector<std::int64_t> per_radius_draws_;
    std::int64_t draws_ = 0;
    std::int64_t max_S_rows_ = 0;
    std::int64_t max_V_rows_ = 0;
    std::int64_t update_count_ = 0;
};

/// Sample-reuse estimation of the per-radius satisfaction proportions.
inline RunResult run(const UncertaintySet& set, const RadiusGrid& grid, std::int64_t N,
                     const ViolationPredicate& predicate, std::uint64_t seed,
                     bool audit = false) {
    ReuseRun engine(set, grid, N, predicate, seed, audit);
    return engine.finish();
}

/// Baseline: N independent draws at every radius. total_draws = m N exactly;
/// update_count = m N (one record update per draw, the cost the compressed
/// structure exists to avoid). Each radius has its own substream, so the
/// radii could be run in parallel without changing the output.
inline RunResult run_conventional(const UncertaintySet& set, const RadiusGrid& grid,
                                  std::int64_t N, const ViolationPredicate& predicate,
                                  std::uint64_t seed) {
    if (N < 1) throw input_error("run_conventional: N must be >= 1");
    if (predicate.dimension != set.dimension())
        throw input_error("run_conventional: predicate and set dimensions differ");
    if (!predicate.violated)
        throw input_error("run_conventional: predicate evaluator missing");
    const std::int64_t m = grid.size();
    RunResult result;
    result.grid = grid;
    result.violations_final.resize(static_cast<std::size_t>(m), 0);
    result.per_radius_draws.assign(static_cast<std::size_t>(m), N);
    for (std::int64_t i = 0; i < m; ++i) {
        PhiloxStream rng(seed, static_cast<std::uint64_t>(i) + 1);
        std::int64_t violations = 0;
        for (std::int64_t k = 0; k < N; ++k) {
            const std::vector<double> x =
                sample_uniform(set, grid.radii[static_cast<std::size_t>(i)], rng);
            if (predicate.violated(x)) ++violations;
        }
        result.violations_final[static_cast<std::size_t>(i)] = violations;
    }
    result.estimates.reserve(static_cast<std::size_t>(m));
    for (std::int64_t v : result.violations_final)
        result.estimates.push_back(1.0 - static_cast<double>(v) / static_cast<double>(N));
    result.total_draws = m * N;
    result.empirical_engp = static_cast<double>(m);
    result.max_S_rows = m;
    result.max_V_rows = m;
    result.update_count = m * N;
    result.seed = seed;
    return result;
}

/// Audit-log dump, one record per line:
/// draw_index radius_index_drawn gauge j_star violated
inline void write_audit_log(std::ostream& out, std::span<const AuditRecord> log) {
    char buf[40];
    for (const AuditRecord& rec : log) {
        std::snprintf(buf, sizeof(buf), "%.17g", rec.gauge);
        out << rec.draw_index << ' ' << rec.radius_index_drawn << ' ' << buf << ' '
            << rec.j_star << ' ' << (rec.violated ? 1 : 0) << '\n';
    }
}

} // namespace robcurve
