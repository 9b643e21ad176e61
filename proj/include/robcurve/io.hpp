#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "robcurve/analysis.hpp"
#include "robcurve/engine.hpp"
#include "robcurve/errors.hpp"

namespace robcurve {

/// 17 significant digits: round-trips every double, makes output files
/// byte-comparable across runs.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + path);
    return out;
}

/// curve.csv: one row per grid point.
/// Header: radius,estimate,running_min,band_lower,band_upper,draws_at_radius
inline void write_curve_csv(const std::string& path, const RobustnessCurve& curve,
                            const RunResult& result) {
    std::ofstream out = open_output(path);
    out << "radius,estimate,running_min,band_lower,band_upper,draws_at_radius\n";
    for (std::size_t i = 0; i < curve.grid.radii.size(); ++i) {
        out << format_g17(curve.grid.radii[i]) << ',' << format_g17(curve.estimates[i])
            << ',' << format_g17(curve.running_min[i]) << ','
            << format_g17(curve.lower_at_node(i)) << ','
            << format_g17(curve.upper_at_node(i)) << ','
            << result.per_radius_draws[i] << '\n';
    }
}

/// band.csv: the piecewise band, one row per interval.
inline void write_band_csv(const std::string& path, const RobustnessCurve& curve) {
    std::ofstream out = open_output(path);
    out << "interval,r_lo,r_hi,lower_lo,lower_hi,upper_lo,upper_hi,slack\n";
    for (std::size_t i = 0; i < curve.bands.size(); ++i) {
        const IntervalBand& b = curve.bands[i];
        out << (i + 1) << ',' << format_g17(curve.grid.radii[i]) << ','
            << format_g17(curve.grid.radii[i + 1]) << ',' << format_g17(b.lower_lo) << ','
            << format_g17(b.lower_hi) << ',' << format_g17(b.upper_lo) << ','
            << format_g17(b.upper_hi) << ',' << format_g17(b.slack) << '\n';
    }
}

/// Flat key=value report, one pair per line.
class KeyValueWriter {
public:
    explicit KeyValueWriter(const std::string& path) : out_(open_output(path)) {}

    void put(const std::string& key, const std::string& value) {
        out_ << key << '=' << value << '\n';
    }
    void put(const std::string& key, double value) { put(key, format_g17(value)); }
    void put(const std::string& key, std::int64_t value) { put(key, std::to_string(value)); }
    void put(const std::string& key, std::uint64_t value) { put(key, std::to_string(value)); }

private:
    std::ofstream out_;
};

} // namespace robcurve
