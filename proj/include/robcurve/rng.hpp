#pragma once

#include <cmath>
#include <cstdint>

namespace robcurve {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace detail

/// Counter-based pseudo-random stream (Philox 2x64, 10 rounds).
///
/// A stream is identified by (seed, substream): the key is derived from both,
/// the counter starts at zero, so any number of independent substreams can be
/// split off one master seed without shared state. Identical (seed, substream)
/// always reproduces the identical sequence.
///
/// Draw order is part of the reproducibility contract; the samplers in
/// uncertainty.hpp document the exact per-sample consumption.
class PhiloxStream {
public:
    explicit PhiloxStream(std::uint64_t seed, std::uint64_t substream = 0)
        : key_(detail::splitmix64(detail::splitmix64(seed) + substream)) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::uint64_t x0 = counter_++;
        std::uint64_t x1 = 0;
        std::uint64_t k = key_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(kMultiplier) * x0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += kWeyl;
        }
        spare_ = x1;
        have_spare_ = true;
        return x0;
    }

    /// Uniform on the open interval (0,1); never returns an endpoint, so it is
    /// safe under log().
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    /// Uniform on (-1,1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per call
    /// (the sine partner is discarded to keep the per-draw budget fixed).
    double next_normal() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Exponential(1).
    double next_exponential() { return -std::log(next_unit()); }

    /// Fair sign bit.
    bool next_sign_bit() { return (next_u64() & 1u) != 0; }

private:
    static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

} // namespace robcurve
