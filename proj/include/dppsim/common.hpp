#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dpp {

// Absolute slack used by every inequality assertion; absorbs float rounding.
inline constexpr double kSlack = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double v, double slack = 0.0) const {
        return v >= lo - slack && v <= hi + slack;
    }
    double clamp(double v) const {
        if (v < lo) return lo;
        if (v > hi) return hi;
        return v;
    }
    double width() const { return hi - lo; }
    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::domain_error(std::string("non-finite ") + what);
    }
}

// Error raised for unsupported model configurations (as opposed to bad
// per-call arguments, which use std::invalid_argument / std::domain_error).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Counter-based PRNG (splitmix64 finalizer).  Sample paths depend only on
// (seed, counter), so generated event sequences are portable and replayable.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    explicit CounterRng(std::uint64_t s = 0) : seed(s) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed + (++counter) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Uniform in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }
    // Uniform index in {0, ..., n-1}.
    std::size_t next_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("next_index: n == 0");
        return static_cast<std::size_t>(next_u64() % n);
    }
};

}  // namespace dpp
