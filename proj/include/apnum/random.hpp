#pragma once

#include <cstdint>
#include <random>

namespace apnum {

/// Seeded generator with platform-independent value mapping. The standard
/// distributions are implementation-defined, so uniform draws are derived
/// from the raw mt19937_64 stream directly; a given seed produces the same
/// sequence everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform index in [0, n). Modulo bias is irrelevant at these sizes.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace apnum
