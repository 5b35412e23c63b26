#pragma once

#include <cstdint>

namespace qvl {

/// Seeded splitmix64 generator. Used everywhere randomness is needed so that
/// runs are reproducible bit-for-bit across platforms and standard-library
/// versions (std:: distributions are implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int integer(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

}  // namespace qvl
