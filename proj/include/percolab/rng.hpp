#pragma once

#include <cstdint>
#include <random>

namespace percolab {

// Seeded RNG with hand-rolled draw helpers.  std:: distributions are not
// pinned across standard libraries, so draws go through raw engine output to
// keep artifacts byte-reproducible for a given seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : bits() % n; }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform real in [0, 1).
    double real() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // Uniform real in [lo, hi).
    double real(double lo, double hi) { return lo + (hi - lo) * real(); }

  private:
    std::mt19937_64 eng_;
};

}  // namespace percolab
