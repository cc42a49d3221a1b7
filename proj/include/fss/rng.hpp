#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fss {

// Deterministic 64-bit-seeded stream of uniform doubles. Every consumer owns
// one stream and draws from it in call order, so (seed, call sequence) fully
// determines the output on any platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // 53-bit uniform in [0, 1). The raw engine output is mapped explicitly so
  // values do not depend on the standard library's distribution internals.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi); returns lo when the interval is empty or degenerate.
  double uniform(double lo, double hi) {
    if (!(lo < hi)) return lo;
    double v = lo + unit() * (hi - lo);
    if (v >= hi) v = std::nextafter(hi, lo);
    return v;
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fss
