#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hardy {

// Engine keyed by (seed, stream): independent batches draw from distinct
// streams so results do not depend on scheduling. Conversions are done here
// rather than through std distributions, whose output is implementation
// defined.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x68617264u};
    engine_.seed(seq);
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hardy
