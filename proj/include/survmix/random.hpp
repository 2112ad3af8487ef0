#pragma once

#include <cstdint>
#include <random>

#include "survmix/special.hpp"

namespace survmix {

// Deterministic random stream with substream support.
//
// Every consumer derives its own stream from (seed, tag_a, tag_b), e.g. one
// stream per bootstrap replicate or per EM restart. Streams with distinct
// tags are independent, so work items can be handed to threads in any order
// and still produce identical results; nothing ever shares a generator.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t tag_a = 0,
                        std::uint64_t tag_b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag_a),
                      static_cast<std::uint32_t>(tag_a >> 32),
                      static_cast<std::uint32_t>(tag_b),
                      static_cast<std::uint32_t>(tag_b >> 32)};
    engine_.seed(seq);
  }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset by half a
  // step so 0 and 1 are unreachable (safe to pass through log or quantile).
  double uniform() {
    const std::uint64_t x = engine_();
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via inverse CDF. Slower than ziggurat but consumes
  // exactly one engine draw per variate, which keeps substreams reproducible
  // under any refactoring of call order.
  double normal() { return std_normal_quantile(uniform()); }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Uniform index in [0, n) by 128-bit multiply-shift.
  std::size_t index(std::size_t n) {
    const std::uint64_t x = engine_();
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(x) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace survmix
