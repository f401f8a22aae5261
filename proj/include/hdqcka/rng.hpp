#pragma once

#include <array>
#include <cstdint>

namespace hdqcka {

// Raw Philox4x32-10 block function (Salmon et al. counter-based generator).
// Exposed so tests can pin the published known-answer vectors.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Counter-based stream of pseudo-random draws.  The 64-bit seed keys the
// generator; the 64-bit stream label selects a disjoint counter region, so
// any two streams with distinct labels never share a draw.  Everything a
// run consumes is reproducible from (seed, label) alone.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream);

  // Purpose-tagged labels: high byte identifies the consumer, low 56 bits
  // index within it.  Keeps label allocation collision-free by construction.
  static uint64_t label(uint8_t purpose, uint64_t index);

  uint64_t next_u64();
  double uniform();                        // [0, 1), 53-bit resolution
  uint64_t uniform_below(uint64_t bound);  // unbiased over [0, bound), bound >= 1
  bool bernoulli(double prob);

 private:
  void refill();

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> ctr_;
  std::array<uint32_t, 4> block_{};
  int avail_ = 0;
};

}  // namespace hdqcka
