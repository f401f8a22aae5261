#include "hdqcka/rng.hpp"

#include <stdexcept>

namespace hdqcka {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t prod = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(prod >> 32);
  lo = static_cast<uint32_t>(prod);
}

inline std::array<uint32_t, 4> philox_round(const std::array<uint32_t, 4>& x,
                                            const std::array<uint32_t, 2>& k) {
  uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, x[0], hi0, lo0);
  mulhilo(kMul1, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    counter = philox_round(counter, key);
    if (r < 9) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
  }
  return counter;
}

RngStream::RngStream(uint64_t seed, uint64_t stream) {
  key_ = {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
  // ctr_[0..1]: per-stream draw counter; ctr_[2..3]: stream label.
  ctr_ = {0, 0, static_cast<uint32_t>(stream),
          static_cast<uint32_t>(stream >> 32)};
}

uint64_t RngStream::label(uint8_t purpose, uint64_t index) {
  if (index >> 56)
    throw std::invalid_argument("RngStream::label: index exceeds 56 bits");
  return (static_cast<uint64_t>(purpose) << 56) | index;
}

void RngStream::refill() {
  block_ = philox4x32(ctr_, key_);
  if (++ctr_[0] == 0) ++ctr_[1];
  avail_ = 2;
}

uint64_t RngStream::next_u64() {
  if (avail_ == 0) refill();
  --avail_;
  int base = avail_ == 1 ? 0 : 2;
  return static_cast<uint64_t>(block_[base]) |
         (static_cast<uint64_t>(block_[base + 1]) << 32);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::uniform_below(uint64_t bound) {
  if (bound == 0)
    throw std::invalid_argument("RngStream::uniform_below: bound must be >= 1");
  if (bound == 1) return 0;
  // Mask rejection: unbiased, expected < 2 draws.
  int shift = __builtin_clzll(bound - 1);
  uint64_t mask = ~uint64_t{0} >> shift;
  uint64_t v;
  do {
    v = next_u64() & mask;
  } while (v >= bound);
  return v;
}

bool RngStream::bernoulli(double prob) {
  if (prob <= 0.0) return false;
  if (prob >= 1.0) return true;
  return uniform() < prob;
}

}  // namespace hdqcka
