#include "hdqcka/hashing.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "hdqcka/rng.hpp"

#if defined(__x86_64__) && defined(__GNUC__)
#include <immintrin.h>
#define HDQCKA_X86_CLMUL 1
#endif

namespace hdqcka {

namespace mp = boost::multiprecision;

BitString::BitString(std::size_t bits)
    : bits_(bits), words_((bits + 63) / 64, 0) {}

bool BitString::get(std::size_t i) const {
  if (i >= bits_) throw std::out_of_range("BitString::get: index past end");
  return (words_[i / 64] >> (i % 64)) & 1u;
}

void BitString::set(std::size_t i, bool v) {
  if (i >= bits_) throw std::out_of_range("BitString::set: index past end");
  const uint64_t mask = uint64_t{1} << (i % 64);
  if (v) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

std::string BitString::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits_ + 3) / 4);
  for (std::size_t i = 0; i < (bits_ + 3) / 4; ++i) {
    const uint64_t w = words_[(4 * i) / 64];
    out.push_back(digits[(w >> ((4 * i) % 64)) & 0xF]);
  }
  return out;
}

bool BitString::operator==(const BitString& other) const {
  return bits_ == other.bits_ && words_ == other.words_;
}

namespace {

// (bit length of d^n - 1, whether d^n is a power of two)
std::pair<std::size_t, bool> value_space_bits(std::size_t n, uint32_t d) {
  if (d < 2) throw std::invalid_argument("value_space_bits: need d >= 2");
  if (n == 0) return {0, true};
  if ((d & (d - 1)) == 0) {
    const unsigned b = static_cast<unsigned>(__builtin_ctz(d));
    return {n * b, true};
  }
  const mp::cpp_int top = mp::pow(mp::cpp_int(d), static_cast<unsigned>(n));
  return {static_cast<std::size_t>(mp::msb(top - 1)) + 1, false};
}

}  // namespace

std::size_t encoded_bit_length(std::size_t n, uint32_t d) {
  return value_space_bits(n, d).first;
}

int64_t max_extractable_bits(std::size_t n, uint32_t d) {
  const auto [bits, exact] = value_space_bits(n, d);
  if (n == 0) return 0;
  // 2^(bits-1) < d^n <= 2^bits, with equality only in the power-of-two case.
  return exact ? static_cast<int64_t>(bits) : static_cast<int64_t>(bits) - 1;
}

BitString encode_base_d(const QuditWord& word) {
  const uint32_t d = word.d();
  const std::size_t n = word.size();
  BitString out(encoded_bit_length(n, d));
  if (n == 0) return out;

  if ((d & (d - 1)) == 0) {
    // Symbols pack directly: digit i occupies bits [(n-1-i)*b, (n-i)*b).
    const unsigned b = static_cast<unsigned>(__builtin_ctz(d));
    for (std::size_t i = 0; i < n; ++i) {
      const uint64_t sym = word[i];
      const std::size_t base = (n - 1 - i) * b;
      out.words()[base / 64] |= sym << (base % 64);
      if ((base % 64) + b > 64) {
        out.words()[base / 64 + 1] |= sym >> (64 - base % 64);
      }
    }
    return out;
  }

  // Horner in base d^k so the big-integer multiply runs once per k symbols.
  std::size_t k = 1;
  uint64_t mult = d;
  while (mult <= (uint64_t{1} << 63) / d) {
    mult *= d;
    ++k;
  }
  mp::cpp_int value = 0;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t len = std::min(k, n - i);
    uint64_t chunk = 0;
    uint64_t chunk_mult = 1;
    for (std::size_t j = 0; j < len; ++j) {
      chunk = chunk * d + word[i + j];
      chunk_mult *= d;
    }
    value = value * chunk_mult + chunk;
    i += len;
  }

  std::vector<uint64_t> limbs;
  mp::export_bits(value, std::back_inserter(limbs), 64, false);
  if (limbs.size() > out.words().size()) {
    throw std::logic_error("encode_base_d: value exceeds declared bit length");
  }
  std::copy(limbs.begin(), limbs.end(), out.words().begin());
  return out;
}

namespace {

struct Product64 {
  uint64_t lo;
  uint64_t hi;
};

// Carryless 64x64 multiply, 4-bit window version.  Portable baseline for
// machines without a carryless multiply instruction.
Product64 clmul64_soft(uint64_t a, uint64_t b) {
  uint64_t tab_lo[16];
  uint64_t tab_hi[16];
  tab_lo[0] = 0;
  tab_hi[0] = 0;
  for (int bit = 0; bit < 4; ++bit) {
    const uint64_t lo = b << bit;
    const uint64_t hi = bit == 0 ? 0 : b >> (64 - bit);
    const int step = 1 << bit;
    for (int j = 0; j < step; ++j) {
      tab_lo[step + j] = tab_lo[j] ^ lo;
      tab_hi[step + j] = tab_hi[j] ^ hi;
    }
  }
  Product64 r{0, 0};
  for (int k = 15; k >= 0; --k) {
    const unsigned nib = (a >> (4 * k)) & 0xF;
    const int s = 4 * k;
    if (s == 0) {
      r.lo ^= tab_lo[nib];
      r.hi ^= tab_hi[nib];
    } else {
      r.lo ^= tab_lo[nib] << s;
      r.hi ^= (tab_hi[nib] << s) | (tab_lo[nib] >> (64 - s));
    }
  }
  return r;
}

// XORs the carryless product of x and g into acc over product-word indices
// [w0, w1]; acc[0] corresponds to product word w0 and has one spill slot at
// the end.  Only word pairs that can land in the window are visited.
void conv_window_soft(const std::vector<uint64_t>& x,
                      const std::vector<uint64_t>& g, std::size_t w0,
                      std::size_t w1, std::vector<uint64_t>& acc) {
  const std::size_t nx = x.size();
  const std::size_t ng = g.size();
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t lo_sum = w0 > i + 1 ? w0 - 1 - i : 0;
    if (lo_sum >= ng || i > w1) continue;
    const std::size_t hi_sum = std::min(ng - 1, w1 - i);
    for (std::size_t j = lo_sum; j <= hi_sum; ++j) {
      const Product64 p = clmul64_soft(x[i], g[j]);
      const std::size_t s = i + j;
      if (s + 1 == w0) {
        acc[0] ^= p.hi;
      } else {
        acc[s - w0] ^= p.lo;
        acc[s - w0 + 1] ^= p.hi;
      }
    }
  }
}

#if defined(HDQCKA_X86_CLMUL)
__attribute__((target("pclmul")))
void conv_window_clmul(const std::vector<uint64_t>& x,
                       const std::vector<uint64_t>& g, std::size_t w0,
                       std::size_t w1, std::vector<uint64_t>& acc) {
  const std::size_t nx = x.size();
  const std::size_t ng = g.size();
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t lo_sum = w0 > i + 1 ? w0 - 1 - i : 0;
    if (lo_sum >= ng || i > w1) continue;
    const std::size_t hi_sum = std::min(ng - 1, w1 - i);
    const __m128i vx = _mm_set_epi64x(0, static_cast<long long>(x[i]));
    for (std::size_t j = lo_sum; j <= hi_sum; ++j) {
      const __m128i vg = _mm_set_epi64x(0, static_cast<long long>(g[j]));
      const __m128i p = _mm_clmulepi64_si128(vx, vg, 0x00);
      const uint64_t lo = static_cast<uint64_t>(_mm_cvtsi128_si64(p));
      const uint64_t hi = static_cast<uint64_t>(
          _mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)));
      const std::size_t s = i + j;
      if (s + 1 == w0) {
        acc[0] ^= hi;
      } else {
        acc[s - w0] ^= lo;
        acc[s - w0 + 1] ^= hi;
      }
    }
  }
}
#endif

bool clmul_available() {
#if defined(HDQCKA_X86_CLMUL)
  return __builtin_cpu_supports("pclmul");
#else
  return false;
#endif
}

constexpr uint8_t kMatrixDrawPurpose = 0x68;

std::vector<uint64_t> matrix_stream_words(std::size_t bits, uint64_t seed) {
  RngStream stream(seed, RngStream::label(kMatrixDrawPurpose, 0));
  std::vector<uint64_t> g((bits + 63) / 64);
  for (auto& w : g) w = stream.next_u64();
  if (bits % 64 != 0) {
    g.back() &= (uint64_t{1} << (bits % 64)) - 1;
  }
  return g;
}

BitString toeplitz_core(const BitString& x, std::size_t out_bits,
                        uint64_t seed, bool allow_hw) {
  if (x.empty()) throw std::invalid_argument("toeplitz_hash: empty input");
  BitString out(out_bits);
  if (out_bits == 0) return out;
  const std::size_t in_bits = x.size();

  // First column and first row of the Toeplitz matrix, flattened into one
  // diagonal-constant stream g, matrix entry (r, c) = g[r + in_bits - 1 - c].
  const std::vector<uint64_t> g =
      matrix_stream_words(in_bits + out_bits - 1, seed);

  // Output bit r is product bit in_bits - 1 + r of the carryless product.
  const std::size_t first_bit = in_bits - 1;
  const std::size_t w0 = first_bit / 64;
  const std::size_t w1 = (first_bit + out_bits - 1) / 64;
  std::vector<uint64_t> acc(w1 - w0 + 2, 0);
  if (allow_hw && clmul_available()) {
#if defined(HDQCKA_X86_CLMUL)
    conv_window_clmul(x.words(), g, w0, w1, acc);
#endif
  } else {
    conv_window_soft(x.words(), g, w0, w1, acc);
  }

  const std::size_t shift = first_bit % 64;
  for (std::size_t w = 0; w < out.words().size(); ++w) {
    uint64_t v = acc[w] >> shift;
    if (shift != 0 && w + 1 < acc.size()) {
      v |= acc[w + 1] << (64 - shift);
    }
    out.words()[w] = v;
  }
  if (out_bits % 64 != 0) {
    out.words().back() &= (uint64_t{1} << (out_bits % 64)) - 1;
  }
  return out;
}

}  // namespace

BitString toeplitz_hash(const BitString& x, std::size_t out_bits,
                        uint64_t seed) {
  return toeplitz_core(x, out_bits, seed, true);
}

BitString toeplitz_matrix_stream(std::size_t bits, uint64_t seed) {
  BitString out(bits);
  out.words() = matrix_stream_words(bits, seed);
  return out;
}

BitString detail::toeplitz_hash_portable(const BitString& x,
                                         std::size_t out_bits,
                                         uint64_t seed) {
  return toeplitz_core(x, out_bits, seed, false);
}

namespace {

struct Fnv1a {
  uint64_t h = 0xcbf29ce484222325ull;
  void mix(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ull;
    }
  }
};

}  // namespace

uint64_t content_digest(const BitString& x) {
  Fnv1a f;
  f.mix(x.size());
  for (uint64_t w : x.words()) f.mix(w);
  return f.h;
}

uint64_t content_digest(const QuditWord& w) {
  Fnv1a f;
  f.mix(w.d());
  f.mix(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) f.mix(w[i]);
  return f.h;
}

}  // namespace hdqcka
