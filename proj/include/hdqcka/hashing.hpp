#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdqcka/word.hpp"

namespace hdqcka {

// Packed bit vector, LSB-first within 64-bit words.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t bits);

  std::size_t size() const { return bits_; }
  bool empty() const { return bits_ == 0; }
  bool get(std::size_t i) const;
  void set(std::size_t i, bool v);

  const std::vector<uint64_t>& words() const { return words_; }
  std::vector<uint64_t>& words() { return words_; }

  std::string to_hex() const;  // low nibble first
  bool operator==(const BitString& other) const;

 private:
  std::size_t bits_ = 0;
  std::vector<uint64_t> words_;
};

// Number of bits in the canonical encoding of length-n words over a
// d-letter alphabet: the bit length of d^n - 1 (exact, never a floating
// approximation).
std::size_t encoded_bit_length(std::size_t n, uint32_t d);

// floor(n log2 d), computed exactly.  Upper limit on extractable bits.
int64_t max_extractable_bits(std::size_t n, uint32_t d);

// Injective map from a word to the bits of its value as a base-d natural
// number (first symbol most significant).  Output length is
// encoded_bit_length(word.size(), d); the image misses at most a 1-bit
// fraction of {0,1}^L because d^n is generally not a power of two.
BitString encode_base_d(const QuditWord& word);

// Two-universal hash: binary Toeplitz matrix applied to x, with matrix
// entries drawn from a counter-based stream keyed by `seed`.  For any two
// distinct inputs of equal length the outputs collide with probability
// exactly 2^-out_bits over the seed choice.
BitString toeplitz_hash(const BitString& x, std::size_t out_bits,
                        uint64_t seed);

// The diagonal-constant bit stream backing toeplitz_hash for a given seed;
// matrix entry (r, c) of an in_bits -> out_bits instance is
// g[r + in_bits - 1 - c].  Exposed so tests can apply the matrix
// definition directly.
BitString toeplitz_matrix_stream(std::size_t bits, uint64_t seed);

namespace detail {
// Table-driven fallback forced on, for cross-checking the carryless
// multiply hardware path.
BitString toeplitz_hash_portable(const BitString& x, std::size_t out_bits,
                                 uint64_t seed);
}  // namespace detail

// Stable 64-bit content digests (FNV-1a).  Used for transcript
// fingerprints, not for security decisions.
uint64_t content_digest(const BitString& x);
uint64_t content_digest(const QuditWord& w);

}  // namespace hdqcka
