#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hdqcka {

// Fixed-alphabet string over {0, ..., d-1}.  All mutation paths validate the
// alphabet bound, so a constructed word is always well formed.
class QuditWord {
 public:
  QuditWord() : QuditWord(2) {}  // empty binary word, for record defaults
  explicit QuditWord(uint32_t d);
  QuditWord(uint32_t d, std::vector<uint16_t> symbols);
  static QuditWord zeros(uint32_t d, std::size_t n);

  uint32_t d() const { return d_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  uint16_t operator[](std::size_t i) const { return symbols_[i]; }

  void push_back(uint16_t symbol);
  void set(std::size_t i, uint16_t symbol);

  // Concatenation; both operands must share the alphabet size.
  void append(const QuditWord& other);

  // Sub-word at the given positions, in the order listed.
  QuditWord restrict_to(std::span<const uint64_t> indices) const;

  std::size_t nonzero_count() const;

  const std::vector<uint16_t>& symbols() const { return symbols_; }
  bool operator==(const QuditWord& other) const = default;

 private:
  uint32_t d_;
  std::vector<uint16_t> symbols_;
};

// Fraction of non-zero positions.  Empty words have no defined weight.
double relative_hamming_weight(const QuditWord& word);

// Position-wise sum mod d of one word per party (first word plus the rest).
// All words must share d and length.
QuditWord round_sums(const QuditWord& alice,
                     const std::vector<QuditWord>& bobs);

}  // namespace hdqcka
