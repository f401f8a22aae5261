#include "hdqcka/word.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hdqcka {

namespace {

void check_dimension(uint32_t d) {
  if (d < 2) throw std::invalid_argument("QuditWord: alphabet size d must be >= 2");
  if (d > 65535)
    throw std::invalid_argument("QuditWord: alphabet size d exceeds 65535");
}

}  // namespace

QuditWord::QuditWord(uint32_t d) : d_(d) { check_dimension(d); }

QuditWord::QuditWord(uint32_t d, std::vector<uint16_t> symbols)
    : d_(d), symbols_(std::move(symbols)) {
  check_dimension(d);
  for (uint16_t s : symbols_) {
    if (s >= d_)
      throw std::invalid_argument("QuditWord: symbol " + std::to_string(s) +
                                  " outside alphabet of size " +
                                  std::to_string(d_));
  }
}

QuditWord QuditWord::zeros(uint32_t d, std::size_t n) {
  QuditWord w(d);
  w.symbols_.assign(n, 0);
  return w;
}

void QuditWord::push_back(uint16_t symbol) {
  if (symbol >= d_)
    throw std::invalid_argument("QuditWord::push_back: symbol outside alphabet");
  symbols_.push_back(symbol);
}

void QuditWord::set(std::size_t i, uint16_t symbol) {
  if (i >= symbols_.size())
    throw std::out_of_range("QuditWord::set: index out of range");
  if (symbol >= d_)
    throw std::invalid_argument("QuditWord::set: symbol outside alphabet");
  symbols_[i] = symbol;
}

void QuditWord::append(const QuditWord& other) {
  if (other.d_ != d_)
    throw std::invalid_argument("QuditWord::append: alphabet size mismatch");
  symbols_.insert(symbols_.end(), other.symbols_.begin(), other.symbols_.end());
}

QuditWord QuditWord::restrict_to(std::span<const uint64_t> indices) const {
  QuditWord out(d_);
  out.symbols_.reserve(indices.size());
  for (uint64_t i : indices) {
    if (i >= symbols_.size())
      throw std::out_of_range("QuditWord::restrict_to: index out of range");
    out.symbols_.push_back(symbols_[i]);
  }
  return out;
}

std::size_t QuditWord::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(symbols_.begin(), symbols_.end(),
                    [](uint16_t s) { return s != 0; }));
}

double relative_hamming_weight(const QuditWord& word) {
  if (word.empty())
    throw std::invalid_argument(
        "relative_hamming_weight: undefined for the empty word");
  return static_cast<double>(word.nonzero_count()) /
         static_cast<double>(word.size());
}

QuditWord round_sums(const QuditWord& alice,
                     const std::vector<QuditWord>& bobs) {
  const uint32_t d = alice.d();
  for (const QuditWord& b : bobs) {
    if (b.d() != d)
      throw std::invalid_argument("round_sums: alphabet size mismatch");
    if (b.size() != alice.size())
      throw std::invalid_argument("round_sums: word length mismatch");
  }
  QuditWord out(d);
  std::vector<uint16_t> sums(alice.size());
  for (std::size_t i = 0; i < alice.size(); ++i) {
    uint64_t acc = alice[i];
    for (const QuditWord& b : bobs) acc += b[i];
    sums[i] = static_cast<uint16_t>(acc % d);
  }
  return QuditWord(d, std::move(sums));
}

}  // namespace hdqcka
