#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdqcka/rng.hpp"
#include "hdqcka/word.hpp"

namespace hdqcka {

// Uniform sampling of m test positions out of N rounds, with acceptance
// tolerance delta on the observed-vs-unobserved weight gap.
struct SamplingStrategy {
  std::size_t total = 0;   // N
  std::size_t sample = 0;  // m
  double delta = 0.0;

  static SamplingStrategy create(std::size_t total, std::size_t sample,
                                 double delta);
};

// Draws uniformly random m-subsets of [0, population).  The backing
// permutation persists across draws; each draw is an independent uniform
// subset in O(m).
class SubsetSampler {
 public:
  explicit SubsetSampler(std::size_t population);

  void draw(std::size_t m, RngStream& rng, std::vector<uint64_t>& out);
  std::size_t population() const { return perm_.size(); }

 private:
  std::vector<uint64_t> perm_;
};

// True iff the per-round sums word has |w(sampled) - w(unsampled)| <= delta
// for the given test subset.  Indices are 0-based, must be distinct, and
// must leave a nonempty complement.
bool good_set_membership(const QuditWord& alice,
                         const std::vector<QuditWord>& bobs,
                         std::span<const uint64_t> subset, double delta);

// 2 exp(-delta^2 m N / (N + 2)): analytic cap on the probability that a
// uniform m-subset misestimates the unobserved weight by more than delta.
double epsilon_cl_bound(double delta, std::size_t m, std::size_t total);

// Tolerance that makes the estimate epsilon-sound for m sampled of m+n
// rounds: sqrt((m+n+2) ln(2/eps^2) / (m (m+n))).  Evaluated as
// ln 2 - 2 ln eps so tiny eps never underflows.
double delta_for_epsilon(std::size_t m, std::size_t n, double epsilon);

// Fraction of uniformly drawn subsets for which the fixed word tuple fails
// good_set_membership.  Restriction happens on the per-party words, so this
// exercises the full tuple-to-sums path.
double mc_failure_frequency(const QuditWord& alice,
                            const std::vector<QuditWord>& bobs,
                            const SamplingStrategy& strategy,
                            std::size_t trials, RngStream& rng);

// Same estimate computed on a precomputed sums word.  Equals
// mc_failure_frequency exactly for matching draws because restriction and
// per-round summing commute.
double mc_failure_frequency_weights(const QuditWord& sums,
                                    const SamplingStrategy& strategy,
                                    std::size_t trials, RngStream& rng);

// Fixed worst-case dealer words (receivers all-zero) used to probe the
// analytic bound: sums weights {0, 1/4, 1/2, 3/4, 1}, nonzero positions
// either clustered at the front or spread evenly.
struct AdversarialWord {
  std::string label;
  QuditWord alice;
};

std::vector<AdversarialWord> adversarial_word_family(uint32_t d,
                                                     std::size_t total);

}  // namespace hdqcka
