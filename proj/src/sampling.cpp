#include "hdqcka/sampling.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hdqcka {

namespace {

// Validates a 0-based test subset against population size N and returns a
// membership mask.
std::vector<uint8_t> subset_mask(std::span<const uint64_t> subset,
                                 std::size_t total) {
  if (subset.empty() || subset.size() >= total) {
    throw std::invalid_argument(
        "test subset must be nonempty with nonempty complement");
  }
  std::vector<uint8_t> mask(total, 0);
  for (uint64_t idx : subset) {
    if (idx >= total) throw std::out_of_range("test subset index past end");
    if (mask[idx]) throw std::invalid_argument("test subset index repeated");
    mask[idx] = 1;
  }
  return mask;
}

}  // namespace

SamplingStrategy SamplingStrategy::create(std::size_t total,
                                          std::size_t sample, double delta) {
  if (sample < 1 || sample > total / 2) {
    throw std::invalid_argument("SamplingStrategy: need 1 <= m <= N/2");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("SamplingStrategy: need delta > 0");
  }
  return SamplingStrategy{total, sample, delta};
}

SubsetSampler::SubsetSampler(std::size_t population) : perm_(population) {
  if (population == 0) {
    throw std::invalid_argument("SubsetSampler: empty population");
  }
  std::iota(perm_.begin(), perm_.end(), uint64_t{0});
}

void SubsetSampler::draw(std::size_t m, RngStream& rng,
                         std::vector<uint64_t>& out) {
  const std::size_t n = perm_.size();
  if (m == 0 || m > n) {
    throw std::invalid_argument("SubsetSampler: bad subset size");
  }
  // Partial Fisher-Yates; leftover disorder from earlier draws is harmless
  // since every prefix of a uniformly re-shuffled permutation is uniform.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.uniform_below(n - i);
    std::swap(perm_[i], perm_[j]);
  }
  out.assign(perm_.begin(), perm_.begin() + m);
}

bool good_set_membership(const QuditWord& alice,
                         const std::vector<QuditWord>& bobs,
                         std::span<const uint64_t> subset, double delta) {
  const QuditWord sums = round_sums(alice, bobs);
  const auto mask = subset_mask(subset, sums.size());

  std::size_t nz_sample = 0;
  std::size_t nz_total = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (sums[i] == 0) continue;
    ++nz_total;
    if (mask[i]) ++nz_sample;
  }
  const double m = static_cast<double>(subset.size());
  const double rest = static_cast<double>(sums.size() - subset.size());
  const double w_sample = static_cast<double>(nz_sample) / m;
  const double w_rest = static_cast<double>(nz_total - nz_sample) / rest;
  return std::abs(w_sample - w_rest) <= delta;
}

double epsilon_cl_bound(double delta, std::size_t m, std::size_t total) {
  if (!(delta >= 0.0)) {
    throw std::invalid_argument("epsilon_cl_bound: need delta >= 0");
  }
  if (m < 1 || m > total) {
    throw std::invalid_argument("epsilon_cl_bound: need 1 <= m <= N");
  }
  const double n = static_cast<double>(total);
  return 2.0 * std::exp(-delta * delta * static_cast<double>(m) * n /
                        (n + 2.0));
}

double delta_for_epsilon(std::size_t m, std::size_t n, double epsilon) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("delta_for_epsilon: need m, n >= 1");
  }
  // Evaluated as ln 2 - 2 ln eps so denormal eps stays finite; eps up to
  // sqrt(2) is admitted so the zero of the bound is reachable, with the
  // clamp absorbing the rounding of ln at that endpoint.
  if (!(epsilon > 0.0) || epsilon > std::sqrt(2.0)) {
    throw std::domain_error(
        "delta_for_epsilon: need 0 < epsilon <= sqrt(2)");
  }
  const double log_term =
      std::max(0.0, std::log(2.0) - 2.0 * std::log(epsilon));
  const double md = static_cast<double>(m);
  const double pop = md + static_cast<double>(n);
  return std::sqrt((pop + 2.0) * log_term / (md * pop));
}

namespace {

template <typename FailureFn>
double mc_frequency(std::size_t total, std::size_t sample, std::size_t trials,
                    RngStream& rng, FailureFn&& fails) {
  if (trials < 1) {
    throw std::invalid_argument("mc failure frequency: need trials >= 1");
  }
  SubsetSampler sampler(total);
  std::vector<uint64_t> subset;
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    sampler.draw(sample, rng, subset);
    if (fails(subset)) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace

double mc_failure_frequency(const QuditWord& alice,
                            const std::vector<QuditWord>& bobs,
                            const SamplingStrategy& strategy,
                            std::size_t trials, RngStream& rng) {
  if (alice.size() != strategy.total) {
    throw std::invalid_argument("mc_failure_frequency: word length != N");
  }
  return mc_frequency(
      strategy.total, strategy.sample, trials, rng,
      [&](const std::vector<uint64_t>& subset) {
        return !good_set_membership(alice, bobs, subset, strategy.delta);
      });
}

double mc_failure_frequency_weights(const QuditWord& sums,
                                    const SamplingStrategy& strategy,
                                    std::size_t trials, RngStream& rng) {
  if (sums.size() != strategy.total) {
    throw std::invalid_argument(
        "mc_failure_frequency_weights: word length != N");
  }
  std::vector<uint8_t> nonzero(sums.size());
  std::size_t nz_total = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    nonzero[i] = sums[i] != 0;
    nz_total += nonzero[i];
  }
  const double m = static_cast<double>(strategy.sample);
  const double rest = static_cast<double>(strategy.total - strategy.sample);
  return mc_frequency(strategy.total, strategy.sample, trials, rng,
                      [&](const std::vector<uint64_t>& subset) {
                        std::size_t nz_sample = 0;
                        for (uint64_t idx : subset) nz_sample += nonzero[idx];
                        const double w_sample =
                            static_cast<double>(nz_sample) / m;
                        const double w_rest =
                            static_cast<double>(nz_total - nz_sample) / rest;
                        return std::abs(w_sample - w_rest) > strategy.delta;
                      });
}

std::vector<AdversarialWord> adversarial_word_family(uint32_t d,
                                                     std::size_t total) {
  if (total < 4) {
    throw std::invalid_argument("adversarial_word_family: need N >= 4");
  }
  const std::size_t quarters[] = {0, total / 4, total / 2, 3 * total / 4,
                                  total};
  const char* names[] = {"0", "1/4", "1/2", "3/4", "1"};
  std::vector<AdversarialWord> family;
  for (int wi = 0; wi < 5; ++wi) {
    const std::size_t count = quarters[wi];
    QuditWord clustered = QuditWord::zeros(d, total);
    for (std::size_t i = 0; i < count; ++i) clustered.set(i, 1);
    family.push_back({std::string("w=") + names[wi] + " clustered",
                      std::move(clustered)});
    if (count == 0 || count == total) continue;  // spread variant identical
    QuditWord spread = QuditWord::zeros(d, total);
    // count positions at indices floor(i*N/count), strictly increasing.
    for (std::size_t i = 0; i < count; ++i) {
      spread.set(i * total / count, 1);
    }
    family.push_back(
        {std::string("w=") + names[wi] + " spread", std::move(spread)});
  }
  return family;
}

}  // namespace hdqcka
