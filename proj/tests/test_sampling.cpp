#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "hdqcka/rng.hpp"
#include "hdqcka/sampling.hpp"
#include "hdqcka/word.hpp"

using hdqcka::adversarial_word_family;
using hdqcka::delta_for_epsilon;
using hdqcka::epsilon_cl_bound;
using hdqcka::good_set_membership;
using hdqcka::mc_failure_frequency;
using hdqcka::mc_failure_frequency_weights;
using hdqcka::QuditWord;
using hdqcka::RngStream;
using hdqcka::round_sums;
using hdqcka::SamplingStrategy;
using hdqcka::SubsetSampler;

namespace {

QuditWord random_word(uint32_t d, std::size_t n, RngStream& rng) {
  QuditWord w(d);
  for (std::size_t i = 0; i < n; ++i)
    w.push_back(static_cast<uint16_t>(rng.uniform_below(d)));
  return w;
}

}  // namespace

TEST_CASE("strategy validation") {
  CHECK_NOTHROW(SamplingStrategy::create(10, 5, 0.1));
  CHECK_NOTHROW(SamplingStrategy::create(10, 1, 0.1));
  CHECK_THROWS_AS(SamplingStrategy::create(10, 0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SamplingStrategy::create(10, 6, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SamplingStrategy::create(10, 5, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SamplingStrategy::create(10, 5, -0.2),
                  std::invalid_argument);
  const auto s = SamplingStrategy::create(100, 30, 0.25);
  CHECK(s.total == 100);
  CHECK(s.sample == 30);
  CHECK(s.delta == 0.25);
}

TEST_CASE("subset draws are distinct, in range, and pair-uniform") {
  SubsetSampler sampler(5);
  CHECK(sampler.population() == 5);
  RngStream rng(6021023, 0);
  std::vector<uint64_t> out;

  std::map<std::pair<uint64_t, uint64_t>, int> counts;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    sampler.draw(2, rng, out);
    REQUIRE(out.size() == 2);
    REQUIRE(out[0] < 5);
    REQUIRE(out[1] < 5);
    REQUIRE(out[0] != out[1]);
    auto key = std::minmax(out[0], out[1]);
    ++counts[key];
  }
  // 10 unordered pairs, each with probability 1/10.
  REQUIRE(counts.size() == 10);
  const double expected = draws / 10.0;
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (const auto& [pair, count] : counts)
    CHECK(std::abs(count - expected) <= 5.0 * sigma);

  sampler.draw(5, rng, out);
  std::set<uint64_t> all(out.begin(), out.end());
  CHECK(all.size() == 5);
  CHECK_THROWS_AS(sampler.draw(6, rng, out), std::invalid_argument);
  CHECK_THROWS_AS(sampler.draw(0, rng, out), std::invalid_argument);
}

TEST_CASE("good set membership on hand-checked cases") {
  // Sums word (1,1,0,0): sampling {0,1} sees weight 1, leaves weight 0.
  QuditWord alice(2, {1, 0, 1, 0});
  std::vector<QuditWord> bobs{QuditWord(2, {0, 1, 1, 0})};
  const std::vector<uint64_t> t01{0, 1};
  CHECK_FALSE(good_set_membership(alice, bobs, t01, 0.5));
  CHECK(good_set_membership(alice, bobs, t01, 1.0));
  const std::vector<uint64_t> t02{0, 2};
  // Sampled weight 1/2, unsampled weight 1/2: gap 0.
  CHECK(good_set_membership(alice, bobs, t02, 0.5));

  // All-zero rounds are good for every delta.
  std::vector<QuditWord> bz{QuditWord::zeros(3, 6)};
  CHECK(good_set_membership(QuditWord::zeros(3, 6), bz,
                            std::vector<uint64_t>{1, 3}, 1e-9));

  // Duplicates, out-of-range, empty, and full subsets are rejected.
  CHECK_THROWS_AS(good_set_membership(alice, bobs,
                                      std::vector<uint64_t>{1, 1}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(good_set_membership(alice, bobs,
                                      std::vector<uint64_t>{4}, 0.5),
                  std::out_of_range);
  CHECK_THROWS_AS(good_set_membership(alice, bobs,
                                      std::vector<uint64_t>{}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(good_set_membership(alice, bobs,
                                      std::vector<uint64_t>{0, 1, 2, 3}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("analytic bound and tolerance formulas at pinned points") {
  CHECK(epsilon_cl_bound(0.05, 7000, 100000) ==
        doctest::Approx(5.0237562833646797e-8).epsilon(1e-14));
  CHECK(delta_for_epsilon(70000, 930000, 1e-36) ==
        doctest::Approx(0.048767613204239053).epsilon(1e-14));
  // m = n: sqrt((2m+2) ln(2/eps^2) / (2 m^2)).
  CHECK(delta_for_epsilon(100, 100, 1e-6) ==
        doctest::Approx(0.53485895317787641).epsilon(1e-14));
  // eps = sqrt(2) zeroes the log term.
  CHECK(delta_for_epsilon(100, 100, std::sqrt(2.0)) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK_THROWS_AS(delta_for_epsilon(100, 100, 1.5), std::domain_error);
  CHECK_THROWS_AS(delta_for_epsilon(100, 100, 0.0), std::domain_error);
  CHECK_THROWS_AS(delta_for_epsilon(0, 100, 0.1), std::invalid_argument);

  // Monotone: more samples or a larger population tightens the tolerance.
  double prev = delta_for_epsilon(100, 10000, 1e-9);
  for (std::size_t m : {200u, 400u, 1000u, 5000u}) {
    const double cur = delta_for_epsilon(m, 10000, 1e-9);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(delta_for_epsilon(500, 20000, 1e-9) <
        delta_for_epsilon(500, 5000, 1e-9));

  // The failure bound shrinks with delta, m, and N.
  CHECK(epsilon_cl_bound(0.1, 1000, 10000) <
        epsilon_cl_bound(0.05, 1000, 10000));
  CHECK(epsilon_cl_bound(0.05, 2000, 10000) <
        epsilon_cl_bound(0.05, 1000, 10000));
}

TEST_CASE("monte carlo failure frequency edge cases") {
  RngStream rng(31337, 1);
  const auto strategy = SamplingStrategy::create(50, 10, 0.2);
  // All-zero words never fail.
  const QuditWord zeros = QuditWord::zeros(2, 50);
  CHECK(mc_failure_frequency(zeros, {zeros}, strategy, 500, rng) == 0.0);
  // delta >= 1 can never be exceeded by a weight gap.
  const auto lax = SamplingStrategy::create(50, 10, 1.0);
  const QuditWord mixed = random_word(2, 50, rng);
  CHECK(mc_failure_frequency(mixed, {zeros}, lax, 500, rng) == 0.0);
  CHECK_THROWS_AS(mc_failure_frequency(zeros, {zeros}, strategy, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("tuple route and precomputed-sums route agree draw for draw") {
  RngStream words_rng(5550123, 2);
  const std::size_t n = 100;
  const QuditWord alice = random_word(3, n, words_rng);
  const std::vector<QuditWord> bobs{random_word(3, n, words_rng),
                                    random_word(3, n, words_rng)};
  const QuditWord sums = round_sums(alice, bobs);
  const auto strategy = SamplingStrategy::create(n, 30, 0.2);

  RngStream rng_a(98001, 3);
  RngStream rng_b(98001, 3);
  const std::size_t trials = 2000;
  const double f1 = mc_failure_frequency(alice, bobs, strategy, trials, rng_a);
  const double f2 =
      mc_failure_frequency_weights(sums, strategy, trials, rng_b);
  CHECK(f1 == f2);
}

TEST_CASE("observed failure frequency never beats the analytic bound") {
  const std::size_t total = 200;
  const std::size_t m = 100;
  const std::size_t trials = 100000;
  const auto family = adversarial_word_family(2, total);
  REQUIRE(family.size() == 8);
  const std::vector<QuditWord> bobs{QuditWord::zeros(2, total)};
  uint64_t stream = 0;
  for (double delta : {0.05, 0.1}) {
    const auto strategy = SamplingStrategy::create(total, m, delta);
    const double bound = epsilon_cl_bound(delta, m, total);
    for (const auto& adversary : family) {
      CAPTURE(delta);
      CAPTURE(adversary.label);
      RngStream rng(7777, stream++);
      const double freq =
          mc_failure_frequency(adversary.alice, bobs, strategy, trials, rng);
      const double sigma = std::sqrt(std::max(freq * (1.0 - freq),
                                              1.0 / trials) /
                                     trials);
      CHECK(freq <= bound + 3.0 * sigma);
    }
  }
}

TEST_CASE("adversarial family structure") {
  const auto family = adversarial_word_family(3, 200);
  REQUIRE(family.size() == 8);
  std::multiset<std::size_t> weights;
  std::set<std::string> labels;
  for (const auto& w : family) {
    CHECK(w.alice.d() == 3);
    CHECK(w.alice.size() == 200);
    weights.insert(w.alice.nonzero_count());
    CHECK(labels.insert(w.label).second);
  }
  // Weights 0 and 1 appear once, interior weights once per layout.
  CHECK(weights == std::multiset<std::size_t>{0, 50, 50, 100, 100, 150, 150,
                                              200});
}
