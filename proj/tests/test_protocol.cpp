#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "hdqcka/finite_key.hpp"
#include "hdqcka/hashing.hpp"
#include "hdqcka/protocol.hpp"
#include "hdqcka/quantum.hpp"
#include "hdqcka/rng.hpp"
#include "hdqcka/sampling.hpp"
#include "hdqcka/word.hpp"

using hdqcka::Basis;
using hdqcka::BitString;
using hdqcka::content_digest;
using hdqcka::DepolarizedGhzSampler;
using hdqcka::ec_simulate;
using hdqcka::EcResult;
using hdqcka::estimate_qz;
using hdqcka::evaluate;
using hdqcka::kDefaultTestFraction;
using hdqcka::leak_ec_bound;
using hdqcka::max_extractable_bits;
using hdqcka::privacy_amplify;
using hdqcka::ProtocolParams;
using hdqcka::QuditWord;
using hdqcka::relative_hamming_weight;
using hdqcka::RngStream;
using hdqcka::round_sums;
using hdqcka::run_protocol;
using hdqcka::transcript_to_json;
using hdqcka::TranscriptRecord;

namespace {

ProtocolParams default_params(uint32_t d, uint32_t p, uint64_t total) {
  return ProtocolParams::with_test_fraction(d, p, total, kDefaultTestFraction,
                                            1e-36, 1e-12);
}

QuditWord random_word(uint32_t d, std::size_t n, RngStream& rng) {
  QuditWord w(d);
  for (std::size_t i = 0; i < n; ++i)
    w.push_back(static_cast<uint16_t>(rng.uniform_below(d)));
  return w;
}

}  // namespace

TEST_CASE("qz estimate takes the worst receiver") {
  const QuditWord alice(3, {0, 1, 2, 0});
  const std::vector<QuditWord> bobs{QuditWord(3, {0, 1, 2, 1}),
                                    QuditWord(3, {1, 1, 2, 0}),
                                    QuditWord(3, {1, 0, 2, 0})};
  CHECK(estimate_qz(alice, bobs) == doctest::Approx(0.5));
  CHECK(estimate_qz(alice, {alice}) == 0.0);
  CHECK_THROWS_AS(estimate_qz(alice, {}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_qz(alice, {QuditWord(3, {0, 1})}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_qz(QuditWord(3), {QuditWord(3)}),
                  std::invalid_argument);
}

TEST_CASE("qz estimate tracks the channel disagreement rate") {
  const uint32_t d = 3;
  const double q = 0.3;
  const DepolarizedGhzSampler sampler(d, 1, q);
  RngStream rng(5150, 0);
  const std::size_t rounds = 100000;
  QuditWord alice(d);
  QuditWord bob(d);
  std::vector<uint16_t> buf;
  for (std::size_t i = 0; i < rounds; ++i) {
    sampler.sample(Basis::kComputational, rng, buf);
    alice.push_back(buf[0]);
    bob.push_back(buf[1]);
  }
  const double est = estimate_qz(alice, {bob});
  const double expected = q * (1.0 - 1.0 / d);  // 0.2
  const double sigma = std::sqrt(expected * (1.0 - expected) / rounds);
  CHECK(std::abs(est - expected) <= 3.0 * sigma);
}

TEST_CASE("privacy amplification basics") {
  RngStream rng(11, 1);
  const QuditWord key = random_word(3, 50, rng);
  const int64_t cap = max_extractable_bits(50, 3);

  const BitString out = privacy_amplify(key, 40, 987654321);
  CHECK(out.size() == 40);
  CHECK(out == privacy_amplify(key, 40, 987654321));
  CHECK_FALSE(out == privacy_amplify(key, 40, 987654322));

  CHECK(privacy_amplify(key, 0, 1).empty());
  CHECK(privacy_amplify(key, cap, 1).size() ==
        static_cast<std::size_t>(cap));
  CHECK_THROWS_AS(privacy_amplify(key, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(privacy_amplify(key, cap + 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(privacy_amplify(QuditWord(3), 1, 1), std::invalid_argument);
}

TEST_CASE("privacy amplification collision rate is two-universal") {
  RngStream rng(600613, 2);
  const QuditWord a = random_word(3, 40, rng);
  QuditWord b = a;
  b.set(7, static_cast<uint16_t>((b[7] + 1) % 3));
  const std::size_t trials = 1000000;
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const uint64_t seed = rng.next_u64();
    if (privacy_amplify(a, 16, seed) == privacy_amplify(b, 16, seed))
      ++collisions;
  }
  const double p = std::exp2(-16.0);
  const double sigma = std::sqrt(p * (1.0 - p) / trials);
  CHECK(static_cast<double>(collisions) / trials <= p + 3.0 * sigma);
}

TEST_CASE("error correction simulation") {
  RngStream rng(31415, 3);
  const QuditWord alice = random_word(2, 60, rng);
  QuditWord noisy = alice;
  noisy.set(3, static_cast<uint16_t>(1 - noisy[3]));

  const EcResult res =
      ec_simulate(alice, {noisy, alice}, 123.5, std::exp2(-10.0), rng);
  CHECK(res.digest_bits == 10);
  CHECK(res.charged_leak_bits == 123.5);
  CHECK(res.digest_ok);
  REQUIRE(res.corrected.size() == 2);
  CHECK(res.corrected[0] == alice);
  CHECK(res.corrected[1] == alice);

  const EcResult strict = ec_simulate(alice, {alice}, 0.0, 1e-12, rng);
  CHECK(strict.digest_bits == 40);
  CHECK(strict.digest_ok);

  // Hashing the uncorrected keys almost always exposes the mismatch.
  std::size_t false_accepts = 0;
  const std::size_t trials = 1000000;
  for (std::size_t i = 0; i < trials; ++i) {
    const EcResult pre = ec_simulate(alice, {noisy}, 0.0, std::exp2(-10.0),
                                     rng, true);
    false_accepts += pre.digest_ok;
  }
  // Collisions occur at the two-universal rate 2^-10.
  const double p = std::exp2(-10.0);
  const double sigma = std::sqrt(p * (1.0 - p) / trials);
  const double freq = static_cast<double>(false_accepts) / trials;
  CHECK(freq <= p + 3.0 * sigma);
  CHECK(freq >= p - 3.0 * sigma);
}

TEST_CASE("protocol rejects invalid configurations") {
  CHECK_THROWS_AS(run_protocol(default_params(2, 1, 1000), -0.1, 1),
                  std::domain_error);
  CHECK_THROWS_AS(run_protocol(default_params(2, 1, 1000), 1.1, 1),
                  std::domain_error);
  ProtocolParams broken = default_params(2, 1, 1000);
  broken.test_rounds = 0;
  CHECK_THROWS_AS(run_protocol(broken, 0.1, 1), std::invalid_argument);
}

TEST_CASE("runs are deterministic in the seed") {
  const auto params = default_params(3, 2, 20000);
  const TranscriptRecord r1 = run_protocol(params, 0.05, 424242);
  const TranscriptRecord r2 = run_protocol(params, 0.05, 424242);
  const std::string j1 = transcript_to_json(r1, true, 2);
  const std::string j2 = transcript_to_json(r2, true, 2);
  CHECK(j1 == j2);

  const TranscriptRecord r3 = run_protocol(params, 0.05, 424243);
  CHECK(transcript_to_json(r3, true, 2) != j1);
  CHECK(r3.fourier_subset != r1.fourier_subset);
}

TEST_CASE("undersized blocks abort before producing key material") {
  // At one thousand rounds the statistical corrections exceed every
  // entropy budget, so all parameter points abort identically.
  for (uint32_t d : {2u, 3u, 4u}) {
    for (uint32_t p : {1u, 2u, 3u}) {
      for (uint64_t seed : {1ull, 7ull, 1234ull}) {
        CAPTURE(d);
        CAPTURE(p);
        CAPTURE(seed);
        const TranscriptRecord rec =
            run_protocol(default_params(d, p, 1000), 0.0, seed);
        CHECK(rec.aborted);
        CHECK(rec.abort_reason == "no extractable key");
        CHECK(rec.report.w_s == 0.0);
        CHECK(rec.report.q_z == 0.0);
        CHECK(rec.report.ell == 0);
        CHECK(rec.final_keys.empty());
        CHECK(rec.key_digests.empty());
        // Raw keys are recorded and already identical without noise.
        REQUIRE(rec.raw_key_digests.size() == p + 1);
        for (uint64_t digest : rec.raw_key_digests)
          CHECK(digest == rec.raw_key_digests[0]);
      }
    }
  }
}

TEST_CASE("noiseless sessions at production size deliver identical keys") {
  const std::vector<std::tuple<uint32_t, uint32_t, int64_t>> pinned{
      {2, 1, 36271},  {2, 2, 35840},  {2, 3, 35591},
      {3, 1, 109859}, {3, 2, 109327}, {3, 3, 109020},
      {4, 1, 165570}, {4, 2, 164979}, {4, 3, 164638}};
  for (const auto& [d, p, ell] : pinned) {
    CAPTURE(d);
    CAPTURE(p);
    const TranscriptRecord rec =
        run_protocol(default_params(d, p, 200000), 0.0, 90210 + d * 10 + p);
    CHECK_FALSE(rec.aborted);
    CHECK(rec.report.w_s == 0.0);
    CHECK(rec.report.q_z == 0.0);
    CHECK(rec.report.ell == ell);
    CHECK(rec.digest_ok);
    REQUIRE(rec.final_keys.size() == p + 1);
    for (const BitString& key : rec.final_keys) {
      CHECK(key.size() == static_cast<std::size_t>(ell));
      CHECK(key == rec.final_keys[0]);
    }
    REQUIRE(rec.key_digests.size() == p + 1);
    for (uint64_t digest : rec.key_digests)
      CHECK(digest == content_digest(rec.final_keys[0]));
  }
}

TEST_CASE("recorded statistics are unbiased and internally consistent") {
  const auto params = default_params(2, 1, 100000);
  const double q = 0.10;
  double sum_ws = 0.0;
  double sum_qz = 0.0;
  const int seeds = 100;
  for (int seed = 1; seed <= seeds; ++seed) {
    const TranscriptRecord rec = run_protocol(params, q, seed);
    sum_ws += rec.report.w_s;
    sum_qz += rec.report.q_z;

    // The published report must be exactly the evaluation of the realized
    // statistics, and the leak exactly the bound at those statistics.
    const auto expected = evaluate(params, rec.report.w_s, rec.report.q_z);
    CHECK(rec.report.ell == expected.ell);
    CHECK(rec.report.leak_ec == expected.leak_ec);
    CHECK(rec.report.delta == expected.delta);
    CHECK(rec.report.leak_ec ==
          leak_ec_bound(params.key_rounds, params.d, rec.report.q_z,
                        rec.report.nu, params.epsilon_ec));
    // This block size is below threshold at 10% noise.
    CHECK(rec.aborted);
    CHECK(rec.report.ell == 0);
  }
  // Both statistics estimate q(1 - 1/d) = 0.05; the mean of 100 runs has
  // sigma ~ 2.7e-4, so 1e-3 is a comfortable 3.7-sigma band.
  CHECK(std::abs(sum_ws / seeds - 0.05) < 1e-3);
  CHECK(std::abs(sum_qz / seeds - 0.05) < 1e-3);
}

TEST_CASE("saturated noise aborts") {
  const TranscriptRecord rec = run_protocol(default_params(2, 1, 10000), 1.0,
                                            555);
  CHECK(rec.aborted);
  CHECK(rec.abort_reason == "no extractable key");
  CHECK(rec.report.w_s > 0.3);
}

TEST_CASE("transcript json round trip") {
  const auto params = default_params(3, 2, 200000);
  const TranscriptRecord rec = run_protocol(params, 0.0, 777);
  REQUIRE_FALSE(rec.aborted);

  const nlohmann::json doc = nlohmann::json::parse(transcript_to_json(rec));
  CHECK(doc.at("schema") == "hdqcka-transcript");
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("seed") == 777);
  CHECK(doc.at("params").at("d") == 3);
  CHECK(doc.at("params").at("p") == 2);
  CHECK(doc.at("params").at("N_total") == 200000);
  CHECK(doc.at("params").at("m") == params.test_rounds);
  CHECK(doc.at("params").at("n") == params.key_rounds);
  CHECK(doc.at("noise") == 0.0);
  CHECK(doc.at("aborted") == false);
  CHECK(doc.at("digest_ok") == true);
  CHECK(doc.at("ell") == rec.report.ell);
  CHECK(doc.at("w_s") == 0.0);
  CHECK(doc.at("encoding_slack_bits") == rec.encoding_slack_bits);
  CHECK(doc.contains("raw_key_digests"));
  CHECK(doc.contains("key_digests"));
  CHECK_FALSE(doc.contains("final_keys"));

  const auto fourier = doc.at("fourier_subset").get<std::vector<uint64_t>>();
  const auto estimation =
      doc.at("estimation_subset").get<std::vector<uint64_t>>();
  CHECK(fourier.size() == params.test_rounds);
  CHECK(estimation.size() == params.test_rounds);
  CHECK(std::is_sorted(fourier.begin(), fourier.end()));
  CHECK(std::is_sorted(estimation.begin(), estimation.end()));
  std::set<uint64_t> overlap;
  std::set_intersection(fourier.begin(), fourier.end(), estimation.begin(),
                        estimation.end(),
                        std::inserter(overlap, overlap.begin()));
  CHECK(overlap.empty());
  for (uint64_t idx : fourier) CHECK(idx < params.total_rounds);

  // Keys are embedded only on request.
  const nlohmann::json with_keys =
      nlohmann::json::parse(transcript_to_json(rec, true));
  REQUIRE(with_keys.contains("final_keys"));
  CHECK(with_keys.at("final_keys").size() == 3);
}

TEST_CASE("published fourier statistic matches the recorded outcomes") {
  const auto params = default_params(3, 2, 20000);
  const TranscriptRecord rec = run_protocol(params, 0.25, 31337);
  REQUIRE(rec.fourier_alice.size() == params.test_rounds);
  REQUIRE(rec.fourier_bobs.size() == 2);
  const QuditWord sums = round_sums(rec.fourier_alice, rec.fourier_bobs);
  CHECK(relative_hamming_weight(sums) == rec.report.w_s);
}

TEST_CASE("encoding slack stays below one bit") {
  for (const auto& [d, p] : std::vector<std::pair<uint32_t, uint32_t>>{
           {2, 1}, {3, 1}, {5, 2}}) {
    const TranscriptRecord rec =
        run_protocol(default_params(d, p, 200000), 0.0, 8);
    CAPTURE(d);
    CHECK(rec.encoding_slack_bits >= 0.0);
    CHECK(rec.encoding_slack_bits < 1.0);
    if ((d & (d - 1)) == 0) CHECK(rec.encoding_slack_bits == 0.0);
  }
}
