#include "hdqcka/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

#include "hdqcka/quantum.hpp"
#include "hdqcka/sampling.hpp"

namespace hdqcka {

namespace {

// Stream labels; one RNG stream per concern so draws never interleave.
constexpr uint8_t kRoundPurpose = 0x01;   // index = round number
constexpr uint8_t kSubsetPurpose = 0x02;
constexpr uint8_t kEcPurpose = 0x03;
constexpr uint8_t kPaPurpose = 0x04;

void check_same_shape(const QuditWord& alice,
                      const std::vector<QuditWord>& bobs, const char* what) {
  if (alice.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty dealer word");
  }
  if (bobs.empty()) {
    throw std::invalid_argument(std::string(what) + ": no receivers");
  }
  for (const auto& b : bobs) {
    if (b.d() != alice.d() || b.size() != alice.size()) {
      throw std::invalid_argument(std::string(what) +
                                  ": receiver word shape mismatch");
    }
  }
}

uint32_t digest_width_bits(double epsilon_ec) {
  return static_cast<uint32_t>(
      std::max(1.0, std::ceil(-std::log2(epsilon_ec))));
}

}  // namespace

double estimate_qz(const QuditWord& alice,
                   const std::vector<QuditWord>& bobs) {
  check_same_shape(alice, bobs, "estimate_qz");
  double worst = 0.0;
  for (const auto& b : bobs) {
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < alice.size(); ++i) {
      mismatches += alice[i] != b[i];
    }
    worst = std::max(
        worst, static_cast<double>(mismatches) /
                   static_cast<double>(alice.size()));
  }
  return worst;
}

BitString privacy_amplify(const QuditWord& raw_key, int64_t ell,
                          uint64_t hash_seed) {
  if (ell < 0 || ell > max_extractable_bits(raw_key.size(), raw_key.d())) {
    throw std::invalid_argument(
        "privacy_amplify: need 0 <= ell <= floor(n log2 d)");
  }
  if (ell == 0) return BitString();
  return toeplitz_hash(encode_base_d(raw_key), static_cast<std::size_t>(ell),
                       hash_seed);
}

EcResult ec_simulate(const QuditWord& alice_key,
                     const std::vector<QuditWord>& bob_keys,
                     double charged_leak_bits, double epsilon_ec,
                     RngStream& rng, bool verify_precorrection) {
  check_same_shape(alice_key, bob_keys, "ec_simulate");
  if (!(epsilon_ec > 0.0 && epsilon_ec < 1.0)) {
    throw std::invalid_argument("ec_simulate: epsilon_ec in (0, 1)");
  }
  if (!(charged_leak_bits >= 0.0)) {
    throw std::invalid_argument("ec_simulate: negative leak charge");
  }
  EcResult res;
  res.charged_leak_bits = charged_leak_bits;
  res.digest_bits = digest_width_bits(epsilon_ec);
  res.corrected.assign(bob_keys.size(), alice_key);

  const uint64_t hash_seed = rng.next_u64();
  const BitString reference =
      toeplitz_hash(encode_base_d(alice_key), res.digest_bits, hash_seed);
  res.digest_ok = true;
  const auto& checked = verify_precorrection ? bob_keys : res.corrected;
  for (const auto& key : checked) {
    if (!(toeplitz_hash(encode_base_d(key), res.digest_bits, hash_seed) ==
          reference)) {
      res.digest_ok = false;
    }
  }
  return res;
}

TranscriptRecord run_protocol(const ProtocolParams& params, double q,
                              uint64_t seed) {
  // Re-derive through the factory so hand-assembled structs cannot bypass
  // the invariants.
  const ProtocolParams p = ProtocolParams::create(
      params.d, params.num_bobs, params.total_rounds, params.test_rounds,
      params.epsilon, params.epsilon_ec);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("run_protocol: noise in [0, 1]");
  }

  TranscriptRecord rec;
  rec.seed = seed;
  rec.params = p;
  rec.noise = q;

  const uint64_t total = p.total_rounds;
  const std::size_t m = static_cast<std::size_t>(p.test_rounds);

  // One Fisher-Yates prefix of length 2m: the first m form a uniform test
  // subset, the next m a uniform estimation subset of the remainder.
  RngStream subset_rng(seed, RngStream::label(kSubsetPurpose, 0));
  SubsetSampler sampler(total);
  std::vector<uint64_t> drawn;
  sampler.draw(2 * m, subset_rng, drawn);
  rec.fourier_subset.assign(drawn.begin(), drawn.begin() + m);
  rec.estimation_subset.assign(drawn.begin() + m, drawn.end());
  std::sort(rec.fourier_subset.begin(), rec.fourier_subset.end());
  std::sort(rec.estimation_subset.begin(), rec.estimation_subset.end());

  enum Role : uint8_t { kKey = 0, kFourier = 1, kEstimation = 2 };
  std::vector<uint8_t> role(total, kKey);
  for (uint64_t i : rec.fourier_subset) role[i] = kFourier;
  for (uint64_t i : rec.estimation_subset) role[i] = kEstimation;

  const uint32_t sites = p.num_bobs + 1;
  std::vector<uint16_t> alice_sym[3];
  std::vector<std::vector<uint16_t>> bob_sym[3];
  for (int r = 0; r < 3; ++r) {
    const std::size_t len =
        r == kKey ? static_cast<std::size_t>(p.key_rounds) : m;
    alice_sym[r].reserve(len);
    bob_sym[r].assign(p.num_bobs, {});
    for (auto& v : bob_sym[r]) v.reserve(len);
  }

  // Per-round RNG streams keyed by round index keep generation order-free.
  const DepolarizedGhzSampler ghz(p.d, p.num_bobs, q);
  std::vector<uint16_t> outcome(sites);
  for (uint64_t i = 0; i < total; ++i) {
    RngStream round_rng(seed, RngStream::label(kRoundPurpose, i));
    const uint8_t r = role[i];
    ghz.sample(r == kFourier ? Basis::kFourier : Basis::kComputational,
               round_rng, outcome);
    alice_sym[r].push_back(outcome[0]);
    for (uint32_t b = 0; b < p.num_bobs; ++b) {
      bob_sym[r][b].push_back(outcome[b + 1]);
    }
  }

  const auto take_words = [&p](std::vector<uint16_t>& alice,
                               std::vector<std::vector<uint16_t>>& bobs) {
    std::pair<QuditWord, std::vector<QuditWord>> out{
        QuditWord(p.d, std::move(alice)), {}};
    out.second.reserve(bobs.size());
    for (auto& b : bobs) out.second.emplace_back(p.d, std::move(b));
    return out;
  };
  auto [fourier_alice, fourier_bobs] =
      take_words(alice_sym[kFourier], bob_sym[kFourier]);
  auto [est_alice, est_bobs] =
      take_words(alice_sym[kEstimation], bob_sym[kEstimation]);
  auto [raw_alice, raw_bobs] = take_words(alice_sym[kKey], bob_sym[kKey]);
  rec.fourier_alice = std::move(fourier_alice);
  rec.fourier_bobs = std::move(fourier_bobs);

  const double w_s =
      relative_hamming_weight(round_sums(rec.fourier_alice, rec.fourier_bobs));
  const double q_z = estimate_qz(est_alice, est_bobs);
  rec.report = evaluate(p, w_s, q_z);

  rec.raw_key_digests.push_back(content_digest(raw_alice));
  for (const auto& b : raw_bobs) rec.raw_key_digests.push_back(content_digest(b));

  if (rec.report.ell <= 0) {
    rec.aborted = true;
    rec.abort_reason = "no extractable key";
    return rec;
  }

  RngStream ec_rng(seed, RngStream::label(kEcPurpose, 0));
  const EcResult ec = ec_simulate(raw_alice, raw_bobs, rec.report.leak_ec,
                                  p.epsilon_ec, ec_rng);
  rec.digest_ok = ec.digest_ok;
  rec.ec_digest_bits = ec.digest_bits;
  if (!ec.digest_ok) {
    rec.aborted = true;
    rec.abort_reason = "verification digest mismatch";
    return rec;
  }

  rec.encoding_slack_bits =
      static_cast<double>(encoded_bit_length(raw_alice.size(), p.d)) -
      static_cast<double>(raw_alice.size()) *
          std::log2(static_cast<double>(p.d));

  RngStream pa_rng(seed, RngStream::label(kPaPurpose, 0));
  const uint64_t pa_seed = pa_rng.next_u64();
  rec.final_keys.reserve(1 + ec.corrected.size());
  rec.final_keys.push_back(privacy_amplify(raw_alice, rec.report.ell, pa_seed));
  for (const auto& key : ec.corrected) {
    rec.final_keys.push_back(privacy_amplify(key, rec.report.ell, pa_seed));
  }
  rec.key_digests.reserve(rec.final_keys.size());
  for (const auto& key : rec.final_keys) {
    rec.key_digests.push_back(content_digest(key));
  }
  return rec;
}

namespace {

nlohmann::json word_to_json(const QuditWord& w) {
  if (w.d() <= 36) {
    static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string s;
    s.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) s.push_back(digits[w[i]]);
    return s;
  }
  std::vector<uint16_t> symbols(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) symbols[i] = w[i];
  return symbols;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string transcript_to_json(const TranscriptRecord& record,
                               bool include_keys, int indent) {
  nlohmann::json j;
  j["schema"] = "hdqcka-transcript";
  j["schema_version"] = 1;
  j["seed"] = record.seed;
  j["noise"] = record.noise;
  j["params"] = {{"d", record.params.d},
                 {"p", record.params.num_bobs},
                 {"N_total", record.params.total_rounds},
                 {"m", record.params.test_rounds},
                 {"n", record.params.key_rounds},
                 {"epsilon", record.params.epsilon},
                 {"epsilon_EC", record.params.epsilon_ec}};
  j["fourier_subset"] = record.fourier_subset;
  j["estimation_subset"] = record.estimation_subset;
  nlohmann::json outcomes;
  outcomes["alice"] = word_to_json(record.fourier_alice);
  auto& bobs = outcomes["bobs"] = nlohmann::json::array();
  for (const auto& b : record.fourier_bobs) bobs.push_back(word_to_json(b));
  j["fourier_outcomes"] = std::move(outcomes);
  j["w_s"] = record.report.w_s;
  j["Q_Z"] = record.report.q_z;
  j["delta"] = record.report.delta;
  j["nu"] = record.report.nu;
  j["leak_EC"] = record.report.leak_ec;
  j["ell"] = record.report.ell;
  j["rate"] = record.report.rate;
  j["eps_PA"] = record.report.epsilon_pa;
  j["eps_fail"] = record.report.epsilon_fail;
  j["aborted"] = record.aborted;
  j["abort_reason"] = record.abort_reason;
  j["digest_ok"] = record.digest_ok;
  j["ec_digest_bits"] = record.ec_digest_bits;
  j["encoding_slack_bits"] = record.encoding_slack_bits;
  auto& raw_digests = j["raw_key_digests"] = nlohmann::json::array();
  for (uint64_t dgt : record.raw_key_digests) raw_digests.push_back(hex64(dgt));
  auto& digests = j["key_digests"] = nlohmann::json::array();
  for (uint64_t dgt : record.key_digests) digests.push_back(hex64(dgt));
  if (include_keys) {
    auto& keys = j["final_keys"] = nlohmann::json::array();
    for (const auto& k : record.final_keys) keys.push_back(k.to_hex());
  }
  return j.dump(indent);
}

}  // namespace hdqcka
