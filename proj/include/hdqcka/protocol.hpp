#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdqcka/finite_key.hpp"
#include "hdqcka/hashing.hpp"
#include "hdqcka/rng.hpp"
#include "hdqcka/word.hpp"

namespace hdqcka {

// Everything one deterministic protocol run produces.  Final keys live only
// in memory; serialization stores digests unless explicitly told otherwise.
struct TranscriptRecord {
  uint64_t seed = 0;
  ProtocolParams params;
  double noise = 0.0;

  std::vector<uint64_t> fourier_subset;     // sorted round indices, size m
  std::vector<uint64_t> estimation_subset;  // sorted, size m, disjoint
  QuditWord fourier_alice;                  // outcomes on the test subset
  std::vector<QuditWord> fourier_bobs;

  KeyRateReport report;  // holds observed w_s and q_z plus the derived bound

  bool aborted = false;
  std::string abort_reason;

  bool digest_ok = false;
  uint32_t ec_digest_bits = 0;
  double encoding_slack_bits = 0.0;  // hashed-space bits minus n log2 d

  std::vector<uint64_t> raw_key_digests;  // dealer first, pre-correction
  std::vector<uint64_t> key_digests;      // final keys, dealer first
  std::vector<BitString> final_keys;      // empty when aborted
};

// Max over receivers of the fraction of positions disagreeing with the
// dealer.  All words must share d and a common positive length.
double estimate_qz(const QuditWord& alice, const std::vector<QuditWord>& bobs);

// Compresses the raw key to ell bits: injective base-d encoding followed by
// a seeded two-universal hash.  Requires 0 <= ell <= floor(n log2 d).
BitString privacy_amplify(const QuditWord& raw_key, int64_t ell,
                          uint64_t hash_seed);

struct EcResult {
  std::vector<QuditWord> corrected;  // receivers only
  bool digest_ok = false;
  uint32_t digest_bits = 0;
  double charged_leak_bits = 0.0;
};

// Idealized one-way error correction: receivers adopt the dealer's key and
// the cost is whatever the caller charged, independent of realized errors.
// The verification digest is real: ceil(log2(1/epsilon_ec)) bits of a
// seeded two-universal hash, compared per receiver.  verify_precorrection
// is a test hook that hashes the uncorrected keys instead, exposing the
// digest's collision rate.
EcResult ec_simulate(const QuditWord& alice_key,
                     const std::vector<QuditWord>& bob_keys,
                     double charged_leak_bits, double epsilon_ec,
                     RngStream& rng, bool verify_precorrection = false);

// One full session: round generation, test/estimation subset draws, the
// Fourier statistic, key-length evaluation, simulated error correction with
// digest verification, privacy amplification.  Bit-identical output for
// identical (params, q, seed).
TranscriptRecord run_protocol(const ProtocolParams& params, double q,
                              uint64_t seed);

// Single JSON document, schema-versioned.  include_keys additionally embeds
// the final key bits and is meant for tests only.
std::string transcript_to_json(const TranscriptRecord& record,
                               bool include_keys = false, int indent = -1);

}  // namespace hdqcka
