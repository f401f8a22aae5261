#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hdqcka {

// Session-level inputs to the key-length calculus.  N_total = n + 2m:
// m Fourier-test rounds, m computational rounds spent estimating the
// disagreement rate, n key rounds.  The sampling population for both the
// delta and nu corrections is n + m.
struct ProtocolParams {
  uint32_t d = 0;
  uint32_t num_bobs = 0;     // p
  uint64_t total_rounds = 0; // N_total
  uint64_t test_rounds = 0;  // m
  uint64_t key_rounds = 0;   // n, derived
  double epsilon = 0.0;
  double epsilon_ec = 0.0;

  static ProtocolParams create(uint32_t d, uint32_t num_bobs,
                               uint64_t total_rounds, uint64_t test_rounds,
                               double epsilon, double epsilon_ec);

  // m chosen so the test set is `fraction` of the n+m sampling population.
  static ProtocolParams with_test_fraction(uint32_t d, uint32_t num_bobs,
                                           uint64_t total_rounds,
                                           double fraction, double epsilon,
                                           double epsilon_ec);
};

inline constexpr double kDefaultTestFraction = 0.07;

struct KeyRateReport {
  double w_s = 0.0;      // Fourier-round failure rate fed to the bound
  double q_z = 0.0;      // worst per-receiver disagreement rate
  double delta = 0.0;
  double nu = 0.0;
  double leak_ec = 0.0;  // bits
  int64_t ell = 0;       // bits, floored, never negative
  double rate = 0.0;     // ell / N_total
  double epsilon_pa = 0.0;
  double epsilon_fail = 0.0;
};

// sqrt(N(m+1) ln(4p/eps_ec) / (m^2 (N-m))); N here is the caller's sampling
// population, not N_total.
double nu_correction(uint64_t big_n, uint64_t m, uint32_t num_bobs,
                     double epsilon_ec);

// n h(x) + n x log2(d-1) + log2(1/eps_ec) with x = q_z + nu clamped to the
// entropy maximizer (d-1)/d.  Bits.
double leak_ec_bound(uint64_t n, uint32_t d, double q_z, double nu,
                     double epsilon_ec);

// max(0, floor(n log2 d (1 - H_d(w_s + delta)) - leak_ec - 2 log2(1/eps))),
// with the entropy term saturated at 1 once w_s + delta passes (d-1)/d.
int64_t key_length(const ProtocolParams& params, double w_s, double leak_ec);

double key_rate(const ProtocolParams& params, const KeyRateReport& report);

struct SecurityEpsilons {
  double epsilon_pa;    // 5 eps + (20 eps)^(1/3)
  double epsilon_fail;  // (5 eps / 2)^(1/3)
};

SecurityEpsilons security_epsilons(double epsilon);

// Full evaluation with delta and nu from their formulas.
KeyRateReport evaluate(const ProtocolParams& params, double w_s, double q_z);

// Same, with the finite-size corrections pinned by the caller (asymptotic
// studies force delta = nu = 0).
KeyRateReport evaluate_with_corrections(const ProtocolParams& params,
                                        double w_s, double q_z, double delta,
                                        double nu);

// Channel models mapping depolarizing noise Q to the Fourier statistic.
// kNoiseOverD is the published evaluation's choice w_s = Q/d; kExactChannel
// is the simulated state's true nonzero-sum probability Q(1 - 1/d).  Both
// use q_z = Q(1 - 1/d).
enum class WsModel { kNoiseOverD, kExactChannel };

KeyRateReport evaluate_depolarizing(const ProtocolParams& params, double q,
                                    WsModel model);

struct SweepGrid {
  std::vector<uint32_t> d;
  std::vector<uint32_t> num_bobs;
  std::vector<double> q;
  std::vector<uint64_t> total_rounds;
};

struct SweepSettings {
  double epsilon = 1e-36;
  double epsilon_ec = 1e-12;
  double test_fraction = kDefaultTestFraction;
  WsModel model = WsModel::kNoiseOverD;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepRow {
  uint32_t d = 0;
  uint32_t num_bobs = 0;
  double q = 0.0;
  uint64_t total_rounds = 0;
  uint64_t test_rounds = 0;
  uint64_t key_rounds = 0;
  KeyRateReport report;
  bool ok = false;
  std::string error;
};

// One row per grid point in d-major order; a failing point records its
// error in-row and the sweep continues.  Output is independent of the
// thread count.
std::vector<SweepRow> sweep(const SweepGrid& grid,
                            const SweepSettings& settings);

}  // namespace hdqcka
