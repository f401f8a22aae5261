#include "hdqcka/finite_key.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "hdqcka/entropy.hpp"
#include "hdqcka/sampling.hpp"

namespace hdqcka {

namespace {

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1]");
  }
}

double depolarizing_disagreement(uint32_t d, double q) {
  return q * (1.0 - 1.0 / static_cast<double>(d));
}

}  // namespace

ProtocolParams ProtocolParams::create(uint32_t d, uint32_t num_bobs,
                                      uint64_t total_rounds,
                                      uint64_t test_rounds, double epsilon,
                                      double epsilon_ec) {
  if (d < 2) throw std::invalid_argument("ProtocolParams: need d >= 2");
  if (num_bobs < 1) {
    throw std::invalid_argument("ProtocolParams: need at least one receiver");
  }
  if (test_rounds < 1) {
    throw std::invalid_argument("ProtocolParams: need m >= 1");
  }
  if (total_rounds <= 2 * test_rounds) {
    throw std::invalid_argument("ProtocolParams: need N_total > 2m");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("ProtocolParams: epsilon in (0, 1)");
  }
  if (!(epsilon_ec > 0.0 && epsilon_ec < 1.0)) {
    throw std::invalid_argument("ProtocolParams: epsilon_ec in (0, 1)");
  }
  ProtocolParams p;
  p.d = d;
  p.num_bobs = num_bobs;
  p.total_rounds = total_rounds;
  p.test_rounds = test_rounds;
  p.key_rounds = total_rounds - 2 * test_rounds;
  p.epsilon = epsilon;
  p.epsilon_ec = epsilon_ec;
  if (p.test_rounds > p.key_rounds) {
    // m <= (n + m)/2, the sampling theorem's admissible range.
    throw std::invalid_argument("ProtocolParams: need m <= n");
  }
  return p;
}

ProtocolParams ProtocolParams::with_test_fraction(uint32_t d,
                                                  uint32_t num_bobs,
                                                  uint64_t total_rounds,
                                                  double fraction,
                                                  double epsilon,
                                                  double epsilon_ec) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("ProtocolParams: test fraction in (0, 1]");
  }
  // m = fraction * (n + m) and N_total = n + 2m give m = f N / (1 + f).
  const auto m = static_cast<uint64_t>(std::llround(
      fraction * static_cast<double>(total_rounds) / (1.0 + fraction)));
  return create(d, num_bobs, total_rounds, m == 0 ? 1 : m, epsilon,
                epsilon_ec);
}

double nu_correction(uint64_t big_n, uint64_t m, uint32_t num_bobs,
                     double epsilon_ec) {
  if (m < 1 || m >= big_n) {
    throw std::invalid_argument("nu_correction: need 1 <= m < N");
  }
  if (num_bobs < 1) throw std::invalid_argument("nu_correction: need p >= 1");
  if (!(epsilon_ec > 0.0)) {
    throw std::invalid_argument("nu_correction: need epsilon_ec > 0");
  }
  const double log_term =
      std::log(4.0 * static_cast<double>(num_bobs)) - std::log(epsilon_ec);
  if (log_term < 0.0) {
    throw std::domain_error("nu_correction: need epsilon_ec <= 4p");
  }
  const double nd = static_cast<double>(big_n);
  const double md = static_cast<double>(m);
  return std::sqrt(nd * (md + 1.0) * log_term /
                   (md * md * (nd - md)));
}

double leak_ec_bound(uint64_t n, uint32_t d, double q_z, double nu,
                     double epsilon_ec) {
  if (d < 2) throw std::invalid_argument("leak_ec_bound: need d >= 2");
  check_probability(q_z, "leak_ec_bound: q_z");
  if (!(nu >= 0.0)) throw std::invalid_argument("leak_ec_bound: need nu >= 0");
  if (!(epsilon_ec > 0.0 && epsilon_ec < 1.0)) {
    throw std::invalid_argument("leak_ec_bound: epsilon_ec in (0, 1)");
  }
  const double ceiling = (static_cast<double>(d) - 1.0) / d;
  const double x = std::min(q_z + nu, ceiling);
  const double nd = static_cast<double>(n);
  return nd * binary_entropy(x) +
         nd * x * std::log2(static_cast<double>(d) - 1.0) -
         std::log2(epsilon_ec);
}

int64_t key_length(const ProtocolParams& params, double w_s, double leak_ec) {
  check_probability(w_s, "key_length: w_s");
  const double delta =
      delta_for_epsilon(params.test_rounds, params.key_rounds, params.epsilon);
  const double ceiling = (static_cast<double>(params.d) - 1.0) / params.d;
  const double x = w_s + delta;
  const double entropy_term =
      x >= ceiling ? 1.0 : d_ary_entropy(params.d, x).value;
  const double log2_d = std::log2(static_cast<double>(params.d));
  const double raw = static_cast<double>(params.key_rounds) * log2_d *
                         (1.0 - entropy_term) -
                     leak_ec + 2.0 * std::log2(params.epsilon);
  if (raw <= 0.0) return 0;
  return static_cast<int64_t>(std::floor(raw));
}

double key_rate(const ProtocolParams& params, const KeyRateReport& report) {
  return static_cast<double>(report.ell) /
         static_cast<double>(params.total_rounds);
}

SecurityEpsilons security_epsilons(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("security_epsilons: epsilon in (0, 1)");
  }
  return {5.0 * epsilon + std::cbrt(20.0 * epsilon),
          std::cbrt(5.0 * epsilon / 2.0)};
}

KeyRateReport evaluate_with_corrections(const ProtocolParams& params,
                                        double w_s, double q_z, double delta,
                                        double nu) {
  check_probability(w_s, "evaluate: w_s");
  check_probability(q_z, "evaluate: q_z");
  if (!(delta >= 0.0) || !(nu >= 0.0)) {
    throw std::invalid_argument("evaluate: corrections must be >= 0");
  }
  KeyRateReport report;
  report.w_s = w_s;
  report.q_z = q_z;
  report.delta = delta;
  report.nu = nu;
  report.leak_ec = leak_ec_bound(params.key_rounds, params.d, q_z, nu,
                                 params.epsilon_ec);

  const double ceiling = (static_cast<double>(params.d) - 1.0) / params.d;
  const double x = w_s + delta;
  const double entropy_term =
      x >= ceiling ? 1.0 : d_ary_entropy(params.d, x).value;
  const double log2_d = std::log2(static_cast<double>(params.d));
  const double raw = static_cast<double>(params.key_rounds) * log2_d *
                         (1.0 - entropy_term) -
                     report.leak_ec + 2.0 * std::log2(params.epsilon);
  report.ell = raw <= 0.0 ? 0 : static_cast<int64_t>(std::floor(raw));
  report.rate = key_rate(params, report);
  const SecurityEpsilons eps = security_epsilons(params.epsilon);
  report.epsilon_pa = eps.epsilon_pa;
  report.epsilon_fail = eps.epsilon_fail;
  return report;
}

KeyRateReport evaluate(const ProtocolParams& params, double w_s, double q_z) {
  const double delta =
      delta_for_epsilon(params.test_rounds, params.key_rounds, params.epsilon);
  const double nu =
      nu_correction(params.key_rounds + params.test_rounds, params.test_rounds,
                    params.num_bobs, params.epsilon_ec);
  return evaluate_with_corrections(params, w_s, q_z, delta, nu);
}

KeyRateReport evaluate_depolarizing(const ProtocolParams& params, double q,
                                    WsModel model) {
  check_probability(q, "evaluate_depolarizing: q");
  const double w_s = model == WsModel::kNoiseOverD
                         ? q / static_cast<double>(params.d)
                         : depolarizing_disagreement(params.d, q);
  return evaluate(params, w_s, depolarizing_disagreement(params.d, q));
}

std::vector<SweepRow> sweep(const SweepGrid& grid,
                            const SweepSettings& settings) {
  std::vector<SweepRow> rows;
  for (uint32_t d : grid.d) {
    for (uint32_t p : grid.num_bobs) {
      for (double q : grid.q) {
        for (uint64_t n_total : grid.total_rounds) {
          SweepRow row;
          row.d = d;
          row.num_bobs = p;
          row.q = q;
          row.total_rounds = n_total;
          rows.push_back(std::move(row));
        }
      }
    }
  }

  const auto evaluate_row = [&settings](SweepRow& row) {
    try {
      const ProtocolParams params = ProtocolParams::with_test_fraction(
          row.d, row.num_bobs, row.total_rounds, settings.test_fraction,
          settings.epsilon, settings.epsilon_ec);
      row.test_rounds = params.test_rounds;
      row.key_rounds = params.key_rounds;
      row.report = evaluate_depolarizing(params, row.q, settings.model);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  unsigned threads = settings.threads;
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min<std::size_t>(threads, rows.size());
  if (threads <= 1) {
    for (auto& row : rows) evaluate_row(row);
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&rows, &evaluate_row, t, threads] {
      for (std::size_t i = t; i < rows.size(); i += threads) {
        evaluate_row(rows[i]);
      }
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace hdqcka
