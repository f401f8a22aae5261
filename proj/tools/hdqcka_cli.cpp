#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hdqcka/finite_key.hpp"
#include "hdqcka/protocol.hpp"
#include "hdqcka/sampling.hpp"

namespace {

using hdqcka::KeyRateReport;
using hdqcka::ProtocolParams;
using hdqcka::WsModel;

constexpr const char* kCsvSchemaLine = "# hdqcka-schema v1";

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

// Grid syntax: comma-separated values, each either a scalar (scientific
// notation fine) or start:stop:points expanded log10-uniformly.
std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) throw std::invalid_argument("empty grid token");
    const auto c1 = token.find(':');
    if (c1 == std::string::npos) {
      out.push_back(std::stod(token));
      continue;
    }
    const auto c2 = token.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::invalid_argument("grid range needs start:stop:points");
    }
    const double start = std::stod(token.substr(0, c1));
    const double stop = std::stod(token.substr(c1 + 1, c2 - c1 - 1));
    const long points = std::stol(token.substr(c2 + 1));
    if (points < 1 || start <= 0.0 || stop <= 0.0) {
      throw std::invalid_argument("grid range needs positive start/stop and points >= 1");
    }
    if (points == 1) {
      out.push_back(start);
      continue;
    }
    const double lg0 = std::log10(start);
    const double lg1 = std::log10(stop);
    for (long i = 0; i < points; ++i) {
      out.push_back(std::pow(10.0, lg0 + (lg1 - lg0) * i / (points - 1)));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

std::vector<uint64_t> parse_round_grid(const std::string& text) {
  std::vector<uint64_t> out;
  for (double v : parse_real_grid(text)) {
    if (!(v >= 1.0 && v <= 9.2e18)) {
      throw std::invalid_argument("round counts must be in [1, 9.2e18]");
    }
    out.push_back(static_cast<uint64_t>(std::llround(v)));
  }
  return out;
}

std::vector<uint32_t> parse_small_grid(const std::string& text) {
  std::vector<uint32_t> out;
  for (double v : parse_real_grid(text)) {
    if (!(v >= 1.0 && v <= 65535.0) || v != std::floor(v)) {
      throw std::invalid_argument("expected small positive integers");
    }
    out.push_back(static_cast<uint32_t>(v));
  }
  return out;
}

struct KeyrateOptions {
  std::string d = "2";
  std::string p = "2";
  std::string q = "0.10";
  std::string n = "1e6";
  int fig = 0;
  double epsilon = 1e-36;
  double epsilon_ec = 1e-12;
  double test_fraction = hdqcka::kDefaultTestFraction;
  std::string ws_model = "q-over-d";
  std::string format = "csv";
  std::string output;
  unsigned threads = 0;
};

WsModel parse_ws_model(const std::string& name) {
  if (name == "q-over-d") return WsModel::kNoiseOverD;
  if (name == "exact") return WsModel::kExactChannel;
  throw std::invalid_argument("--ws-model must be q-over-d or exact");
}

void apply_figure_preset(KeyrateOptions& opt) {
  switch (opt.fig) {
    case 1:  // qubit baseline, rate vs signal count
      opt.d = "2";
      opt.p = "2";
      opt.q = "0.10";
      opt.n = "1e5:1e11:25";
      break;
    case 2:  // dimension families at two noise levels
      opt.d = "2,4,8,16";
      opt.p = "2";
      opt.q = "0.10,0.30";
      opt.n = "1e5:1e11:25";
      break;
    case 3:  // doubling-the-rounds comparison: N grid in powers of two
      opt.d = "2,4";
      opt.p = "2";
      opt.q = "0.10";
      opt.n = "16384:1073741824:17";
      break;
    default:
      break;
  }
}

int write_rows(const std::vector<hdqcka::SweepRow>& rows,
               const KeyrateOptions& opt) {
  std::ofstream file;
  if (!opt.output.empty()) {
    file.open(opt.output);
    if (!file) {
      std::cerr << "cannot open output file: " << opt.output << "\n";
      return 2;
    }
  }
  std::ostream& os = opt.output.empty() ? std::cout : file;

  if (opt.format == "csv") {
    os << kCsvSchemaLine << "\n";
    os << "d,p,Q,N_total,m,n,delta,nu,w_s_model,Q_Z,leak_EC,ell,rate,"
          "eps_PA,eps_fail,error\n";
    for (const auto& r : rows) {
      os << r.d << ',' << r.num_bobs << ',' << fmt(r.q) << ','
         << r.total_rounds << ',' << r.test_rounds << ',' << r.key_rounds
         << ',';
      if (r.ok) {
        const KeyRateReport& k = r.report;
        os << fmt(k.delta) << ',' << fmt(k.nu) << ',' << fmt(k.w_s) << ','
           << fmt(k.q_z) << ',' << fmt(k.leak_ec) << ',' << k.ell << ','
           << fmt(k.rate) << ',' << fmt(k.epsilon_pa) << ','
           << fmt(k.epsilon_fail) << ',';
      } else {
        os << ",,,,,,,,,\"" << r.error << '"';
      }
      os << '\n';
    }
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row;
      row["d"] = r.d;
      row["p"] = r.num_bobs;
      row["Q"] = r.q;
      row["N_total"] = r.total_rounds;
      row["m"] = r.test_rounds;
      row["n"] = r.key_rounds;
      row["error"] = r.error;
      if (r.ok) {
        row["delta"] = r.report.delta;
        row["nu"] = r.report.nu;
        row["w_s_model"] = r.report.w_s;
        row["Q_Z"] = r.report.q_z;
        row["leak_EC"] = r.report.leak_ec;
        row["ell"] = r.report.ell;
        row["rate"] = r.report.rate;
        row["eps_PA"] = r.report.epsilon_pa;
        row["eps_fail"] = r.report.epsilon_fail;
      }
      arr.push_back(std::move(row));
    }
    os << arr.dump(2) << "\n";
  }
  return 0;
}

int run_keyrate(KeyrateOptions opt) {
  apply_figure_preset(opt);
  hdqcka::SweepGrid grid;
  hdqcka::SweepSettings settings;
  try {
    grid.d = parse_small_grid(opt.d);
    grid.num_bobs = parse_small_grid(opt.p);
    grid.q = parse_real_grid(opt.q);
    grid.total_rounds = parse_round_grid(opt.n);
    settings.epsilon = opt.epsilon;
    settings.epsilon_ec = opt.epsilon_ec;
    settings.test_fraction = opt.test_fraction;
    settings.model = parse_ws_model(opt.ws_model);
    settings.threads = opt.threads;
    if (opt.format != "csv" && opt.format != "json") {
      throw std::invalid_argument("--format must be csv or json");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::vector<hdqcka::SweepRow> rows = hdqcka::sweep(grid, settings);
  const int rc = write_rows(rows, opt);
  if (rc != 0) return rc;
  bool any_ok = false;
  for (const auto& r : rows) any_ok = any_ok || r.ok;
  if (!any_ok) {
    std::cerr << "config error: every grid point failed validation\n";
    return 2;
  }
  return 0;
}

struct SimulateOptions {
  uint32_t d = 2;
  uint32_t p = 2;
  double q = 0.10;
  std::string n = "1e4";
  uint64_t m = 0;  // 0: test-fraction rule
  uint64_t seed = 1;
  double epsilon = 1e-36;
  double epsilon_ec = 1e-12;
  double test_fraction = hdqcka::kDefaultTestFraction;
  std::string n_cap = "2e7";
  std::string output;
  bool insecure_dump = false;
};

int run_simulate(const SimulateOptions& opt) {
  ProtocolParams params;
  uint64_t cap = 0;
  try {
    const std::vector<uint64_t> n = parse_round_grid(opt.n);
    const std::vector<uint64_t> caps = parse_round_grid(opt.n_cap);
    if (n.size() != 1 || caps.size() != 1) {
      throw std::invalid_argument("simulate takes scalar --N and --max-rounds");
    }
    cap = caps[0];
    if (n[0] > cap) {
      throw std::invalid_argument(
          "N_total " + std::to_string(n[0]) + " exceeds the simulation cap " +
          std::to_string(cap) +
          "; raise --max-rounds (expect memory and runtime to scale "
          "linearly) or use `keyrate` for the analytic bound");
    }
    params = opt.m > 0
                 ? ProtocolParams::create(opt.d, opt.p, n[0], opt.m,
                                          opt.epsilon, opt.epsilon_ec)
                 : ProtocolParams::with_test_fraction(opt.d, opt.p, n[0],
                                                      opt.test_fraction,
                                                      opt.epsilon,
                                                      opt.epsilon_ec);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const hdqcka::TranscriptRecord rec =
      hdqcka::run_protocol(params, opt.q, opt.seed);

  std::cout << "aborted=" << (rec.aborted ? "true" : "false");
  if (rec.aborted) std::cout << " reason=\"" << rec.abort_reason << '"';
  std::cout << " w_s=" << fmt(rec.report.w_s) << " Q_Z=" << fmt(rec.report.q_z)
            << " ell=" << rec.report.ell << " rate=" << fmt(rec.report.rate)
            << " digest_ok=" << (rec.digest_ok ? "true" : "false") << "\n";

  if (!opt.output.empty()) {
    std::ofstream file(opt.output);
    if (!file) {
      std::cerr << "cannot open output file: " << opt.output << "\n";
      return 2;
    }
    file << hdqcka::transcript_to_json(rec, opt.insecure_dump, 2) << "\n";
  }
  return 0;
}

struct VerifySamplingOptions {
  uint32_t d = 2;
  std::string n = "200";
  std::string m = "100";
  std::string delta = "0.1";
  std::string trials = "1e5";
  uint64_t seed = 1;
};

int run_verify_sampling(const VerifySamplingOptions& opt) {
  std::vector<uint64_t> n, m, trials;
  std::vector<double> deltas;
  try {
    n = parse_round_grid(opt.n);
    m = parse_round_grid(opt.m);
    trials = parse_round_grid(opt.trials);
    deltas = parse_real_grid(opt.delta);
    if (n.size() != 1 || m.size() != 1 || trials.size() != 1) {
      throw std::invalid_argument("verify-sampling takes scalar --N/--m/--trials");
    }
    if (n[0] > 10000) {
      throw std::invalid_argument("Monte Carlo verification is capped at N = 1e4");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const auto family = hdqcka::adversarial_word_family(opt.d, n[0]);
  const std::vector<hdqcka::QuditWord> bobs{
      hdqcka::QuditWord::zeros(opt.d, n[0])};
  bool all_pass = true;
  uint64_t stream = 0;
  for (double delta : deltas) {
    const auto strategy = hdqcka::SamplingStrategy::create(n[0], m[0], delta);
    const double bound = hdqcka::epsilon_cl_bound(delta, m[0], n[0]);
    for (const auto& word : family) {
      hdqcka::RngStream rng(opt.seed, hdqcka::RngStream::label(0x10, stream++));
      const double freq = hdqcka::mc_failure_frequency(word.alice, bobs,
                                                       strategy, trials[0], rng);
      const double sigma =
          std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials[0]));
      const bool pass = freq <= bound + 3.0 * sigma;
      all_pass = all_pass && pass;
      std::cout << (pass ? "PASS" : "FAIL") << " delta=" << fmt(delta)
                << " word=\"" << word.label << "\" freq=" << fmt(freq)
                << " bound=" << fmt(bound) << "\n";
    }
  }
  std::cout << (all_pass ? "all words within the analytic bound"
                         : "BOUND VIOLATION detected")
            << "\n";
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-key calculator and protocol simulator for "
               "high-dimensional multiparty conference key agreement"};
  app.require_subcommand(1);

  KeyrateOptions kr;
  CLI::App* keyrate = app.add_subcommand(
      "keyrate", "Evaluate the analytic key-rate bound over parameter grids");
  keyrate->add_option("--d", kr.d, "dimension grid (comma list or a:b:k log)");
  keyrate->add_option("--p", kr.p, "receiver-count grid");
  keyrate->add_option("--Q", kr.q, "depolarizing noise grid");
  keyrate->add_option("--N", kr.n, "total signal grid, scientific ok");
  keyrate->add_option("--fig", kr.fig, "figure preset, overrides grids")
      ->check(CLI::Range(1, 3));
  keyrate->add_option("--epsilon", kr.epsilon, "security parameter");
  keyrate->add_option("--epsilon-ec", kr.epsilon_ec, "EC failure bound");
  keyrate->add_option("--test-fraction", kr.test_fraction,
                      "m as a fraction of the n+m sampling population");
  keyrate->add_option("--ws-model", kr.ws_model,
                      "Fourier statistic model: q-over-d (w_s = Q/d) or exact (Q(1-1/d))");
  keyrate->add_option("--format", kr.format, "csv or json");
  keyrate->add_option("--output", kr.output, "output path (default stdout)");
  keyrate->add_option("--threads", kr.threads, "worker threads, 0 = machine")
      ->envname("HDQCKA_THREADS");

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the full Monte Carlo protocol once and report");
  simulate->add_option("--d", sim.d, "qudit dimension");
  simulate->add_option("--p", sim.p, "number of receivers");
  simulate->add_option("--Q", sim.q, "depolarizing noise");
  simulate->add_option("--N", sim.n, "total signals, scientific ok");
  simulate->add_option("--m", sim.m, "test rounds (default: --test-fraction rule)");
  simulate->add_option("--test-fraction", sim.test_fraction,
                       "m as a fraction of the n+m sampling population");
  simulate->add_option("--seed", sim.seed, "RNG seed; fixes every byte");
  simulate->add_option("--epsilon", sim.epsilon, "security parameter");
  simulate->add_option("--epsilon-ec", sim.epsilon_ec, "EC failure bound");
  simulate->add_option("--max-rounds", sim.n_cap, "simulation size cap");
  simulate->add_option("--output", sim.output, "transcript JSON path");
  simulate->add_flag("--insecure-dump", sim.insecure_dump,
                     "embed final key bits in the transcript (tests only)");

  VerifySamplingOptions vs;
  CLI::App* verify = app.add_subcommand(
      "verify-sampling",
      "Monte Carlo check of the sampling failure bound on adversarial words");
  verify->add_option("--d", vs.d, "qudit dimension");
  verify->add_option("--N", vs.n, "population size (<= 1e4)");
  verify->add_option("--m", vs.m, "sample size");
  verify->add_option("--delta", vs.delta, "tolerance grid");
  verify->add_option("--trials", vs.trials, "Monte Carlo trials per word");
  verify->add_option("--seed", vs.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (keyrate->parsed()) return run_keyrate(kr);
    if (simulate->parsed()) return run_simulate(sim);
    return run_verify_sampling(vs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
