#include "hdqcka/entropy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hdqcka {

namespace mp = boost::multiprecision;

namespace {

void check_d(uint32_t d) {
  if (d < 2) throw std::invalid_argument("alphabet size d must be >= 2");
}

void check_unit_interval(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error(std::string(who) + ": argument " +
                                std::to_string(x) + " outside [0, 1]");
}

}  // namespace

EntropyValue d_ary_entropy(uint32_t d, double x) {
  check_d(d);
  check_unit_interval(x, "d_ary_entropy");
  const double log_d = std::log(static_cast<double>(d));
  double t = x * std::log(static_cast<double>(d - 1)) / log_d;
  if (x > 0.0) t -= x * std::log(x) / log_d;
  if (x < 1.0) t -= (1.0 - x) * std::log1p(-x) / log_d;
  return {t, EntropyUnits::kDAry};
}

double binary_entropy(double x) {
  check_unit_interval(x, "binary_entropy");
  double t = 0.0;
  if (x > 0.0) t -= x * std::log2(x);
  if (x < 1.0) t -= (1.0 - x) * std::log1p(-x) / std::log(2.0);
  return t;
}

double entropy_in_bits(const EntropyValue& e, uint32_t d) {
  check_d(d);
  if (e.units == EntropyUnits::kBits) return e.value;
  return e.value * std::log2(static_cast<double>(d));
}

uint32_t weight_floor_index(uint32_t n, double gamma) {
  if (n == 0) throw std::invalid_argument("weight_floor_index: n must be >= 1");
  check_unit_interval(gamma, "weight_floor_index");
  uint32_t k = 0;
  while (k < n &&
         static_cast<double>(k + 1) / static_cast<double>(n) <= gamma)
    ++k;
  return k;
}

mp::cpp_int hamming_ball_volume_exact(uint32_t n, uint32_t d, double gamma) {
  check_d(d);
  if (n == 0) throw std::invalid_argument("hamming_ball_volume_exact: n must be >= 1");
  check_unit_interval(gamma, "hamming_ball_volume_exact");
  const uint32_t kmax = weight_floor_index(n, gamma);
  mp::cpp_int total = 0;
  mp::cpp_int binom = 1;  // C(n, k), updated multiplicatively
  mp::cpp_int dm1_pow = 1;
  for (uint32_t k = 0; k <= kmax; ++k) {
    total += binom * dm1_pow;
    binom = binom * (n - k) / (k + 1);
    dm1_pow *= d - 1;
  }
  return total;
}

double hamming_ball_volume_bound(uint32_t n, uint32_t d, double gamma) {
  check_d(d);
  if (n == 0) throw std::invalid_argument("hamming_ball_volume_bound: n must be >= 1");
  const double gamma_max =
      static_cast<double>(d - 1) / static_cast<double>(d);
  if (!(gamma >= 0.0) || gamma > gamma_max)
    throw std::domain_error(
        "hamming_ball_volume_bound: gamma must lie in [0, (d-1)/d]");
  const double log2_volume =
      static_cast<double>(n) * entropy_in_bits(d_ary_entropy(d, gamma), d);
  return std::exp2(log2_volume);
}

}  // namespace hdqcka
