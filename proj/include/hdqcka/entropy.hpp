#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>

namespace hdqcka {

enum class EntropyUnits { kDAry, kBits };

// Entropy carries its unit so d-ary and bit-valued quantities cannot be
// mixed silently.
struct EntropyValue {
  double value;
  EntropyUnits units;
};

// H_d(x) = x log_d(d-1) - x log_d(x) - (1-x) log_d(1-x), with 0 log 0 = 0.
// Result is in d-ary units (lies in [0,1], maximum 1 at x = (d-1)/d).
EntropyValue d_ary_entropy(uint32_t d, double x);

// Shannon entropy of a bit with bias x, in bits.
double binary_entropy(double x);

// Convert a d-ary entropy value to bits (multiplies by log2 d).
double entropy_in_bits(const EntropyValue& e, uint32_t d);

// Largest k in [0, n] with k/n <= gamma.  The comparison is done on the
// rational k/n rather than on gamma*n, so grid points gamma = j/n are never
// lost to floating-point rounding of the product.
uint32_t weight_floor_index(uint32_t n, double gamma);

// Exact count of length-n words over a d-letter alphabet with at most
// floor(gamma n) non-zero positions: sum_{k<=floor(gamma n)} C(n,k)(d-1)^k.
// Arbitrary-precision arithmetic; never overflows.
boost::multiprecision::cpp_int hamming_ball_volume_exact(uint32_t n, uint32_t d,
                                                         double gamma);

// Entropic upper bound d^(n H_d(gamma)) on the same count, valid for
// gamma <= (d-1)/d.  Computed in log space; may round to +inf for huge n.
double hamming_ball_volume_bound(uint32_t n, uint32_t d, double gamma);

}  // namespace hdqcka
