#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hdqcka/rng.hpp"

namespace hdqcka {

enum class Basis { kComputational, kFourier };

// Hard caps on simulated system size.  Exceeding either is a caller error,
// not a numeric failure, so both throw with the limit spelled out.
inline constexpr std::size_t kMaxStatevectorAmplitudes = std::size_t{1} << 20;
inline constexpr std::size_t kMaxDensityDimension = 2048;

// Joint state of sites qudits, each of dimension d; site 0 is the dealer.
// Index order: site 0 is the most significant base-d digit.
struct PureState {
  uint32_t d = 0;
  uint32_t sites = 0;
  Eigen::VectorXcd amplitudes;
};

struct MixedState {
  uint32_t d = 0;
  uint32_t sites = 0;
  Eigen::MatrixXcd rho;
};

// Discrete Fourier transform, entries exp(2*pi*i*j*k/d)/sqrt(d); column j
// is the basis vector |f_j>.
Eigen::MatrixXcd fourier_matrix(uint32_t d);

// (|0...0> + |1...1> + ... + |d-1...d-1>)/sqrt(d) over num_bobs+1 sites.
PureState ghz_state(uint32_t d, uint32_t num_bobs);

// (1-noise)|psi><psi| + noise*I/dim.
MixedState depolarize(const PureState& psi, double noise);

// Amplitudes in the Fourier measurement frame, <f_o|psi> per outcome o.
PureState to_fourier_basis(const PureState& psi);

// Outcome probabilities for a joint projective measurement of every site
// in the given basis, indexed like the state itself.
std::vector<double> born_distribution(const PureState& psi, Basis basis);
std::vector<double> born_distribution(const MixedState& state, Basis basis);

std::vector<uint16_t> index_to_outcomes(std::size_t index, uint32_t d,
                                        uint32_t sites);
std::size_t outcomes_to_index(const std::vector<uint16_t>& outcomes,
                              uint32_t d);

// Closed-form born_distribution for depolarize(ghz_state(d, num_bobs)),
// usable when the density-matrix route would blow the size budget.
std::vector<double> depolarized_ghz_distribution(uint32_t d,
                                                 uint32_t num_bobs,
                                                 double noise, Basis basis);

// Draws measurement outcomes for the depolarized share state directly from
// the mixture: the noiseless branch collapses to all-equal (computational)
// or zero-sum (Fourier) words, the noise branch is uniform.  O(sites) per
// round regardless of dimension.
class DepolarizedGhzSampler {
 public:
  DepolarizedGhzSampler(uint32_t d, uint32_t num_bobs, double noise);

  std::vector<uint16_t> sample(Basis basis, RngStream& rng) const;
  void sample(Basis basis, RngStream& rng, std::vector<uint16_t>& out) const;

  uint32_t d() const { return d_; }
  uint32_t sites() const { return sites_; }
  double noise() const { return noise_; }

 private:
  uint32_t d_;
  uint32_t sites_;
  double noise_;
};

// Probability that a Fourier-basis round has outcome sum != 0 (mod d).
double fourier_error_rate(uint32_t d, double noise);

// Probability that one receiver's computational outcome differs from the
// dealer's.  Coincides with fourier_error_rate for this channel.
double z_error_rate(uint32_t d, double noise);

}  // namespace hdqcka
