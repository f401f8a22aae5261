#include "hdqcka/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hdqcka {

namespace {

void check_dimension(uint32_t d) {
  if (d < 2) throw std::invalid_argument("qudit dimension must be at least 2");
}

std::size_t checked_power(uint32_t d, uint32_t sites, std::size_t budget,
                          const char* what) {
  std::size_t dim = 1;
  for (uint32_t i = 0; i < sites; ++i) {
    if (dim > budget / d) {
      throw std::invalid_argument(std::string(what) + ": d^sites exceeds " +
                                  std::to_string(budget));
    }
    dim *= d;
  }
  if (dim > budget) {
    throw std::invalid_argument(std::string(what) + ": d^sites exceeds " +
                                std::to_string(budget));
  }
  return dim;
}

// In-place one-site linear map; site 0 is the most significant digit.
void apply_site_matrix(Eigen::VectorXcd& v, uint32_t d, uint32_t sites,
                       uint32_t site, const Eigen::MatrixXcd& m) {
  std::size_t stride = 1;
  for (uint32_t t = site + 1; t < sites; ++t) stride *= d;
  const std::size_t dim = static_cast<std::size_t>(v.size());
  const std::size_t block = stride * d;
  Eigen::VectorXcd tmp(d);
  for (std::size_t a = 0; a < dim; a += block) {
    for (std::size_t b = 0; b < stride; ++b) {
      for (uint32_t j = 0; j < d; ++j) tmp(j) = v(a + b + j * stride);
      for (uint32_t j = 0; j < d; ++j) {
        std::complex<double> acc = 0;
        for (uint32_t k = 0; k < d; ++k) acc += m(j, k) * tmp(k);
        v(a + b + j * stride) = acc;
      }
    }
  }
}

void apply_site_matrix_to_columns(Eigen::MatrixXcd& a, uint32_t d,
                                  uint32_t sites, const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd col(a.rows());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    col = a.col(c);
    for (uint32_t site = 0; site < sites; ++site) {
      apply_site_matrix(col, d, sites, site, m);
    }
    a.col(c) = col;
  }
}

std::vector<double> clamp_probabilities(const Eigen::VectorXcd& diag) {
  std::vector<double> probs(static_cast<std::size_t>(diag.size()));
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    probs[static_cast<std::size_t>(i)] = std::max(0.0, diag(i).real());
  }
  return probs;
}

}  // namespace

Eigen::MatrixXcd fourier_matrix(uint32_t d) {
  check_dimension(d);
  Eigen::MatrixXcd f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (uint32_t j = 0; j < d; ++j) {
    for (uint32_t k = 0; k < d; ++k) {
      const double phase = 2.0 * std::numbers::pi *
                           static_cast<double>((uint64_t{j} * k) % d) / d;
      f(j, k) = std::polar(norm, phase);
    }
  }
  return f;
}

PureState ghz_state(uint32_t d, uint32_t num_bobs) {
  check_dimension(d);
  if (num_bobs < 1) throw std::invalid_argument("ghz_state: need num_bobs >= 1");
  const uint32_t sites = num_bobs + 1;
  const std::size_t dim =
      checked_power(d, sites, kMaxStatevectorAmplitudes, "ghz_state");
  PureState psi;
  psi.d = d;
  psi.sites = sites;
  psi.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  // |k...k> has index k * (d^sites - 1) / (d - 1) = sum_t k*d^t.
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  std::size_t repunit = 0;
  for (uint32_t t = 0; t < sites; ++t) repunit = repunit * d + 1;
  for (uint32_t k = 0; k < d; ++k) {
    psi.amplitudes(static_cast<Eigen::Index>(k * repunit)) = amp;
  }
  return psi;
}

MixedState depolarize(const PureState& psi, double noise) {
  check_dimension(psi.d);
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw std::domain_error("depolarize: noise must lie in [0, 1]");
  }
  const std::size_t dim = static_cast<std::size_t>(psi.amplitudes.size());
  if (dim > kMaxDensityDimension) {
    throw std::invalid_argument(
        "depolarize: dimension exceeds " +
        std::to_string(kMaxDensityDimension) +
        "; use depolarized_ghz_distribution or DepolarizedGhzSampler");
  }
  MixedState state;
  state.d = psi.d;
  state.sites = psi.sites;
  state.rho = (1.0 - noise) * (psi.amplitudes * psi.amplitudes.adjoint());
  state.rho.diagonal().array() += noise / static_cast<double>(dim);
  return state;
}

PureState to_fourier_basis(const PureState& psi) {
  PureState out = psi;
  const Eigen::MatrixXcd fdag = fourier_matrix(psi.d).adjoint();
  for (uint32_t site = 0; site < psi.sites; ++site) {
    apply_site_matrix(out.amplitudes, psi.d, psi.sites, site, fdag);
  }
  return out;
}

std::vector<double> born_distribution(const PureState& psi, Basis basis) {
  const Eigen::VectorXcd& amps = basis == Basis::kComputational
                                     ? psi.amplitudes
                                     : to_fourier_basis(psi).amplitudes;
  std::vector<double> probs(static_cast<std::size_t>(amps.size()));
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    probs[static_cast<std::size_t>(i)] = std::norm(amps(i));
  }
  return probs;
}

std::vector<double> born_distribution(const MixedState& state, Basis basis) {
  if (basis == Basis::kComputational) {
    return clamp_probabilities(state.rho.diagonal());
  }
  // diag(U' rho U) with U = F tensor ... tensor F, done one side at a time:
  // A = U' rho, then (U' A')' = A U.
  const Eigen::MatrixXcd fdag = fourier_matrix(state.d).adjoint();
  Eigen::MatrixXcd a = state.rho;
  apply_site_matrix_to_columns(a, state.d, state.sites, fdag);
  a.adjointInPlace();
  apply_site_matrix_to_columns(a, state.d, state.sites, fdag);
  a.adjointInPlace();
  return clamp_probabilities(a.diagonal());
}

std::vector<uint16_t> index_to_outcomes(std::size_t index, uint32_t d,
                                        uint32_t sites) {
  check_dimension(d);
  std::vector<uint16_t> out(sites);
  for (uint32_t t = sites; t-- > 0;) {
    out[t] = static_cast<uint16_t>(index % d);
    index /= d;
  }
  if (index != 0) {
    throw std::out_of_range("index_to_outcomes: index past d^sites");
  }
  return out;
}

std::size_t outcomes_to_index(const std::vector<uint16_t>& outcomes,
                              uint32_t d) {
  check_dimension(d);
  std::size_t idx = 0;
  for (uint16_t o : outcomes) {
    if (o >= d) throw std::out_of_range("outcomes_to_index: symbol >= d");
    idx = idx * d + o;
  }
  return idx;
}

std::vector<double> depolarized_ghz_distribution(uint32_t d,
                                                 uint32_t num_bobs,
                                                 double noise, Basis basis) {
  check_dimension(d);
  if (num_bobs < 1) {
    throw std::invalid_argument("depolarized_ghz_distribution: num_bobs >= 1");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw std::domain_error("depolarized_ghz_distribution: noise in [0,1]");
  }
  const uint32_t sites = num_bobs + 1;
  const std::size_t dim = checked_power(d, sites, kMaxStatevectorAmplitudes,
                                        "depolarized_ghz_distribution");
  const double uniform = noise / static_cast<double>(dim);
  std::vector<double> probs(dim, uniform);
  if (basis == Basis::kComputational) {
    // Signal branch: uniform over the d all-equal words.
    std::size_t repunit = 0;
    for (uint32_t t = 0; t < sites; ++t) repunit = repunit * d + 1;
    for (uint32_t k = 0; k < d; ++k) {
      probs[k * repunit] += (1.0 - noise) / d;
    }
  } else {
    // Signal branch: uniform over the d^(sites-1) zero-sum words.
    double support = 1.0;
    for (uint32_t t = 0; t + 1 < sites; ++t) support *= d;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      std::size_t rest = idx;
      uint64_t sum = 0;
      for (uint32_t t = 0; t < sites; ++t) {
        sum += rest % d;
        rest /= d;
      }
      if (sum % d == 0) probs[idx] += (1.0 - noise) / support;
    }
  }
  return probs;
}

DepolarizedGhzSampler::DepolarizedGhzSampler(uint32_t d, uint32_t num_bobs,
                                             double noise)
    : d_(d), sites_(num_bobs + 1), noise_(noise) {
  check_dimension(d);
  if (num_bobs < 1) {
    throw std::invalid_argument("DepolarizedGhzSampler: need num_bobs >= 1");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw std::domain_error("DepolarizedGhzSampler: noise in [0, 1]");
  }
}

std::vector<uint16_t> DepolarizedGhzSampler::sample(Basis basis,
                                                    RngStream& rng) const {
  std::vector<uint16_t> out;
  sample(basis, rng, out);
  return out;
}

void DepolarizedGhzSampler::sample(Basis basis, RngStream& rng,
                                   std::vector<uint16_t>& out) const {
  out.resize(sites_);
  if (rng.bernoulli(noise_)) {
    for (auto& o : out) o = static_cast<uint16_t>(rng.uniform_below(d_));
    return;
  }
  if (basis == Basis::kComputational) {
    const auto k = static_cast<uint16_t>(rng.uniform_below(d_));
    for (auto& o : out) o = k;
    return;
  }
  uint64_t sum = 0;
  for (uint32_t t = 0; t + 1 < sites_; ++t) {
    out[t] = static_cast<uint16_t>(rng.uniform_below(d_));
    sum += out[t];
  }
  out[sites_ - 1] = static_cast<uint16_t>((d_ - sum % d_) % d_);
}

double fourier_error_rate(uint32_t d, double noise) {
  check_dimension(d);
  return noise * (1.0 - 1.0 / static_cast<double>(d));
}

double z_error_rate(uint32_t d, double noise) {
  check_dimension(d);
  return noise * (1.0 - 1.0 / static_cast<double>(d));
}

}  // namespace hdqcka
