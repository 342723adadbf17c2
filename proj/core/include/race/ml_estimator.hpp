#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "race/array_channel.hpp"
#include "race/sounding.hpp"

namespace race {

using Hypothesis = SubRangePair;

/// p(h | y) over the K^2 sub-range pairs, stored in canonical order.
class PosteriorDistribution {
 public:
  PosteriorDistribution(std::size_t branching, std::vector<double> probabilities);

  std::size_t branching() const noexcept { return branching_; }
  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t index) const { return p_[index]; }
  double probability(Hypothesis h) const { return p_[canonical_index(h, branching_)]; }
  const std::vector<double>& probabilities() const noexcept { return p_; }

 private:
  std::size_t branching_;
  std::vector<double> p_;
};

/// v_h: slot j is 1 when the slot measured pair h.
std::vector<std::uint8_t> indicator_vector(const SoundingLog& log, Hypothesis h);

/// Sigma_h = N0 I + g v_h v_h^T. Dense; intended for inspection and checks.
CMatrix conditional_covariance(const SoundingLog& log, Hypothesis h, const NoiseModel& noise);

/// ln CN(y; 0, Sigma_h) with Sigma_h = n0 I + g v v^T, evaluated in O(m) from
///   det Sigma_h   = n0^m (1 + g n_h / n0)
///   y^H Sigma^-1 y = (||y||^2 - g |v^H y|^2 / (n0 + g n_h)) / n0.
double log_likelihood(std::span<const std::complex<double>> y, std::span<const std::uint8_t> v,
                      double gain, double n0);

/// Uniform-prior posterior over the K^2 pairs, normalized in the log domain.
PosteriorDistribution posterior(const SoundingLog& log, const NoiseModel& noise);

struct MapEstimate {
  Hypothesis hypothesis;
  double probability = 0.0;
};

/// Argmax of the posterior; ties go to the lowest canonical index.
MapEstimate map_estimate(const PosteriorDistribution& posterior);

/// alpha_hat = y / (sqrt(P) N C^2).
std::complex<double> estimate_alpha(std::complex<double> observation, double transmit_power,
                                    std::size_t n_antennas, double gain_constant);

}  // namespace race
