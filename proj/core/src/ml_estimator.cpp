#include "race/ml_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace race {

PosteriorDistribution::PosteriorDistribution(std::size_t branching, std::vector<double> probabilities)
    : branching_(branching), p_(std::move(probabilities)) {
  if (p_.size() != branching_ * branching_)
    throw std::invalid_argument("PosteriorDistribution: expected K^2 probabilities");
}

std::vector<std::uint8_t> indicator_vector(const SoundingLog& log, Hypothesis h) {
  std::vector<std::uint8_t> v(log.size());
  for (std::size_t j = 0; j < log.size(); ++j) v[j] = log[j].pair == h ? 1 : 0;
  return v;
}

CMatrix conditional_covariance(const SoundingLog& log, Hypothesis h, const NoiseModel& noise) {
  const auto m = static_cast<Eigen::Index>(log.size());
  const std::vector<std::uint8_t> v = indicator_vector(log, h);
  Eigen::VectorXd vd(m);
  for (Eigen::Index j = 0; j < m; ++j) vd[j] = v[static_cast<std::size_t>(j)];
  CMatrix sigma = CMatrix::Identity(m, m) * noise.noise_spectral();
  sigma += (log.stage_gain() * vd * vd.transpose()).cast<std::complex<double>>();
  return sigma;
}

double log_likelihood(std::span<const std::complex<double>> y, std::span<const std::uint8_t> v,
                      double gain, double n0) {
  if (!(n0 > 0.0)) throw std::invalid_argument("log_likelihood: noise level must be positive");
  if (y.size() != v.size()) throw std::invalid_argument("log_likelihood: y and v lengths differ");
  if (y.empty()) throw std::invalid_argument("log_likelihood: empty observation");
  const double m = static_cast<double>(y.size());
  double energy = 0.0;
  double n_h = 0.0;
  std::complex<double> projection;
  for (std::size_t j = 0; j < y.size(); ++j) {
    energy += std::norm(y[j]);
    if (v[j]) {
      n_h += 1.0;
      projection += y[j];
    }
  }
  const double log_det = m * std::log(n0) + std::log1p(gain * n_h / n0);
  const double quad = (energy - gain * std::norm(projection) / (n0 + gain * n_h)) / n0;
  return -m * std::log(std::numbers::pi) - log_det - quad;
}

PosteriorDistribution posterior(const SoundingLog& log, const NoiseModel& noise) {
  const std::size_t k = log.branching();
  const std::size_t hypotheses = k * k;
  if (log.size() < hypotheses) throw std::invalid_argument("posterior: initial scan incomplete");
  const double n0 = noise.noise_spectral();
  const double g = log.stage_gain();

  // Sufficient statistics: per-pair sums and counts. Terms shared by every
  // hypothesis (m ln pi, m ln n0, ||y||^2/n0) cancel in the normalization.
  std::vector<std::complex<double>> sums(hypotheses);
  std::vector<double> counts(hypotheses, 0.0);
  for (const MeasurementSlot& slot : log.slots()) {
    const std::size_t idx = canonical_index(slot.pair, k);
    sums[idx] += slot.observation;
    counts[idx] += 1.0;
  }
  std::vector<double> score(hypotheses);
  for (std::size_t h = 0; h < hypotheses; ++h) {
    const double n_h = counts[h];
    score[h] = g * std::norm(sums[h]) / (n0 * (n0 + g * n_h)) - std::log1p(g * n_h / n0);
  }
  const double peak = *std::max_element(score.begin(), score.end());
  double total = 0.0;
  for (double& s : score) {
    s = std::exp(s - peak);
    total += s;
  }
  for (double& s : score) s /= total;
  return PosteriorDistribution(k, std::move(score));
}

MapEstimate map_estimate(const PosteriorDistribution& post) {
  const auto& p = post.probabilities();
  // max_element returns the first maximum: lowest canonical index wins ties.
  const auto best = std::max_element(p.begin(), p.end());
  const auto index = static_cast<std::size_t>(best - p.begin());
  return {pair_at(index, post.branching()), *best};
}

std::complex<double> estimate_alpha(std::complex<double> observation, double transmit_power,
                                    std::size_t n_antennas, double gain_constant) {
  return observation /
         (std::sqrt(transmit_power) * static_cast<double>(n_antennas) * gain_constant * gain_constant);
}

}  // namespace race
