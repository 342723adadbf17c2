#include "race/array_channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace race {

CVector steering_vector(double epsilon, std::size_t n) {
  if (n == 0) throw std::invalid_argument("steering_vector: antenna count must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector u(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    // Reduce the phase before the trig call; keeps grid points exact for large k.
    const double turns = epsilon * static_cast<double>(k);
    const double phase = 2.0 * std::numbers::pi * (turns - std::floor(turns));
    u[static_cast<Eigen::Index>(k)] = std::polar(scale, phase);
  }
  return u;
}

double physical_to_spatial(double theta, double spacing_ratio) {
  if (!(theta >= 0.0 && theta < std::numbers::pi))
    throw std::invalid_argument("physical_to_spatial: theta must lie in [0, pi)");
  if (!(spacing_ratio > 0.0))
    throw std::invalid_argument("physical_to_spatial: spacing ratio must be positive");
  return spacing_ratio * std::sin(theta);
}

AngleGrid::AngleGrid(std::size_t n_antennas) : n_(n_antennas) {
  if (n_ == 0) throw std::invalid_argument("AngleGrid: antenna count must be >= 1");
  auto u = std::make_shared<CMatrix>(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) u->col(static_cast<Eigen::Index>(i)) = steering_vector(frequency(i), n_);
  steering_ = std::move(u);
}

double AngleGrid::frequency(std::size_t i) const {
  if (i >= n_) throw std::out_of_range("AngleGrid: index " + std::to_string(i) + " out of range");
  return static_cast<double>(i) / static_cast<double>(n_);
}

NoiseModel::NoiseModel(double transmit_power, double noise_spectral, double path_variance)
    : power_(transmit_power), n0_(noise_spectral), path_variance_(path_variance) {
  if (!(power_ > 0.0) || !std::isfinite(power_))
    throw std::invalid_argument("NoiseModel: transmit power must be positive");
  if (!(n0_ > 0.0) || !std::isfinite(n0_))
    throw std::invalid_argument("NoiseModel: noise level must be positive");
  if (!(path_variance_ > 0.0) || !std::isfinite(path_variance_))
    throw std::invalid_argument("NoiseModel: path variance must be positive");
}

NoiseModel NoiseModel::from_snr_db(double snr_db, double path_variance) {
  return NoiseModel(1.0, std::pow(10.0, -snr_db / 10.0), path_variance);
}

double NoiseModel::snr_db() const { return 10.0 * std::log10(power_ / n0_); }

ChannelRealization sample_channel(const AngleGrid& grid, const NoiseModel& noise, RandomStream& rng) {
  std::uniform_int_distribution<std::size_t> index(0, grid.size() - 1);
  ChannelRealization channel;
  channel.tx_index = index(rng);
  channel.rx_index = index(rng);
  channel.alpha = sample_complex_normal(rng, noise.path_variance());
  return channel;
}

CMatrix channel_matrix(const ChannelRealization& channel, const AngleGrid& grid) {
  const double n = static_cast<double>(grid.size());
  return channel.alpha * n * grid.steering(channel.rx_index) * grid.steering(channel.tx_index).adjoint();
}

}  // namespace race
