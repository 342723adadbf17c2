#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include <Eigen/Dense>

#include "race/random.hpp"

namespace race {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// ULA array response toward normalized spatial frequency `epsilon`:
/// entry k is exp(j*2*pi*epsilon*k)/sqrt(n). Throws std::invalid_argument for n == 0.
CVector steering_vector(double epsilon, std::size_t n);

/// Maps a physical angle theta in [0, pi) to spatial frequency spacing_ratio*sin(theta).
double physical_to_spatial(double theta, double spacing_ratio = 0.5);

/// The N-point spatial-frequency grid eps_i = i/N with its (unitary)
/// steering matrix U = [u(eps_0), ..., u(eps_{N-1})].
class AngleGrid {
 public:
  explicit AngleGrid(std::size_t n_antennas);

  std::size_t size() const noexcept { return n_; }
  double frequency(std::size_t i) const;
  const CMatrix& steering_matrix() const noexcept { return *steering_; }
  auto steering(std::size_t i) const { return steering_->col(static_cast<Eigen::Index>(i)); }

 private:
  std::size_t n_;
  std::shared_ptr<const CMatrix> steering_;
};

/// Link-budget parameters: transmit power P, noise level N0 and path variance P_R,
/// all linear and strictly positive.
///
/// `inject_noise() == false` keeps N0 as the receiver's assumed noise level but
/// makes the simulated channel noiseless.
class NoiseModel {
 public:
  NoiseModel(double transmit_power, double noise_spectral, double path_variance);

  /// P = 1, N0 = 10^(-snr_db/10).
  static NoiseModel from_snr_db(double snr_db, double path_variance = 1.0);

  double transmit_power() const noexcept { return power_; }
  double noise_spectral() const noexcept { return n0_; }
  double path_variance() const noexcept { return path_variance_; }
  bool inject_noise() const noexcept { return inject_noise_; }
  double snr_db() const;

  NoiseModel noiseless() const {
    NoiseModel copy = *this;
    copy.inject_noise_ = false;
    return copy;
  }

 private:
  double power_;
  double n0_;
  double path_variance_;
  bool inject_noise_ = true;
};

/// A single on-grid propagation path.
struct ChannelRealization {
  std::complex<double> alpha;
  std::size_t tx_index = 0;
  std::size_t rx_index = 0;
};

/// Uniform AOD/AOA grid indices, alpha ~ CN(0, P_R). Draw order: tx, rx, alpha.
ChannelRealization sample_channel(const AngleGrid& grid, const NoiseModel& noise, RandomStream& rng);

/// Dense H = alpha * N * u(phi_r) u(phi_t)^H.
CMatrix channel_matrix(const ChannelRealization& channel, const AngleGrid& grid);

}  // namespace race
