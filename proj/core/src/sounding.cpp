#include "race/sounding.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace race {
namespace {

constexpr double kUnitNormTolerance = 1e-9;

void require_unit_norm(const BeamVector& beam, const char* which) {
  if (std::abs(beam.coefficients.norm() - 1.0) > kUnitNormTolerance)
    throw std::invalid_argument(std::string("measure: ") + which + " beam is not unit-norm");
}

}  // namespace

SoundingLog::SoundingLog(std::size_t stage, std::size_t branching, double stage_gain)
    : stage_(stage), branching_(branching), gain_(stage_gain) {
  if (branching_ < 2) throw std::invalid_argument("SoundingLog: branching must be >= 2");
  slots_.reserve(branching_ * branching_);
}

void SoundingLog::push(SubRangePair pair, std::complex<double> observation) {
  if (pair.tx_k >= branching_ || pair.rx_k >= branching_)
    throw std::out_of_range("SoundingLog: sub-range pair outside the stage");
  slots_.push_back({pair, observation});
}

std::size_t SoundingLog::count(SubRangePair pair) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [&](const MeasurementSlot& s) { return s.pair == pair; }));
}

double StageContext::stage_gain(const NoiseModel& noise) const {
  const double c = codebook->gain_constant(stage);
  const double array_gain = static_cast<double>(codebook->plan().n_antennas()) * c * c;
  return noise.transmit_power() * noise.path_variance() * array_gain * array_gain;
}

std::complex<double> noiseless_response(const ChannelRealization& channel, const AngleGrid& grid,
                                        const CVector& f, const CVector& w) {
  // w^H H f = alpha N (w^H u_r)(u_t^H f)
  const std::complex<double> rx = w.dot(grid.steering(channel.rx_index));
  const std::complex<double> tx = grid.steering(channel.tx_index).dot(f);
  return channel.alpha * static_cast<double>(grid.size()) * rx * tx;
}

std::complex<double> measure(const ChannelRealization& channel, const AngleGrid& grid,
                             const BeamVector& f, const BeamVector& w, const NoiseModel& noise,
                             RandomStream& rng) {
  require_unit_norm(f, "transmit");
  require_unit_norm(w, "receive");
  std::complex<double> y =
      std::sqrt(noise.transmit_power()) * noiseless_response(channel, grid, f.coefficients, w.coefficients);
  if (noise.inject_noise()) y += sample_complex_normal(rng, noise.noise_spectral());
  return y;
}

SoundingLog initial_scan(const StageContext& stage, const ChannelRealization& channel,
                         const NoiseModel& noise, RandomStream& rng) {
  const std::size_t k = stage.branching();
  SoundingLog log(stage.stage, k, stage.stage_gain(noise));
  for (std::size_t j = 0; j < k * k; ++j) {
    const SubRangePair pair = pair_at(j, k);
    log.push(pair, measure(channel, stage.codebook->grid(), stage.tx_beam(pair.tx_k),
                           stage.rx_beam(pair.rx_k), noise, rng));
  }
  return log;
}

void append_measurement(SoundingLog& log, SubRangePair pair, const StageContext& stage,
                        const ChannelRealization& channel, const NoiseModel& noise,
                        RandomStream& rng) {
  if (log.size() < log.branching() * log.branching())
    throw std::logic_error("append_measurement: initial scan incomplete");
  log.push(pair, measure(channel, stage.codebook->grid(), stage.tx_beam(pair.tx_k),
                         stage.rx_beam(pair.rx_k), noise, rng));
}

void write_log_jsonl(const SoundingLog& log, std::ostream& out) {
  for (const MeasurementSlot& slot : log.slots()) {
    const nlohmann::json line = {{"stage", log.stage()},
                                 {"tx_k", slot.pair.tx_k + 1},
                                 {"rx_k", slot.pair.rx_k + 1},
                                 {"re", slot.observation.real()},
                                 {"im", slot.observation.imag()}};
    out << line.dump() << '\n';
  }
}

}  // namespace race
