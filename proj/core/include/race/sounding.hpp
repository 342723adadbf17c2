#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "race/array_channel.hpp"
#include "race/codebook.hpp"
#include "race/random.hpp"

namespace race {

/// Transmit/receive sub-range choice within one stage, 0-based in [0, K).
struct SubRangePair {
  std::size_t tx_k = 0;
  std::size_t rx_k = 0;

  friend bool operator==(const SubRangePair&, const SubRangePair&) = default;
};

/// Canonical slot order of the initial scan: receiver index varies fastest.
constexpr std::size_t canonical_index(SubRangePair pair, std::size_t branching) noexcept {
  return pair.tx_k * branching + pair.rx_k;
}
constexpr SubRangePair pair_at(std::size_t index, std::size_t branching) noexcept {
  return {index / branching, index % branching};
}

struct MeasurementSlot {
  SubRangePair pair;
  std::complex<double> observation;
};

/// Ordered measurements of one stage. The first K^2 slots are the canonical
/// scan; later slots are re-measurements.
class SoundingLog {
 public:
  SoundingLog(std::size_t stage, std::size_t branching, double stage_gain);

  std::size_t stage() const noexcept { return stage_; }
  std::size_t branching() const noexcept { return branching_; }
  /// g = P * P_R * (N * C_s^2)^2, the on-path signal power of one slot.
  double stage_gain() const noexcept { return gain_; }
  std::size_t size() const noexcept { return slots_.size(); }
  const std::vector<MeasurementSlot>& slots() const noexcept { return slots_; }
  const MeasurementSlot& operator[](std::size_t j) const { return slots_[j]; }

  void push(SubRangePair pair, std::complex<double> observation);
  std::size_t count(SubRangePair pair) const noexcept;

 private:
  std::size_t stage_;
  std::size_t branching_;
  double gain_;
  std::vector<MeasurementSlot> slots_;
};

/// Beams available to one stage: the children of the surviving transmit and
/// receive blocks of the previous stage.
struct StageContext {
  const Codebook* codebook = nullptr;
  std::size_t stage = 1;
  std::size_t tx_parent = 0;
  std::size_t rx_parent = 0;

  std::size_t branching() const { return codebook->plan().branching(stage); }
  const BeamVector& tx_beam(std::size_t k) const { return codebook->child(stage, tx_parent, k); }
  const BeamVector& rx_beam(std::size_t k) const { return codebook->child(stage, rx_parent, k); }
  double stage_gain(const NoiseModel& noise) const;
};

/// w^H H f without noise, evaluated through the rank-1 structure of H.
std::complex<double> noiseless_response(const ChannelRealization& channel, const AngleGrid& grid,
                                        const CVector& f, const CVector& w);

/// One pilot slot: sqrt(P) w^H H f + w^H q with pilot x = 1. Because ||w|| = 1
/// the noise projection is drawn directly as CN(0, N0).
/// Throws std::invalid_argument for beams that are not unit-norm.
std::complex<double> measure(const ChannelRealization& channel, const AngleGrid& grid,
                             const BeamVector& f, const BeamVector& w, const NoiseModel& noise,
                             RandomStream& rng);

/// Measures all K^2 beam pairs of the stage in canonical order.
SoundingLog initial_scan(const StageContext& stage, const ChannelRealization& channel,
                         const NoiseModel& noise, RandomStream& rng);

/// Re-measures `pair` and appends the observation.
void append_measurement(SoundingLog& log, SubRangePair pair, const StageContext& stage,
                        const ChannelRealization& channel, const NoiseModel& noise,
                        RandomStream& rng);

/// JSON lines, one object per slot: {"stage","tx_k","rx_k","re","im"} with
/// 1-based stage and sub-range indices.
void write_log_jsonl(const SoundingLog& log, std::ostream& out);

}  // namespace race
