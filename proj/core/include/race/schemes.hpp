#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "race/array_channel.hpp"
#include "race/codebook.hpp"
#include "race/ml_estimator.hpp"
#include "race/random.hpp"
#include "race/sounding.hpp"

namespace race {

/// Target error probability gamma in (0, 1], global budget m_max >= sum K_s^2.
struct RaceConfig {
  double gamma = 1e-2;
  std::size_t m_max = 0;
  StagePlan plan;

  RaceConfig(double gamma, std::size_t m_max, StagePlan plan);
};

struct PosteriorSnapshot {
  std::size_t measurements = 0;  // slots in the stage log when evaluated
  PosteriorDistribution distribution;
};

/// What happened in one stage: its measurements, the decision taken and the
/// blocks descended into.
struct StageRecord {
  SoundingLog log;
  MapEstimate decision;
  std::size_t tx_block = 0;  // chosen stage-s block
  std::size_t rx_block = 0;
  std::size_t decision_rounds = 0;
  std::vector<PosteriorSnapshot> posteriors;  // filled only when recording
};

struct EstimationOutcome {
  std::size_t tx_estimate = 0;
  std::size_t rx_estimate = 0;
  std::complex<double> alpha_estimate;
  std::size_t total_measurements = 0;
  std::size_t feedback_bits = 0;
  std::vector<std::size_t> per_stage_measurements;
  bool success = false;
  std::vector<StageRecord> stages;
};

struct RunOptions {
  bool record_posteriors = false;
};

/// ceil(log2(K)): bits to feed back a transmit sub-range index.
std::size_t index_feedback_bits(std::size_t branching);
/// ceil(log2(K) + 1): index plus the continue/stop flag.
std::size_t race_feedback_bits(std::size_t branching);

/// Multi-stage baseline: K_s^2 scan per stage, MAP decision, descend.
EstimationOutcome run_fixed(const Codebook& codebook, const ChannelRealization& channel,
                            const NoiseModel& noise, RandomStream& rng, RunOptions options = {});
EstimationOutcome run_fixed(const StagePlan& plan, const ChannelRealization& channel,
                            const NoiseModel& noise, RandomStream& rng, RunOptions options = {});

/// Rate-adaptive estimation: after the K_s^2 scan, re-measure the MAP pair
/// until its posterior exceeds 1 - gamma or the budget is spent. Scans of later
/// stages are reserved up front, so total_measurements never exceeds m_max.
/// The codebook's plan must equal cfg.plan.
EstimationOutcome run_race(const RaceConfig& cfg, const Codebook& codebook,
                           const ChannelRealization& channel, const NoiseModel& noise,
                           RandomStream& rng, RunOptions options = {});
EstimationOutcome run_race(const RaceConfig& cfg, const ChannelRealization& channel,
                           const NoiseModel& noise, RandomStream& rng, RunOptions options = {});

}  // namespace race
