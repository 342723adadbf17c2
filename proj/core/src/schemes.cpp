#include "race/schemes.hpp"

#include <bit>
#include <optional>
#include <stdexcept>
#include <string>

namespace race {
namespace {

struct AdaptiveRule {
  double gamma;
  std::size_t m_max;
};

EstimationOutcome run_stages(const Codebook& codebook, const ChannelRealization& channel,
                             const NoiseModel& noise, RandomStream& rng, RunOptions options,
                             std::optional<AdaptiveRule> rule) {
  const StagePlan& plan = codebook.plan();
  EstimationOutcome out;
  out.per_stage_measurements.reserve(plan.stage_count());
  out.stages.reserve(plan.stage_count());

  // Scan cost still owed by the stages after the current one; re-measurements
  // may only spend what is left of the budget after reserving it.
  std::size_t reserved = plan.total_measurements();
  std::size_t tx_parent = 0;
  std::size_t rx_parent = 0;
  for (std::size_t s = 1; s <= plan.stage_count(); ++s) {
    const StageContext ctx{&codebook, s, tx_parent, rx_parent};
    const std::size_t k = ctx.branching();
    StageRecord record{initial_scan(ctx, channel, noise, rng), {}, 0, 0, 0, {}};
    out.total_measurements += k * k;
    reserved -= k * k;

    for (;;) {
      PosteriorDistribution post = posterior(record.log, noise);
      ++record.decision_rounds;
      record.decision = map_estimate(post);
      if (options.record_posteriors) record.posteriors.push_back({record.log.size(), std::move(post)});
      if (!rule) break;
      if (record.decision.probability > 1.0 - rule->gamma) break;
      if (out.total_measurements + reserved >= rule->m_max) break;
      append_measurement(record.log, record.decision.hypothesis, ctx, channel, noise, rng);
      ++out.total_measurements;
    }

    out.feedback_bits += rule ? record.decision_rounds * race_feedback_bits(k)
                              : index_feedback_bits(k);
    out.per_stage_measurements.push_back(record.log.size());
    record.tx_block = tx_parent * k + record.decision.hypothesis.tx_k;
    record.rx_block = rx_parent * k + record.decision.hypothesis.rx_k;
    tx_parent = record.tx_block;
    rx_parent = record.rx_block;
    out.stages.push_back(std::move(record));
  }

  // Final blocks are single grid points.
  out.tx_estimate = tx_parent;
  out.rx_estimate = rx_parent;
  out.success = out.tx_estimate == channel.tx_index && out.rx_estimate == channel.rx_index;

  const StageRecord& last = out.stages.back();
  std::complex<double> sum;
  std::size_t repeats = 0;
  for (const MeasurementSlot& slot : last.log.slots())
    if (slot.pair == last.decision.hypothesis) {
      sum += slot.observation;
      ++repeats;
    }
  out.alpha_estimate = estimate_alpha(sum / static_cast<double>(repeats), noise.transmit_power(),
                                      plan.n_antennas(), codebook.gain_constant(plan.stage_count()));
  return out;
}

}  // namespace

RaceConfig::RaceConfig(double gamma_, std::size_t m_max_, StagePlan plan_)
    : gamma(gamma_), m_max(m_max_), plan(std::move(plan_)) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("RaceConfig: gamma must lie in (0, 1]");
  if (m_max < plan.total_measurements())
    throw std::invalid_argument("RaceConfig: m_max must be at least sum K_s^2 = " +
                                std::to_string(plan.total_measurements()));
}

std::size_t index_feedback_bits(std::size_t branching) {
  return static_cast<std::size_t>(std::bit_width(branching - 1));
}

std::size_t race_feedback_bits(std::size_t branching) { return index_feedback_bits(branching) + 1; }

EstimationOutcome run_fixed(const Codebook& codebook, const ChannelRealization& channel,
                            const NoiseModel& noise, RandomStream& rng, RunOptions options) {
  return run_stages(codebook, channel, noise, rng, options, std::nullopt);
}

EstimationOutcome run_fixed(const StagePlan& plan, const ChannelRealization& channel,
                            const NoiseModel& noise, RandomStream& rng, RunOptions options) {
  return run_fixed(build_codebook(plan, AngleGrid(plan.n_antennas())), channel, noise, rng, options);
}

EstimationOutcome run_race(const RaceConfig& cfg, const Codebook& codebook,
                           const ChannelRealization& channel, const NoiseModel& noise,
                           RandomStream& rng, RunOptions options) {
  if (!(codebook.plan() == cfg.plan)) throw std::invalid_argument("run_race: codebook plan differs from config");
  return run_stages(codebook, channel, noise, rng, options, AdaptiveRule{cfg.gamma, cfg.m_max});
}

EstimationOutcome run_race(const RaceConfig& cfg, const ChannelRealization& channel,
                           const NoiseModel& noise, RandomStream& rng, RunOptions options) {
  return run_race(cfg, build_codebook(cfg.plan, AngleGrid(cfg.plan.n_antennas())), channel, noise, rng, options);
}

}  // namespace race
