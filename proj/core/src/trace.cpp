#include "race/trace.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

namespace race {
namespace {

using nlohmann::json;

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

void write_trial_trace(const ChannelRealization& channel, const NoiseModel& noise,
                       const EstimationOutcome& outcome, std::ostream& out) {
  auto emit = [&](const json& line) { out << line.dump() << '\n'; };

  emit({{"type", "channel"},
        {"tx_index", channel.tx_index},
        {"rx_index", channel.rx_index},
        {"alpha", complex_json(channel.alpha)},
        {"transmit_power", noise.transmit_power()},
        {"noise_spectral", noise.noise_spectral()},
        {"snr_db", noise.snr_db()}});

  for (const StageRecord& stage : outcome.stages) {
    const SoundingLog& log = stage.log;
    auto snapshot = stage.posteriors.begin();
    for (std::size_t j = 0; j < log.size(); ++j) {
      const MeasurementSlot& slot = log[j];
      emit({{"type", "slot"},
            {"stage", log.stage()},
            {"slot", j + 1},
            {"tx_k", slot.pair.tx_k + 1},
            {"rx_k", slot.pair.rx_k + 1},
            {"re", slot.observation.real()},
            {"im", slot.observation.imag()}});
      for (; snapshot != stage.posteriors.end() && snapshot->measurements == j + 1; ++snapshot) {
        const MapEstimate map = map_estimate(snapshot->distribution);
        emit({{"type", "posterior"},
              {"stage", log.stage()},
              {"measurements", snapshot->measurements},
              {"probabilities", snapshot->distribution.probabilities()},
              {"map_tx_k", map.hypothesis.tx_k + 1},
              {"map_rx_k", map.hypothesis.rx_k + 1},
              {"map_probability", map.probability}});
      }
    }
    emit({{"type", "decision"},
          {"stage", log.stage()},
          {"tx_k", stage.decision.hypothesis.tx_k + 1},
          {"rx_k", stage.decision.hypothesis.rx_k + 1},
          {"probability", stage.decision.probability},
          {"tx_block", stage.tx_block},
          {"rx_block", stage.rx_block},
          {"measurements", log.size()},
          {"decision_rounds", stage.decision_rounds}});
  }

  emit({{"type", "outcome"},
        {"tx_estimate", outcome.tx_estimate},
        {"rx_estimate", outcome.rx_estimate},
        {"alpha_estimate", complex_json(outcome.alpha_estimate)},
        {"total_measurements", outcome.total_measurements},
        {"feedback_bits", outcome.feedback_bits},
        {"per_stage_measurements", outcome.per_stage_measurements},
        {"success", outcome.success}});
}

}  // namespace race
