#pragma once

#include <iosfwd>

#include "race/array_channel.hpp"
#include "race/schemes.hpp"

namespace race {

/// Single-trial dump as JSON lines: a "channel" record, then per stage every
/// "slot" interleaved with the "posterior" evaluated after it, a "decision"
/// per stage and a closing "outcome". Stage and sub-range indices are 1-based;
/// grid indices are 0-based. The outcome must have been run with
/// RunOptions::record_posteriors.
void write_trial_trace(const ChannelRealization& channel, const NoiseModel& noise,
                       const EstimationOutcome& outcome, std::ostream& out);

}  // namespace race
