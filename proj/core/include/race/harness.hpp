#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "race/codebook.hpp"
#include "race/schemes.hpp"
#include "race/switching.hpp"

namespace race {

/// Invalid experiment configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class SchemeKind { fixed, race, rate_switch };

std::string to_string(SchemeKind kind);

struct SchemeSpec {
  std::string name;
  SchemeKind kind = SchemeKind::fixed;
  std::optional<StagePlan> plan;       // fixed, race
  double gamma = 1e-2;                 // race
  std::size_t m_max = 0;               // race
  std::optional<SwitchTable> table;    // rate_switch
};

struct ExperimentConfig {
  std::size_t n_antennas = 64;
  std::vector<double> snr_grid_db;
  std::size_t trials_per_point = 1000;
  std::vector<SchemeSpec> schemes;
  std::uint64_t master_seed = 0;
  double p_r = 1.0;
  /// When set, rows also report PEE over trials with |alpha|^2 above it.
  std::optional<double> outage_threshold;
};

/// Parses and validates the JSON config. Relative `table_file` paths are
/// resolved against `base_dir`. Throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct MetricsRow {
  std::string scheme;
  double snr_db = 0.0;
  double pee = 0.0;
  double pee_ci95 = 0.0;
  double avg_measurements = 0.0;
  double avg_feedback_bits = 0.0;
  double avg_alpha_mse = 0.0;
  std::size_t trials = 0;

  // Not part of the emitted table.
  double measurements_ci95 = 0.0;
  std::optional<double> pee_above_outage;
};

using MetricsTable = std::vector<MetricsRow>;

/// A scheme with its codebooks built once and shared read-only by all trials.
class PreparedScheme {
 public:
  PreparedScheme(SchemeSpec spec, std::size_t n_antennas);

  const SchemeSpec& spec() const noexcept { return spec_; }
  /// `snr_db` selects the plan of a switch scheme; other kinds ignore it.
  EstimationOutcome run_trial(double snr_db, const ChannelRealization& channel,
                              const NoiseModel& noise, RandomStream& rng,
                              RunOptions options = {}) const;

 private:
  const Codebook& codebook_for(const StagePlan& plan) const;

  SchemeSpec spec_;
  std::optional<RaceConfig> race_;
  std::vector<std::unique_ptr<Codebook>> codebooks_;
};

struct PointRequest {
  double snr_db = 0.0;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t scheme_id = 0;
  std::uint64_t point_id = 0;
  double p_r = 1.0;
  std::optional<double> outage_threshold;
  std::size_t workers = 1;
};

/// Seed of trial `trial`: derive_seed({master, scheme, point, trial}).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t scheme_id, std::uint64_t point_id,
                         std::uint64_t trial);

/// Runs `trials` independent trials (fresh channel and noise each) and
/// reduces them in trial order, so the row does not depend on `workers`.
MetricsRow run_point(const PreparedScheme& scheme, const PointRequest& request);

/// Schemes x SNR grid, scheme-major order.
MetricsTable run_sweep(const ExperimentConfig& cfg, std::size_t workers = 1);

}  // namespace race
