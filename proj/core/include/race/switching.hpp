#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "race/codebook.hpp"

namespace race {

/// Fixed-rate plan used from `snr_threshold_db` upward (until the next entry).
struct SwitchEntry {
  double snr_threshold_db = -std::numeric_limits<double>::infinity();
  StagePlan plan;
};

/// Piecewise SNR -> plan map for the rate-switching benchmark. Thresholds are
/// strictly increasing.
class SwitchTable {
 public:
  explicit SwitchTable(std::vector<SwitchEntry> entries);

  const std::vector<SwitchEntry>& entries() const noexcept { return entries_; }

  /// JSON array of {"snr_db": number|null, "k_vector": [...]}; null is -inf.
  nlohmann::json to_json() const;
  static SwitchTable from_json(const nlohmann::json& doc);
  static SwitchTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<SwitchEntry> entries_;
};

/// Plan of the highest threshold <= snr_db; below every threshold, the plan
/// with the largest M_T. Throws std::invalid_argument for an empty table.
StagePlan select_scheme(const std::vector<SwitchEntry>& entries, double snr_db);
inline StagePlan select_scheme(const SwitchTable& table, double snr_db) {
  return select_scheme(table.entries(), snr_db);
}

struct CalibrationRequest {
  std::vector<StagePlan> candidates;  // ascending M_T
  std::vector<double> snr_grid_db;    // ascending
  double gamma = 1e-2;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double path_variance = 1.0;
  std::size_t workers = 1;
};

/// Per-plan fixed-rate PEE at one calibration SNR.
struct CalibrationPoint {
  double snr_db = 0.0;
  std::vector<double> pee;  // one per candidate
  std::size_t selected = 0;
};

/// Monte Carlo PEE for every (candidate, snr) pair; picks the cheapest plan
/// with PEE <= gamma (else the lowest-PEE plan) and merges runs of equal
/// picks into table entries. Throws std::invalid_argument for trials < 100.
SwitchTable calibrate_switch_table(const CalibrationRequest& request,
                                   std::vector<CalibrationPoint>* diagnostics = nullptr);

}  // namespace race
