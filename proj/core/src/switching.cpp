#include "race/switching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "race/array_channel.hpp"
#include "race/parallel.hpp"
#include "race/schemes.hpp"

namespace race {

SwitchTable::SwitchTable(std::vector<SwitchEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("SwitchTable: at least one entry required");
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (!(entries_[i].snr_threshold_db > entries_[i - 1].snr_threshold_db))
      throw std::invalid_argument("SwitchTable: thresholds must be strictly increasing");
  for (const SwitchEntry& e : entries_)
    if (std::isnan(e.snr_threshold_db) || e.snr_threshold_db == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("SwitchTable: threshold must be finite or -inf");
}

nlohmann::json SwitchTable::to_json() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const SwitchEntry& e : entries_) {
    nlohmann::json row;
    row["snr_db"] = std::isinf(e.snr_threshold_db) ? nlohmann::json(nullptr) : nlohmann::json(e.snr_threshold_db);
    row["k_vector"] = e.plan.k_vector();
    doc.push_back(std::move(row));
  }
  return doc;
}

SwitchTable SwitchTable::from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("SwitchTable: expected a JSON array");
  std::vector<SwitchEntry> entries;
  for (const nlohmann::json& row : doc) {
    if (!row.is_object() || !row.contains("k_vector"))
      throw std::invalid_argument("SwitchTable: each entry needs snr_db and k_vector");
    const nlohmann::json& snr = row.value("snr_db", nlohmann::json(nullptr));
    const double threshold = snr.is_null() ? -std::numeric_limits<double>::infinity() : snr.get<double>();
    entries.push_back({threshold, StagePlan(row.at("k_vector").get<std::vector<std::size_t>>())});
  }
  return SwitchTable(std::move(entries));
}

SwitchTable SwitchTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open switch table " + path.string());
  return from_json(nlohmann::json::parse(in));
}

void SwitchTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write switch table " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

StagePlan select_scheme(const std::vector<SwitchEntry>& entries, double snr_db) {
  if (entries.empty()) throw std::invalid_argument("select_scheme: empty switch table");
  const SwitchEntry* chosen = nullptr;
  for (const SwitchEntry& e : entries)
    if (e.snr_threshold_db <= snr_db) chosen = &e;
  if (chosen) return chosen->plan;
  return std::max_element(entries.begin(), entries.end(), [](const SwitchEntry& a, const SwitchEntry& b) {
           return a.plan.total_measurements() < b.plan.total_measurements();
         })->plan;
}

SwitchTable calibrate_switch_table(const CalibrationRequest& request,
                                   std::vector<CalibrationPoint>* diagnostics) {
  if (request.trials < 100) throw std::invalid_argument("calibrate_switch_table: need at least 100 trials");
  if (request.candidates.empty()) throw std::invalid_argument("calibrate_switch_table: no candidate plans");
  if (request.snr_grid_db.empty()) throw std::invalid_argument("calibrate_switch_table: empty SNR grid");
  if (!(request.gamma > 0.0 && request.gamma <= 1.0))
    throw std::invalid_argument("calibrate_switch_table: gamma must lie in (0, 1]");
  for (std::size_t i = 1; i < request.candidates.size(); ++i) {
    if (request.candidates[i].total_measurements() < request.candidates[i - 1].total_measurements())
      throw std::invalid_argument("calibrate_switch_table: candidates must be sorted by M_T");
    if (request.candidates[i].n_antennas() != request.candidates[0].n_antennas())
      throw std::invalid_argument("calibrate_switch_table: candidates disagree on N");
  }
  if (!std::is_sorted(request.snr_grid_db.begin(), request.snr_grid_db.end()))
    throw std::invalid_argument("calibrate_switch_table: SNR grid must be ascending");

  const AngleGrid grid(request.candidates.front().n_antennas());
  std::vector<Codebook> codebooks;
  for (const StagePlan& plan : request.candidates) codebooks.emplace_back(plan, grid);

  std::vector<SwitchEntry> entries;
  std::size_t previous = request.candidates.size();
  for (std::size_t g = 0; g < request.snr_grid_db.size(); ++g) {
    const NoiseModel noise = NoiseModel::from_snr_db(request.snr_grid_db[g], request.path_variance);
    CalibrationPoint point{request.snr_grid_db[g], {}, 0};
    for (std::size_t c = 0; c < codebooks.size(); ++c) {
      std::vector<std::uint8_t> failed(request.trials, 0);
      parallel_for(request.trials, request.workers, [&](std::size_t t) {
        RandomStream rng = make_stream(derive_seed({request.seed, c, g, t}));
        const ChannelRealization channel = sample_channel(grid, noise, rng);
        failed[t] = run_fixed(codebooks[c], channel, noise, rng).success ? 0 : 1;
      });
      std::size_t errors = 0;
      for (std::uint8_t f : failed) errors += f;
      point.pee.push_back(static_cast<double>(errors) / static_cast<double>(request.trials));
    }

    auto meets = std::find_if(point.pee.begin(), point.pee.end(), [&](double p) { return p <= request.gamma; });
    point.selected = static_cast<std::size_t>(
        meets != point.pee.end() ? meets - point.pee.begin()
                                 : std::min_element(point.pee.begin(), point.pee.end()) - point.pee.begin());
    if (point.selected != previous) {
      const double threshold = entries.empty() ? -std::numeric_limits<double>::infinity() : point.snr_db;
      entries.push_back({threshold, request.candidates[point.selected]});
      previous = point.selected;
    }
    if (diagnostics) diagnostics->push_back(std::move(point));
  }
  return SwitchTable(std::move(entries));
}

}  // namespace race
