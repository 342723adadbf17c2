#include "race/harness.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "race/parallel.hpp"

namespace race {
namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing required field");
  return obj.at(key);
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path, "expected a number");
  return value.get<double>();
}

std::size_t as_count(const json& value, const std::string& path) {
  if (!value.is_number_integer() || value.get<long long>() < 0)
    throw ConfigError(path, "expected a non-negative integer");
  return value.get<std::size_t>();
}

StagePlan as_plan(const json& value, std::size_t n, const std::string& path) {
  if (!value.is_array() || value.empty()) throw ConfigError(path, "expected a non-empty array of integers");
  std::vector<std::size_t> ks;
  for (std::size_t i = 0; i < value.size(); ++i)
    ks.push_back(as_count(value[i], path + "[" + std::to_string(i) + "]"));
  try {
    return StagePlan(std::move(ks), n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

SchemeSpec parse_scheme(const json& obj, std::size_t n, const std::filesystem::path& base_dir,
                        const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  SchemeSpec spec;
  const json& name = require(obj, "name", path);
  if (!name.is_string() || name.get<std::string>().empty()) throw ConfigError(path + ".name", "expected a non-empty string");
  spec.name = name.get<std::string>();

  const json& kind = require(obj, "kind", path);
  const std::string kind_name = kind.is_string() ? kind.get<std::string>() : "";
  if (kind_name == "fixed") {
    spec.kind = SchemeKind::fixed;
    spec.plan = as_plan(require(obj, "k_vector", path), n, path + ".k_vector");
  } else if (kind_name == "race") {
    spec.kind = SchemeKind::race;
    spec.plan = as_plan(require(obj, "k_vector", path), n, path + ".k_vector");
    spec.gamma = as_number(require(obj, "gamma", path), path + ".gamma");
    if (!(spec.gamma > 0.0 && spec.gamma <= 1.0)) throw ConfigError(path + ".gamma", "must lie in (0, 1]");
    spec.m_max = as_count(require(obj, "m_max", path), path + ".m_max");
    if (spec.m_max < spec.plan->total_measurements())
      throw ConfigError(path + ".m_max", "must be at least sum K_s^2 = " + std::to_string(spec.plan->total_measurements()));
  } else if (kind_name == "switch") {
    spec.kind = SchemeKind::rate_switch;
    try {
      if (obj.contains("table")) {
        spec.table = SwitchTable::from_json(obj.at("table"));
      } else if (obj.contains("table_file")) {
        std::filesystem::path file = obj.at("table_file").get<std::string>();
        if (file.is_relative()) file = base_dir / file;
        spec.table = SwitchTable::load(file);
      } else {
        throw ConfigError(path, "switch scheme needs 'table' or 'table_file'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(path + ".table", e.what());
    }
    for (std::size_t i = 0; i < spec.table->entries().size(); ++i)
      if (spec.table->entries()[i].plan.n_antennas() != n)
        throw ConfigError(path + ".table[" + std::to_string(i) + "].k_vector", "product must equal n_antennas");
  } else {
    throw ConfigError(path + ".kind", "expected one of fixed, race, switch");
  }
  return spec;
}

struct TrialResult {
  bool success = false;
  std::size_t measurements = 0;
  std::size_t feedback_bits = 0;
  double alpha_error = 0.0;
  double alpha_power = 0.0;
};

}  // namespace

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::fixed: return "fixed";
    case SchemeKind::race: return "race";
    case SchemeKind::rate_switch: return "switch";
  }
  return "unknown";
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("$", "expected a JSON object");
  ExperimentConfig cfg;
  cfg.n_antennas = as_count(require(doc, "n_antennas", "$"), "$.n_antennas");
  if (cfg.n_antennas < 2) throw ConfigError("$.n_antennas", "must be at least 2");

  const json& grid = require(doc, "snr_grid_db", "$");
  if (!grid.is_array() || grid.empty()) throw ConfigError("$.snr_grid_db", "expected a non-empty array");
  for (std::size_t i = 0; i < grid.size(); ++i)
    cfg.snr_grid_db.push_back(as_number(grid[i], "$.snr_grid_db[" + std::to_string(i) + "]"));

  cfg.trials_per_point = as_count(require(doc, "trials_per_point", "$"), "$.trials_per_point");
  if (cfg.trials_per_point < 1) throw ConfigError("$.trials_per_point", "must be at least 1");
  if (doc.contains("master_seed")) {
    const json& seed = doc.at("master_seed");
    if (!seed.is_number_integer()) throw ConfigError("$.master_seed", "expected an integer");
    cfg.master_seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("p_r")) {
    cfg.p_r = as_number(doc.at("p_r"), "$.p_r");
    if (!(cfg.p_r > 0.0)) throw ConfigError("$.p_r", "must be positive");
  }
  if (doc.contains("outage_threshold") && !doc.at("outage_threshold").is_null())
    cfg.outage_threshold = as_number(doc.at("outage_threshold"), "$.outage_threshold");

  const json& schemes = require(doc, "schemes", "$");
  if (!schemes.is_array() || schemes.empty()) throw ConfigError("$.schemes", "expected a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const std::string path = "$.schemes[" + std::to_string(i) + "]";
    SchemeSpec spec = parse_scheme(schemes[i], cfg.n_antennas, base_dir, path);
    if (!names.insert(spec.name).second) throw ConfigError(path + ".name", "duplicate scheme name '" + spec.name + "'");
    cfg.schemes.push_back(std::move(spec));
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

PreparedScheme::PreparedScheme(SchemeSpec spec, std::size_t n_antennas) : spec_(std::move(spec)) {
  const AngleGrid grid(n_antennas);
  std::vector<StagePlan> plans;
  if (spec_.kind == SchemeKind::rate_switch) {
    if (!spec_.table) throw std::invalid_argument("PreparedScheme: switch scheme without a table");
    for (const SwitchEntry& e : spec_.table->entries()) plans.push_back(e.plan);
  } else {
    if (!spec_.plan) throw std::invalid_argument("PreparedScheme: scheme without a plan");
    plans.push_back(*spec_.plan);
    if (spec_.kind == SchemeKind::race) race_.emplace(spec_.gamma, spec_.m_max, *spec_.plan);
  }
  for (const StagePlan& plan : plans) {
    if (plan.n_antennas() != n_antennas) throw std::invalid_argument("PreparedScheme: plan does not match N");
    codebooks_.push_back(std::make_unique<Codebook>(plan, grid));
  }
}

const Codebook& PreparedScheme::codebook_for(const StagePlan& plan) const {
  for (const auto& cb : codebooks_)
    if (cb->plan() == plan) return *cb;
  throw std::logic_error("PreparedScheme: no codebook for plan " + plan.to_string());
}

EstimationOutcome PreparedScheme::run_trial(double snr_db, const ChannelRealization& channel,
                                            const NoiseModel& noise, RandomStream& rng,
                                            RunOptions options) const {
  switch (spec_.kind) {
    case SchemeKind::fixed:
      return run_fixed(*codebooks_.front(), channel, noise, rng, options);
    case SchemeKind::race:
      return run_race(*race_, *codebooks_.front(), channel, noise, rng, options);
    case SchemeKind::rate_switch:
      return run_fixed(codebook_for(select_scheme(*spec_.table, snr_db)), channel, noise, rng, options);
  }
  throw std::logic_error("PreparedScheme: unknown scheme kind");
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t scheme_id, std::uint64_t point_id,
                         std::uint64_t trial) {
  return derive_seed({master, scheme_id, point_id, trial});
}

MetricsRow run_point(const PreparedScheme& scheme, const PointRequest& req) {
  const NoiseModel noise = NoiseModel::from_snr_db(req.snr_db, req.p_r);
  const std::size_t n = scheme.spec().plan ? scheme.spec().plan->n_antennas()
                                            : scheme.spec().table->entries().front().plan.n_antennas();
  const AngleGrid grid(n);

  std::vector<TrialResult> results(req.trials);
  parallel_for(req.trials, req.workers, [&](std::size_t t) {
    // The channel stream omits the scheme id so every scheme sees the same
    // channel sequence at a grid point; noise streams stay per scheme.
    RandomStream channel_rng = make_stream(derive_seed({req.master_seed, req.point_id, t}));
    const ChannelRealization channel = sample_channel(grid, noise, channel_rng);
    RandomStream noise_rng = make_stream(trial_seed(req.master_seed, req.scheme_id, req.point_id, t));
    const EstimationOutcome out = scheme.run_trial(req.snr_db, channel, noise, noise_rng);
    results[t] = {out.success, out.total_measurements, out.feedback_bits,
                  std::norm(out.alpha_estimate - channel.alpha), std::norm(channel.alpha)};
  });

  MetricsRow row;
  row.scheme = scheme.spec().name;
  row.snr_db = req.snr_db;
  row.trials = req.trials;
  double errors = 0.0, meas = 0.0, meas_sq = 0.0, bits = 0.0, mse = 0.0;
  double kept = 0.0, kept_errors = 0.0;
  for (const TrialResult& r : results) {
    errors += r.success ? 0.0 : 1.0;
    meas += static_cast<double>(r.measurements);
    meas_sq += static_cast<double>(r.measurements) * static_cast<double>(r.measurements);
    bits += static_cast<double>(r.feedback_bits);
    mse += r.alpha_error;
    if (req.outage_threshold && r.alpha_power > *req.outage_threshold) {
      kept += 1.0;
      kept_errors += r.success ? 0.0 : 1.0;
    }
  }
  const double trials = static_cast<double>(req.trials);
  row.pee = errors / trials;
  row.pee_ci95 = 1.96 * std::sqrt(row.pee * (1.0 - row.pee) / trials);
  row.avg_measurements = meas / trials;
  row.avg_feedback_bits = bits / trials;
  row.avg_alpha_mse = mse / trials;
  const double variance = std::max(0.0, meas_sq / trials - row.avg_measurements * row.avg_measurements);
  row.measurements_ci95 = 1.96 * std::sqrt(variance / trials);
  if (req.outage_threshold) row.pee_above_outage = kept > 0.0 ? kept_errors / kept : 0.0;
  return row;
}

MetricsTable run_sweep(const ExperimentConfig& cfg, std::size_t workers) {
  MetricsTable table;
  table.reserve(cfg.schemes.size() * cfg.snr_grid_db.size());
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    const PreparedScheme scheme(cfg.schemes[s], cfg.n_antennas);
    for (std::size_t g = 0; g < cfg.snr_grid_db.size(); ++g) {
      PointRequest req;
      req.snr_db = cfg.snr_grid_db[g];
      req.trials = cfg.trials_per_point;
      req.master_seed = cfg.master_seed;
      req.scheme_id = s;
      req.point_id = g;
      req.p_r = cfg.p_r;
      req.outage_threshold = cfg.outage_threshold;
      req.workers = workers;
      table.push_back(run_point(scheme, req));
    }
  }
  return table;
}

}  // namespace race
