// race: Monte Carlo driver for rate-adaptive mmWave channel estimation.
//
//   race sweep --config exp.json --out results.csv [--format csv|json] [--workers n]
//   race trial --scheme race --snr-db 10 --seed 7 [--n 64 --k-vector 2,2,2,2,2,2 ...]
//   race codebook --n 64 --k-vector 2,2,2,2,2,2 --out beams.csv
//   race calibrate-switch --config calib.json --out table.json [--workers n]

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "race/array_channel.hpp"
#include "race/codebook.hpp"
#include "race/harness.hpp"
#include "race/results_io.hpp"
#include "race/schemes.hpp"
#include "race/switching.hpp"
#include "race/trace.hpp"

namespace {

struct SweepArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::size_t workers = 1;
};

struct TrialArgs {
  std::string scheme = "race";
  std::string config;
  double snr_db = 10.0;
  std::uint64_t seed = 0;
  std::size_t n = 64;
  std::vector<std::size_t> k_vector;
  double gamma = 1e-2;
  std::size_t m_max = 264;
  double p_r = 1.0;
  bool noiseless = false;
  std::string out;
};

struct CodebookArgs {
  std::size_t n = 64;
  std::vector<std::size_t> k_vector;
  std::string out;
};

struct CalibrateArgs {
  std::string config;
  std::string out;
  std::size_t workers = 1;
};

race::StagePlan plan_or_default(const std::vector<std::size_t>& k_vector, std::size_t n) {
  return k_vector.empty() ? race::StagePlan::uniform(2, n) : race::StagePlan(k_vector, n);
}

int run_sweep(const SweepArgs& args) {
  const race::ResultFormat format = race::parse_result_format(args.format);
  const race::ExperimentConfig cfg = race::load_experiment_config(args.config);
  const race::MetricsTable table = race::run_sweep(cfg, args.workers);
  race::emit_results(table, format, args.out);
  return 0;
}

int run_trial(const TrialArgs& args) {
  std::optional<race::SchemeSpec> spec;
  std::size_t n = args.n;
  double p_r = args.p_r;
  if (!args.config.empty()) {
    const race::ExperimentConfig cfg = race::load_experiment_config(args.config);
    for (const race::SchemeSpec& s : cfg.schemes)
      if (s.name == args.scheme) spec = s;
    if (!spec) throw std::invalid_argument("scheme '" + args.scheme + "' not found in " + args.config);
    n = cfg.n_antennas;
    p_r = cfg.p_r;
  } else {
    race::SchemeSpec s;
    s.name = args.scheme;
    s.plan = plan_or_default(args.k_vector, n);
    if (args.scheme == "fixed") {
      s.kind = race::SchemeKind::fixed;
    } else if (args.scheme == "race") {
      s.kind = race::SchemeKind::race;
      s.gamma = args.gamma;
      s.m_max = args.m_max;
    } else {
      throw std::invalid_argument("--scheme must be fixed or race (or a scheme name with --config)");
    }
    spec = std::move(s);
  }

  const race::PreparedScheme scheme(*spec, n);
  race::NoiseModel noise = race::NoiseModel::from_snr_db(args.snr_db, p_r);
  if (args.noiseless) noise = noise.noiseless();
  race::RandomStream channel_rng = race::make_stream(race::derive_seed({args.seed, 0}));
  const race::ChannelRealization channel = race::sample_channel(race::AngleGrid(n), noise, channel_rng);
  race::RandomStream noise_rng = race::make_stream(race::derive_seed({args.seed, 1}));
  const race::EstimationOutcome outcome =
      scheme.run_trial(args.snr_db, channel, noise, noise_rng, race::RunOptions{true});

  if (args.out.empty()) {
    race::write_trial_trace(channel, noise, outcome, std::cout);
  } else {
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot open '" + args.out + "' for writing");
    race::write_trial_trace(channel, noise, outcome, out);
  }
  return 0;
}

int run_codebook(const CodebookArgs& args) {
  const race::Codebook codebook = race::build_codebook(plan_or_default(args.k_vector, args.n),
                                                       race::AngleGrid(args.n));
  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot open '" + args.out + "' for writing");
  race::write_beam_patterns_csv(codebook, out);
  if (!out) throw std::runtime_error("write failed for '" + args.out + "'");
  return 0;
}

// Calibration config:
// {"n_antennas": 64, "candidates": [[2,2,2,2,2,2], [4,2,2,2,2], ...],
//  "snr_grid_db": [...], "gamma": 0.01, "trials": 2000, "seed": 1, "p_r": 1}
int run_calibrate(const CalibrateArgs& args) {
  std::ifstream in(args.config);
  if (!in) throw std::runtime_error("cannot open config " + args.config);
  const nlohmann::json doc = nlohmann::json::parse(in);

  race::CalibrationRequest req;
  const auto n = doc.at("n_antennas").get<std::size_t>();
  for (const auto& ks : doc.at("candidates")) req.candidates.emplace_back(ks.get<std::vector<std::size_t>>(), n);
  std::stable_sort(req.candidates.begin(), req.candidates.end(), [](const auto& a, const auto& b) {
    return a.total_measurements() < b.total_measurements();
  });
  req.snr_grid_db = doc.at("snr_grid_db").get<std::vector<double>>();
  req.gamma = doc.value("gamma", 1e-2);
  req.trials = doc.value("trials", std::size_t{2000});
  req.seed = doc.value("seed", std::uint64_t{0});
  req.path_variance = doc.value("p_r", 1.0);
  req.workers = args.workers;

  std::vector<race::CalibrationPoint> points;
  const race::SwitchTable table = race::calibrate_switch_table(req, &points);
  table.save(args.out);
  for (const race::CalibrationPoint& p : points) {
    std::cerr << "snr " << p.snr_db << " dB:";
    for (std::size_t c = 0; c < p.pee.size(); ++c)
      std::cerr << ' ' << req.candidates[c].to_string() << "=" << p.pee[c];
    std::cerr << " -> " << req.candidates[p.selected].to_string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-adaptive mmWave channel estimation simulator"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an SNR sweep and write the metrics table");
  sweep_cmd->add_option("--config", sweep.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep.out, "Output file")->required();
  sweep_cmd->add_option("--format", sweep.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)");

  TrialArgs trial;
  auto* trial_cmd = app.add_subcommand("trial", "Run one trial and dump its slots and posteriors as JSON lines");
  trial_cmd->add_option("--scheme", trial.scheme, "fixed, race, or a scheme name from --config");
  trial_cmd->add_option("--config", trial.config, "Experiment config to take the scheme from")->check(CLI::ExistingFile);
  trial_cmd->add_option("--snr-db", trial.snr_db, "P/N0 in dB")->required();
  trial_cmd->add_option("--seed", trial.seed, "Trial seed")->required();
  trial_cmd->add_option("--n", trial.n, "Antennas per side");
  trial_cmd->add_option("--k-vector", trial.k_vector, "Branching factors, e.g. 2,2,2")->delimiter(',');
  trial_cmd->add_option("--gamma", trial.gamma, "Target error probability (race)");
  trial_cmd->add_option("--m-max", trial.m_max, "Measurement budget (race)");
  trial_cmd->add_option("--p-r", trial.p_r, "Path variance");
  trial_cmd->add_flag("--noiseless", trial.noiseless, "Disable receiver noise");
  trial_cmd->add_option("--out", trial.out, "Output file (default stdout)");

  CodebookArgs codebook;
  auto* codebook_cmd = app.add_subcommand("codebook", "Export beam magnitude responses as CSV");
  codebook_cmd->add_option("--n", codebook.n, "Antennas per side");
  codebook_cmd->add_option("--k-vector", codebook.k_vector, "Branching factors, e.g. 2,2,2")->delimiter(',');
  codebook_cmd->add_option("--out", codebook.out, "Output CSV")->required();

  CalibrateArgs calibrate;
  auto* calibrate_cmd = app.add_subcommand("calibrate-switch", "Calibrate a rate-switching table");
  calibrate_cmd->add_option("--config", calibrate.config, "Calibration config (JSON)")->required()->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--out", calibrate.out, "Output table (JSON)")->required();
  calibrate_cmd->add_option("--workers", calibrate.workers, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep_cmd) return run_sweep(sweep);
    if (*trial_cmd) return run_trial(trial);
    if (*codebook_cmd) return run_codebook(codebook);
    if (*calibrate_cmd) return run_calibrate(calibrate);
  } catch (const std::exception& e) {
    std::cerr << "race: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
