// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/dense.hpp"
#include "race/harness.hpp"
#include "race/parallel.hpp"
#include "race/results_io.hpp"
#include "race/schemes.hpp"

using namespace race;
using cd = std::complex<double>;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double log_uniform(RandomStream& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-300) return 0.0;
  return std::abs(a - b) / scale;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// All ordered factorizations of n into factors >= 2.
void factorizations(std::size_t n, std::vector<std::size_t>& prefix, std::vector<StagePlan>& out,
                    std::size_t total) {
  if (n == 1) {
    if (!prefix.empty()) out.emplace_back(prefix, total);
    return;
  }
  for (std::size_t k = 2; k <= n; ++k) {
    if (n % k != 0) continue;
    prefix.push_back(k);
    factorizations(n / k, prefix, out, total);
    prefix.pop_back();
  }
}

Verdict oracle_equivalence() {
  RandomStream rng = make_stream(20240601);
  double worst_ll = 0.0, worst_post = 0.0;
  for (int instance = 0; instance < 10000; ++instance) {
    const std::size_t k = instance % 3 == 2 ? 4 : (instance % 3 == 1 ? 3 : 2);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(k * k, 16)(rng);
    const double g = log_uniform(rng, 1e-2, 1e3);
    const double n0 = log_uniform(rng, 1e-2, 1e1);
    const std::size_t truth = std::uniform_int_distribution<std::size_t>(0, k * k - 1)(rng);
    const cd alpha = sample_complex_normal(rng, 1.0) * std::sqrt(g);

    SoundingLog log(1, k, g);
    std::uniform_int_distribution<std::size_t> pick(0, k * k - 1);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t h = j < k * k ? j : pick(rng);
      const cd signal = h == truth ? alpha : cd{};
      log.push(pair_at(h, k), signal + sample_complex_normal(rng, n0));
    }

    std::vector<cd> y;
    std::vector<std::size_t> slot_pair;
    for (const auto& s : log.slots()) {
      y.push_back(s.observation);
      slot_pair.push_back(canonical_index(s.pair, k));
    }
    oracle::CVec yv(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) yv[static_cast<Eigen::Index>(j)] = y[j];

    for (std::size_t h = 0; h < k * k; ++h) {
      const auto v = indicator_vector(log, pair_at(h, k));
      std::vector<int> on(v.begin(), v.end());
      const double fast = log_likelihood(y, v, g, n0);
      const double dense = oracle::dense_log_pdf(yv, oracle::covariance_from_model(on, 1.0, 1.0, std::sqrt(g), n0));
      worst_ll = std::max(worst_ll, relative_error(fast, dense));
    }
    const auto fast = posterior(log, NoiseModel(1.0, n0, 1.0)).probabilities();
    const auto dense = oracle::dense_posterior(y, slot_pair, k * k, g, n0);
    for (std::size_t h = 0; h < k * k; ++h) worst_post = std::max(worst_post, relative_error(fast[h], dense[h]));
  }
  return {worst_ll <= 1e-8 && worst_post <= 1e-8,
          fmt("10000 instances, worst relative error: log-likelihood %.3g, posterior %.3g", worst_ll, worst_post)};
}

Verdict beam_invariants() {
  std::size_t plans = 0, beams = 0;
  double worst_norm = 0.0, worst_in = 0.0, worst_out = 0.0;
  for (std::size_t n : {8u, 16u, 64u}) {
    std::vector<StagePlan> all;
    std::vector<std::size_t> prefix;
    factorizations(n, prefix, all, n);
    const AngleGrid grid(n);
    const CMatrix& u = grid.steering_matrix();
    for (const StagePlan& plan : all) {
      ++plans;
      const Codebook codebook(plan, grid);
      for (std::size_t s = 1; s <= plan.stage_count(); ++s) {
        for (std::size_t b = 0; b < codebook.beams_in_stage(s); ++b) {
          const BeamVector& beam = codebook.beam(s, b);
          ++beams;
          worst_norm = std::max(worst_norm, std::abs(beam.coefficients.norm() - 1.0));
          const Eigen::VectorXd response = (u.adjoint() * beam.coefficients).cwiseAbs();
          for (std::size_t i = 0; i < n; ++i) {
            const double r = response[static_cast<Eigen::Index>(i)];
            if (beam.subrange.contains(i))
              worst_in = std::max(worst_in, std::abs(r - beam.gain_constant));
            else
              worst_out = std::max(worst_out, r);
          }
        }
      }
    }
  }
  std::ostringstream detail;
  detail << plans << " plans, " << beams << " beams; "
         << fmt("norm error %.3g, in-range error %.3g, out-of-range leak %.3g", worst_norm, worst_in, worst_out);
  return {worst_norm < 1e-9 && worst_in < 1e-9 && worst_out < 1e-9, detail.str()};
}

Verdict noiseless_correctness() {
  const std::size_t n = 8;
  const AngleGrid grid(n);
  const NoiseModel noise = NoiseModel::from_snr_db(0.0).noiseless();
  std::vector<StagePlan> plans;
  std::vector<std::size_t> prefix;
  factorizations(n, prefix, plans, n);
  std::size_t runs = 0, wins = 0;
  RandomStream rng = make_stream(3);
  for (const StagePlan& plan : plans) {
    const Codebook codebook(plan, grid);
    const RaceConfig cfg(1e-2, plan.total_measurements() * 4, plan);
    for (std::size_t tx = 0; tx < n; ++tx) {
      for (std::size_t rx = 0; rx < n; ++rx) {
        const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        const ChannelRealization channel{std::polar(1.0, phase), tx, rx};
        RandomStream a = make_stream(tx * n + rx), b = make_stream(tx * n + rx);
        const auto fixed = run_fixed(codebook, channel, noise, a);
        const auto race = run_race(cfg, codebook, channel, noise, b);
        runs += 2;
        wins += (fixed.success && fixed.tx_estimate == tx && fixed.rx_estimate == rx) +
                (race.success && race.tx_estimate == tx && race.rx_estimate == rx);
      }
    }
  }
  std::ostringstream detail;
  detail << plans.size() << " plans x 64 pairs x 2 schemes: " << wins << "/" << runs << " correct";
  return {wins == runs, detail.str()};
}

bool same_trace(const EstimationOutcome& a, const EstimationOutcome& b) {
  if (a.tx_estimate != b.tx_estimate || a.rx_estimate != b.rx_estimate || a.alpha_estimate != b.alpha_estimate ||
      a.total_measurements != b.total_measurements || a.per_stage_measurements != b.per_stage_measurements ||
      a.success != b.success || a.stages.size() != b.stages.size())
    return false;
  for (std::size_t s = 0; s < a.stages.size(); ++s) {
    const StageRecord& x = a.stages[s];
    const StageRecord& y = b.stages[s];
    if (x.tx_block != y.tx_block || x.rx_block != y.rx_block || x.log.size() != y.log.size() ||
        !(x.decision.hypothesis == y.decision.hypothesis) || x.decision.probability != y.decision.probability)
      return false;
    for (std::size_t j = 0; j < x.log.size(); ++j)
      if (!(x.log[j].pair == y.log[j].pair) || x.log[j].observation != y.log[j].observation) return false;
  }
  return true;
}

Verdict degenerate_gamma() {
  const std::size_t n = 64;
  const StagePlan plan = StagePlan::uniform(2, n);
  const Codebook codebook(plan, AngleGrid(n));
  const RaceConfig cfg(1.0, 264, plan);
  std::size_t identical = 0;
  RandomStream setup = make_stream(99);
  for (std::size_t t = 0; t < 1000; ++t) {
    const NoiseModel noise = NoiseModel::from_snr_db(std::uniform_real_distribution<double>(-10.0, 30.0)(setup));
    RandomStream channel_rng = make_stream(derive_seed({7, t}));
    const ChannelRealization channel = sample_channel(codebook.grid(), noise, channel_rng);
    RandomStream a = make_stream(derive_seed({8, t})), b = make_stream(derive_seed({8, t}));
    const auto fixed = run_fixed(codebook, channel, noise, a);
    const auto race = run_race(cfg, codebook, channel, noise, b);
    identical += same_trace(fixed, race) && a == b;
  }
  std::ostringstream detail;
  detail << identical << "/1000 trials trace-identical";
  return {identical == 1000, detail.str()};
}

SchemeSpec fixed_spec(std::string name, StagePlan plan) {
  SchemeSpec s;
  s.name = std::move(name);
  s.kind = SchemeKind::fixed;
  s.plan = std::move(plan);
  return s;
}

SchemeSpec race_spec(std::size_t n) {
  SchemeSpec s;
  s.name = "race";
  s.kind = SchemeKind::race;
  s.plan = StagePlan::uniform(2, n);
  s.gamma = 1e-2;
  s.m_max = 264;
  return s;
}

Verdict high_snr_convergence() {
  const PreparedScheme scheme(race_spec(64), 64);
  PointRequest req;
  req.snr_db = 15.0;
  req.trials = 10000;
  req.master_seed = 515;
  req.workers = resolve_workers(0);
  const MetricsRow row = run_point(scheme, req);
  return {row.avg_measurements >= 24.0 && row.avg_measurements <= 26.0,
          fmt("15 dB, 10000 trials: average measurements %.4g (+/- %.2g), PEE %.3g", row.avg_measurements,
              row.measurements_ci95, row.pee)};
}

// Shared sweep for the ordering and adaptivity criteria.
const MetricsTable& sweep() {
  static const MetricsTable table = [] {
    ExperimentConfig cfg;
    cfg.n_antennas = 64;
    for (int i = 0; i <= 8; ++i) cfg.snr_grid_db.push_back(2.5 * i);
    cfg.trials_per_point = 10000;
    cfg.master_seed = 2024;
    cfg.schemes = {fixed_spec("fixed-24", StagePlan::uniform(2, 64)),
                   fixed_spec("fixed-264", StagePlan({16, 2, 2}, 64)), race_spec(64)};
    return run_sweep(cfg, resolve_workers(0));
  }();
  return table;
}

const MetricsRow& row(const std::string& scheme, double snr) {
  for (const MetricsRow& r : sweep())
    if (r.scheme == scheme && r.snr_db == snr) return r;
  throw std::logic_error("missing sweep row");
}

Verdict sweep_ordering() {
  const MetricsTable& table = sweep();
  std::size_t compared = 0, ordered = 0, steps = 0, monotone = 0;
  std::ostringstream detail;
  for (const MetricsRow& f : table) {
    if (f.scheme != "fixed-24" || f.pee <= 5e-2) continue;
    const MetricsRow& r = row("race", f.snr_db);
    const double width = std::hypot(f.pee_ci95, r.pee_ci95);
    ++compared;
    if (f.pee - r.pee >= 3.0 * width) ++ordered;
    else detail << " [" << f.snr_db << " dB: fixed " << f.pee << " race " << r.pee << "]";
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    const MetricsRow& prev = table[i - 1];
    const MetricsRow& cur = table[i];
    if (prev.scheme != cur.scheme) continue;
    ++steps;
    if (cur.pee <= prev.pee + std::hypot(prev.pee_ci95, cur.pee_ci95)) ++monotone;
    else detail << " [" << cur.scheme << " rises at " << cur.snr_db << " dB]";
  }
  std::ostringstream head;
  head << "RACE beats fixed-24 by >= 3 CI widths at " << ordered << "/" << compared
       << " points with fixed PEE > 0.05; PEE non-increasing at " << monotone << "/" << steps << " steps";
  return {compared > 0 && ordered == compared && monotone == steps, head.str() + detail.str()};
}

Verdict adaptivity_direction() {
  const MetricsRow& low = row("race", 0.0);
  const MetricsRow& high = row("race", 15.0);
  const double width = std::hypot(low.measurements_ci95, high.measurements_ci95);
  const double gap = low.avg_measurements - high.avg_measurements;
  return {gap >= 5.0 * width,
          fmt("average measurements %.4g at 0 dB vs %.4g at 15 dB; gap = %.3g CI widths", low.avg_measurements,
              high.avg_measurements, width > 0 ? gap / width : INFINITY)};
}

Verdict alpha_consistency() {
  const std::size_t n = 64, trials = 100000;
  const StagePlan plan = StagePlan::uniform(2, n);
  const Codebook codebook(plan, AngleGrid(n));
  const std::size_t last = plan.stage_count();
  const double c_final = codebook.gain_constant(last);
  const NoiseModel noise(2.0, 0.3, 1.0);
  RandomStream rng = make_stream(88);
  double sum_sq = 0.0;
  cd sum{};
  for (std::size_t t = 0; t < trials; ++t) {
    const ChannelRealization channel = sample_channel(codebook.grid(), noise, rng);
    const cd y = measure(channel, codebook.grid(), codebook.beam(last, channel.tx_index),
                         codebook.beam(last, channel.rx_index), noise, rng);
    const cd err = estimate_alpha(y, noise.transmit_power(), n, c_final) - channel.alpha;
    sum += err;
    sum_sq += std::norm(err);
  }
  const double mean_sq = std::norm(sum / static_cast<double>(trials));
  const double variance = (sum_sq / static_cast<double>(trials) - mean_sq) * trials / (trials - 1.0);
  const double expected = noise.noise_spectral() / (noise.transmit_power() * static_cast<double>(n * n));
  const double rel = std::abs(variance / expected - 1.0);
  return {rel <= 0.05, fmt("variance %.5g vs expected %.5g (relative deviation %.3g)", variance, expected, rel)};
}

Verdict reproducibility() {
  ExperimentConfig cfg;
  cfg.n_antennas = 16;
  cfg.snr_grid_db = {0.0, 5.0, 10.0};
  cfg.trials_per_point = 500;
  cfg.master_seed = 123456789;
  SchemeSpec race;
  race.name = "race";
  race.kind = SchemeKind::race;
  race.plan = StagePlan::uniform(2, 16);
  race.m_max = 64;
  SchemeSpec sw;
  sw.name = "switch";
  sw.kind = SchemeKind::rate_switch;
  sw.table = SwitchTable({{-INFINITY, StagePlan({4, 4})}, {5.0, StagePlan::uniform(2, 16)}});
  cfg.schemes = {fixed_spec("fixed", StagePlan::uniform(2, 16)), race, sw};

  std::vector<std::string> outputs;
  for (std::size_t workers : {1u, 2u, 4u, 7u}) {
    std::ostringstream out;
    write_results_csv(run_sweep(cfg, workers), out);
    outputs.push_back(out.str());
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
  std::ostringstream detail;
  detail << "workers 1/2/4/7 produce " << (same ? "byte-identical" : "different") << " CSV (" << outputs[0].size()
         << " bytes)";
  return {same, detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 oracle equivalence", oracle_equivalence},
      {"2 beam design invariants", beam_invariants},
      {"3 noiseless correctness", noiseless_correctness},
      {"4 degenerate-gamma equivalence", degenerate_gamma},
      {"5 high-SNR convergence", high_snr_convergence},
      {"6 PEE ordering", sweep_ordering},
      {"7 adaptivity direction", adaptivity_direction},
      {"8 alpha consistency", alpha_consistency},
      {"9 reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), secs, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
