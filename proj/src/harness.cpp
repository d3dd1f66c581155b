#include "speclines/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "speclines/estimation.hpp"
#include "speclines/excitation.hpp"
#include "speclines/parallel.hpp"

namespace speclines {

const char* const kMultiSine = "multisine";
const char* const kWhiteNoise = "white_noise";
const char* const kGaussian = "gaussian";

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool nan_last(double a, double b) {
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return a < b;
}
}  // namespace

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyInput("percentile: no values");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("percentile: p must be in (0, 1]");
  std::sort(values.begin(), values.end(), nan_last);
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) - 1e-9));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

RunSummary summarize(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("summarize: no values");
  std::sort(values.begin(), values.end(), nan_last);
  RunSummary s;
  s.count = values.size();
  s.median = percentile(values, 0.5);
  s.p90 = percentile(values, 0.9);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

std::string sidecar_path(const std::string& path, const std::string& suffix) {
  if (suffix.empty()) return path;
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + suffix + ".csv")).string();
}

void write_tables(const std::string& path, const std::vector<NamedTable>& tables) {
  for (const auto& named : tables) {
    const std::string target = sidecar_path(path, named.suffix);
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("output: cannot open '" + target + "' for writing");
    named.table.write(out);
    if (!out) throw ConfigError("output: write to '" + target + "' failed");
  }
}

namespace {

std::vector<std::string> summary_header(const std::vector<std::string>& leading) {
  std::vector<std::string> header = leading;
  for (const char* col : {"count", "median", "p90", "mean", "std"}) header.emplace_back(col);
  return header;
}

void append_summary(std::vector<std::string>& row, const RunSummary& s) {
  row.push_back(csv::format(static_cast<std::int64_t>(s.count)));
  for (double v : {s.median, s.p90, s.mean, s.std}) row.push_back(csv::format(v));
}

// Failed replications count as +inf so that they raise, not lower, percentiles.
double failure_as_inf(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

LinearSystem plant_system(const ScenarioConfig& config, double sigma) {
  return companion_system(config.plant.coeffs, sigma);
}

MultiSine unit_multisine(const std::vector<double>& freqs) {
  return MultiSine{freqs, std::vector<double>(freqs.size(), 1.0)};
}

}  // namespace

std::vector<EstimationRecord> estimation_sweep(const ScenarioConfig& config, int workers) {
  if (config.kind != ScenarioKind::EstimationSweep) {
    throw ConfigError("estimate: config kind must be estimation_sweep");
  }
  const auto& spec = config.estimation;
  const LinearSystem truth = plant_system(config, config.plant.sigma);
  const Index n = truth.state_dim(), T = spec.horizon;
  const RngSpec master{config.seed, 0};
  const char* kinds[] = {kWhiteNoise, kMultiSine};
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::vector<EstimationRecord> records(spec.energies.size() * 2 * reps);

  parallel_for(records.size(), workers, [&](std::size_t idx) {
    const std::size_t r = idx % reps;
    const std::size_t kind = (idx / reps) % 2;
    const std::size_t e = idx / (2 * reps);
    const double E0 = spec.energies[e];
    const RngSpec rep = master.derive(r);
    EstimationRecord rec;
    rec.energy = E0;
    rec.input_kind = kinds[kind];
    rec.seed = static_cast<Index>(r);

    RealMatrix u;
    if (kind == 0) {
      u = WhiteNoiseInput{E0, rep.derive(1)}.signal(T);
      rec.sigma_min = kNaN;
    } else {
      const double level = spec.energy_convention == EnergyConvention::MatchedRms ? E0 : std::sqrt(E0);
      const MultiSine ms = normalize_energy(unit_multisine(spec.frequencies), level, T);
      u = ms.signal(T);
      try {
        rec.sigma_min = information_matrix(truth, ms).sigma_min;
      } catch (const NumericalError&) {
        rec.sigma_min = kNaN;
      }
    }
    rec.energy_sum = u.squaredNorm();
    rec.tau = kNaN;
    try {
      const Trajectory traj =
          simulate(truth, config.unmodeled.build(n), open_loop(u), T, rep.derive(0));
      rec.tau = cross_term_tau(traj);
      const EstimationResult est = least_squares(traj);
      rec.err_A = operator_norm(est.A_hat - truth.A);
      rec.err_B = operator_norm(est.B_hat - truth.B);
      rec.err_max = std::max(rec.err_A, rec.err_B);
    } catch (const NumericalError&) {
      rec.err_A = rec.err_B = rec.err_max = kNaN;
    }
    records[idx] = std::move(rec);
  });
  return records;
}

std::vector<NamedTable> estimation_tables(const std::vector<EstimationRecord>& records) {
  csv::Table main({"energy_or_T", "input_kind", "seed", "err_A", "err_B", "err_max", "sigma_min",
                   "tau"});
  for (const auto& r : records) {
    main.add(r.energy, r.input_kind, static_cast<std::int64_t>(r.seed), r.err_A, r.err_B, r.err_max,
             r.sigma_min, r.tau);
  }
  csv::Table summary(summary_header({"energy_or_T", "input_kind", "metric"}));
  // Records are grouped by (energy, kind) in contiguous blocks.
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    std::vector<double> err, tau;
    while (j < records.size() && records[j].energy == records[i].energy &&
           records[j].input_kind == records[i].input_kind) {
      err.push_back(failure_as_inf(records[j].err_max));
      tau.push_back(failure_as_inf(records[j].tau));
      ++j;
    }
    for (const auto& [name, values] : {std::pair{"err_max", err}, std::pair{"tau", tau}}) {
      std::vector<std::string> row{csv::format(records[i].energy), records[i].input_kind, name};
      append_summary(row, summarize(values));
      summary.add_row(std::move(row));
    }
    i = j;
  }
  return {{"", std::move(main)}, {"summary", std::move(summary)}};
}

std::vector<LowerBoundRecord> lower_bound_probe(const ScenarioConfig& config, int workers) {
  if (config.kind != ScenarioKind::LowerBoundProbe) {
    throw ConfigError("lower-bound: config kind must be lower_bound_probe");
  }
  const auto& spec = config.lower_bound;
  const LinearSystem truth = plant_system(config, config.plant.sigma);
  const Index n = truth.state_dim();
  const RngSpec master{config.seed, 0};
  const char* kinds[] = {kWhiteNoise, kMultiSine};
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::vector<LowerBoundRecord> records(spec.horizons.size() * 2 * reps);

  parallel_for(records.size(), workers, [&](std::size_t idx) {
    const std::size_t r = idx % reps;
    const std::size_t kind = (idx / reps) % 2;
    const Index T = spec.horizons[idx / (2 * reps)];
    const RngSpec rep = master.derive(r);
    const RealMatrix u =
        kind == 0 ? WhiteNoiseInput{spec.energy, rep.derive(1)}.signal(T)
                  : normalize_energy(unit_multisine(spec.frequencies), spec.energy, T).signal(T);
    const Trajectory traj =
        simulate(truth, config.unmodeled.build(n), open_loop(u), T, rep.derive(0));
    records[idx] = {T, kinds[kind], static_cast<Index>(r), cross_term_tau(traj)};
  });
  return records;
}

std::vector<NamedTable> lower_bound_tables(const std::vector<LowerBoundRecord>& records) {
  csv::Table main({"T", "input_kind", "seed", "tau"});
  for (const auto& r : records) {
    main.add(static_cast<std::int64_t>(r.T), r.input_kind, static_cast<std::int64_t>(r.seed), r.tau);
  }
  csv::Table summary(summary_header({"T", "input_kind"}));
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    std::vector<double> tau;
    while (j < records.size() && records[j].T == records[i].T &&
           records[j].input_kind == records[i].input_kind) {
      tau.push_back(records[j++].tau);
    }
    std::vector<std::string> row{csv::format(static_cast<std::int64_t>(records[i].T)),
                                 records[i].input_kind};
    append_summary(row, summarize(tau));
    summary.add_row(std::move(row));
    i = j;
  }
  return {{"", std::move(main)}, {"summary", std::move(summary)}};
}

namespace {

EpochConfig epoch_config(const RegretSpec& spec, ExplorationKind kind) {
  EpochConfig cfg;
  cfg.T0 = spec.T0;
  cfg.amplitude_scale = spec.amplitude_scale;
  cfg.amplitude_exponent = spec.amplitude_exponent;
  cfg.frequencies = spec.frequencies;
  cfg.amplitude_fraction = spec.amplitude_fraction;
  cfg.randomize_amplitudes = spec.randomize_amplitudes;
  cfg.snap_to_grid = spec.snap_to_grid;
  cfg.optimize_frequencies = spec.optimize_frequencies;
  cfg.exploration = kind;
  cfg.horizon = spec.steps;
  return cfg;
}

Index epochs_to_cover(Index T0, Index steps) {
  Index epochs = 0, covered = 0;
  while (covered < steps) covered += T0 << epochs++;
  return epochs;
}

}  // namespace

double pilot_rms(const LinearSystem& truth, const RealMatrix& K, const RegretSpec& spec) {
  const Index n = truth.state_dim();
  const std::size_t J = static_cast<std::size_t>(n + 2) / 2;
  const double amp = spec.amplitude_fraction * spec.amplitude_scale *
                     std::pow(static_cast<double>(spec.T0), spec.amplitude_exponent);
  const MultiSine probe{std::vector<double>(spec.frequencies.begin(),
                                            spec.frequencies.begin() + static_cast<long>(J)),
                        std::vector<double>(J, amp)};
  const LinearSystem noiseless{truth.A, truth.B, 0.0};
  const Trajectory traj =
      simulate(noiseless, UnmodeledMap::none(),
               state_feedback(K, [&](Index k) { return probe.sample(k); }), spec.pilot_steps,
               RngSpec{});
  const double total = traj.states.rightCols(spec.pilot_steps).squaredNorm();
  return std::sqrt(total / static_cast<double>(spec.pilot_steps * n));
}

std::vector<RegretRun> regret_experiment(const ScenarioConfig& config, int workers) {
  if (config.kind != ScenarioKind::Regret) throw ConfigError("regret: config kind must be regret");
  const auto& spec = config.regret;
  const LinearSystem truth = plant_system(config, 0.0);
  const Index n = truth.state_dim(), m = truth.input_dim();
  const CostMatrices costs = CostMatrices::scaled_identity(n, m, spec.q, spec.r);
  const LqrSolution optimal = solve_dare(truth.A, truth.B, costs);
  const RngSpec master{config.seed, 0};

  std::vector<double> conditions = config.plant.noise_ratios;
  const bool explicit_sigma = conditions.empty();
  if (explicit_sigma) conditions.push_back(kNaN);
  const std::pair<const char*, ExplorationKind> kinds[] = {
      {kMultiSine, ExplorationKind::MultiSine}, {kGaussian, ExplorationKind::Gaussian}};
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const Index num_epochs = epochs_to_cover(spec.T0, spec.steps);
  std::vector<RegretRun> runs(conditions.size() * 2 * reps);

  parallel_for(runs.size(), workers, [&](std::size_t idx) {
    const std::size_t r = idx % reps;
    const std::size_t kind = (idx / reps) % 2;
    const double ratio = conditions[idx / (2 * reps)];
    const RngSpec rep = master.derive(r);
    RegretRun run;
    run.noise_ratio = ratio;
    run.input_kind = kinds[kind].first;
    run.seed = static_cast<Index>(r);
    try {
      const InitialController init =
          perturbed_initial_controller(truth, costs, spec.perturb_scale, rep.derive(2));
      run.sigma = explicit_sigma ? config.plant.sigma : ratio * pilot_rms(truth, init.K, spec);
      const LinearSystem plant{truth.A, truth.B, run.sigma};
      const UnmodeledMap map = config.unmodeled.build(n);
      run.J_star = spec.baseline == BaselineKind::Analytic
                       ? optimal_average_cost(optimal.P, run.sigma)
                       : empirical_baseline(plant, map, costs, optimal.K, rep, spec.steps);
      const EpochDoublingResult result =
          run_epoch_doubling(epoch_config(spec, kinds[kind].second), plant, map, costs, init,
                         run.J_star, rep, num_epochs);
      run.costs = result.regret.costs;
      run.regret = result.regret.regret;
      run.epochs = result.epochs;
      run.epoch_of_step.assign(run.costs.size(), 0);
      for (const auto& ep : run.epochs) {
        for (Index k = ep.start; k < ep.start + ep.steps; ++k) {
          run.epoch_of_step[static_cast<std::size_t>(k)] = ep.epoch_index;
        }
      }
    } catch (const StateBlowup& e) {
      run.failed = true;
      run.failure = e.what();
    } catch (const NoStabilizingController& e) {
      run.failed = true;
      run.failure = e.what();
    }
    if (run.failed) {
      run.costs.assign(static_cast<std::size_t>(spec.steps), kNaN);
      run.regret.assign(static_cast<std::size_t>(spec.steps), kNaN);
      run.epoch_of_step.assign(static_cast<std::size_t>(spec.steps), -1);
      run.epochs.clear();
    }
    runs[idx] = std::move(run);
  });
  return runs;
}

std::vector<NamedTable> regret_tables(const std::vector<RegretRun>& runs) {
  csv::Table main({"noise_ratio", "input_kind", "seed", "k", "cost", "regret", "epoch_index"});
  std::size_t J = 0;
  for (const auto& run : runs) {
    for (const auto& ep : run.epochs) J = std::max(J, ep.frequencies.size());
  }
  std::vector<std::string> epoch_header{"noise_ratio", "input_kind", "seed", "epoch", "T_i",
                                        "amp_cap"};
  for (std::size_t j = 1; j <= J; ++j) epoch_header.push_back("f_" + std::to_string(j));
  for (const char* col : {"err_A", "err_B", "riccati_residual", "closed_loop_radius"}) {
    epoch_header.emplace_back(col);
  }
  csv::Table epochs(epoch_header);

  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.costs.size(); ++k) {
      main.add(run.noise_ratio, run.input_kind, static_cast<std::int64_t>(run.seed),
               static_cast<std::int64_t>(k + 1), run.costs[k], run.regret[k],
               static_cast<std::int64_t>(run.epoch_of_step[k]));
    }
    for (const auto& ep : run.epochs) {
      std::vector<std::string> row{csv::format(run.noise_ratio), run.input_kind,
                                   csv::format(static_cast<std::int64_t>(run.seed)),
                                   csv::format(static_cast<std::int64_t>(ep.epoch_index)),
                                   csv::format(static_cast<std::int64_t>(ep.epoch_length)),
                                   csv::format(ep.amplitude_cap)};
      for (std::size_t j = 0; j < J; ++j) {
        row.push_back(j < ep.frequencies.size() ? csv::format(ep.frequencies[j]) : "");
      }
      for (double v : {ep.err_A, ep.err_B, ep.riccati_residual, ep.closed_loop_radius}) {
        row.push_back(csv::format(v));
      }
      epochs.add_row(std::move(row));
    }
  }

  csv::Table summary(summary_header({"noise_ratio", "input_kind", "k"}));
  for (std::size_t i = 0; i < runs.size();) {
    std::size_t j = i;
    while (j < runs.size() && runs[j].input_kind == runs[i].input_kind &&
           (runs[j].noise_ratio == runs[i].noise_ratio ||
            (std::isnan(runs[j].noise_ratio) && std::isnan(runs[i].noise_ratio)))) {
      ++j;
    }
    const std::size_t steps = runs[i].regret.size();
    for (std::size_t k = 0; k < steps; ++k) {
      std::vector<double> values;
      for (std::size_t q = i; q < j; ++q) values.push_back(failure_as_inf(runs[q].regret[k]));
      std::vector<std::string> row{csv::format(runs[i].noise_ratio), runs[i].input_kind,
                                   csv::format(static_cast<std::int64_t>(k + 1))};
      append_summary(row, summarize(values));
      summary.add_row(std::move(row));
    }
    i = j;
  }
  return {{"", std::move(main)}, {"epochs", std::move(epochs)}, {"summary", std::move(summary)}};
}

ActuatorResult actuator_demo(const ScenarioConfig& config, int workers) {
  if (config.kind != ScenarioKind::ActuatorDemo) {
    throw ConfigError("actuator: config kind must be actuator_demo");
  }
  const auto& spec = config.actuator;
  const Index T = spec.horizon, S = spec.window - 1;
  const RngSpec master{config.seed, 0};
  const MultiSine ms = normalize_energy(unit_multisine(spec.frequencies), spec.energy, T);

  auto filtered = [&](const RealMatrix& u) {
    ActuatorFilter filter(spec.smoothing);
    const auto out = filter.apply(std::span<const double>(u.data(), static_cast<std::size_t>(T)));
    RealMatrix pair(2, T);
    pair.row(0) = u.row(0);
    pair.row(1) = Eigen::Map<const RealVector>(out.data(), T).transpose();
    return pair;
  };

  ActuatorResult result;
  const RealMatrix ms_pair = filtered(ms.signal(T));
  const RealMatrix wn_pair = filtered(WhiteNoiseInput{spec.white_std, master.derive(0)}.signal(T));
  result.signals.resize(4, T);
  result.signals << ms_pair, wn_pair;

  auto lag1 = [](const RealMatrix& row) {
    return lag_autocorrelation(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), 1);
  };
  const RealMatrix ms_pre = ms_pair.row(0), ms_post = ms_pair.row(1);
  const RealMatrix wn_pre = wn_pair.row(0), wn_post = wn_pair.row(1);
  result.ms_lag1_pre = lag1(ms_pre);
  result.ms_lag1_post = lag1(ms_post);
  result.wn_lag1_pre = lag1(wn_pre);
  result.wn_lag1_post = lag1(wn_post);

  const Index reps = config.replications;
  const SignalSource ms_source = [&](const RngSpec&) {
    return RealMatrix(ms_pair.middleCols(spec.burn_in, spec.window));
  };
  const SignalSource wn_source = [&](const RngSpec& rng) {
    return RealMatrix(filtered(WhiteNoiseInput{spec.white_std, rng}.signal(T))
                          .middleCols(spec.burn_in, spec.window));
  };
  for (double f : spec.frequencies) {
    for (const auto& [kind, pair, source] :
         {std::tuple{kMultiSine, &ms_pair, &ms_source}, std::tuple{kWhiteNoise, &wn_pair, &wn_source}}) {
      SpectralLineEstimate line = estimate_spectral_line(*pair, f, spec.burn_in, S);
      line.empirical_deviation = empirical_radius(*source, f, S, reps, master.derive(1), workers);
      result.radii.push_back(line.empirical_deviation);
      result.lines.push_back(std::move(line));
      result.line_kinds.emplace_back(kind);
    }
  }
  return result;
}

std::vector<NamedTable> actuator_tables(const ActuatorResult& result) {
  csv::Table signals({"k", "ms_pre", "ms_post", "wn_pre", "wn_post"});
  for (Index k = 0; k < result.signals.cols(); ++k) {
    signals.add(static_cast<std::int64_t>(k), result.signals(0, k), result.signals(1, k),
                result.signals(2, k), result.signals(3, k));
  }
  csv::Table spectra({"input_kind", "freq", "re_amp_1", "re_amp_2", "im_amp_1", "im_amp_2",
                      "radius"});
  for (std::size_t i = 0; i < result.lines.size(); ++i) {
    const auto& a = result.lines[i].amplitude;
    spectra.add(result.line_kinds[i], result.lines[i].frequency, a(0).real(), a(1).real(),
                a(0).imag(), a(1).imag(), result.radii[i]);
  }
  csv::Table summary({"input_kind", "lag1_pre", "lag1_post"});
  summary.add(kMultiSine, result.ms_lag1_pre, result.ms_lag1_post);
  summary.add(kWhiteNoise, result.wn_lag1_pre, result.wn_lag1_post);
  return {{"", std::move(signals)}, {"spectra", std::move(spectra)}, {"summary", std::move(summary)}};
}

std::vector<NamedTable> run_scenario(const ScenarioConfig& config, int workers) {
  switch (config.kind) {
    case ScenarioKind::EstimationSweep:
      return estimation_tables(estimation_sweep(config, workers));
    case ScenarioKind::Regret:
      return regret_tables(regret_experiment(config, workers));
    case ScenarioKind::LowerBoundProbe:
      return lower_bound_tables(lower_bound_probe(config, workers));
    case ScenarioKind::ActuatorDemo:
      return actuator_tables(actuator_demo(config, workers));
  }
  throw ConfigError("unknown scenario kind");
}

}  // namespace speclines
