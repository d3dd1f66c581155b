#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speclines/config.hpp"
#include "speclines/control.hpp"
#include "speclines/csv.hpp"

namespace speclines {

struct RunSummary {
  std::size_t count = 0;
  double median = 0.0;
  double p90 = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

/// Nearest-rank percentiles (rank ceil(p N) of the sorted values). NaN sorts
/// above +inf. Throws EmptyInput.
RunSummary summarize(std::vector<double> values);

/// Nearest-rank percentile, p in (0, 1].
double percentile(std::vector<double> values, double p);

/// A labelled output table; the main table has an empty suffix.
struct NamedTable {
  std::string suffix;
  csv::Table table;
};

/// Writes the main table to `path` and every other table to
/// <dir>/<stem>_<suffix>.csv next to it.
void write_tables(const std::string& path, const std::vector<NamedTable>& tables);
std::string sidecar_path(const std::string& path, const std::string& suffix);

extern const char* const kMultiSine;
extern const char* const kWhiteNoise;
extern const char* const kGaussian;

struct EstimationRecord {
  double energy = 0.0;
  std::string input_kind;
  Index seed = 0;
  double err_A = 0.0;
  double err_B = 0.0;
  double err_max = 0.0;
  double sigma_min = 0.0;
  double tau = 0.0;
  double energy_sum = 0.0;  // realized sum of u^2
};

std::vector<EstimationRecord> estimation_sweep(const ScenarioConfig& config, int workers);
std::vector<NamedTable> estimation_tables(const std::vector<EstimationRecord>& records);

struct LowerBoundRecord {
  Index T = 0;
  std::string input_kind;
  Index seed = 0;
  double tau = 0.0;
};

std::vector<LowerBoundRecord> lower_bound_probe(const ScenarioConfig& config, int workers);
std::vector<NamedTable> lower_bound_tables(const std::vector<LowerBoundRecord>& records);

struct RegretRun {
  double noise_ratio = 0.0;  // NaN when the explicit sigma was used
  std::string input_kind;
  Index seed = 0;
  double sigma = 0.0;
  double J_star = 0.0;
  bool failed = false;
  std::string failure;
  std::vector<double> costs;
  std::vector<double> regret;
  std::vector<Index> epoch_of_step;
  std::vector<EpochState> epochs;
};

/// Pilot-based noise scale: ratio * sqrt(sum |x_k|^2 / (steps n)) for the
/// noiseless linear plant under K with the first-epoch multi-sine exploration.
double pilot_rms(const LinearSystem& truth, const RealMatrix& K, const RegretSpec& spec);

std::vector<RegretRun> regret_experiment(const ScenarioConfig& config, int workers);
std::vector<NamedTable> regret_tables(const std::vector<RegretRun>& runs);

struct ActuatorResult {
  RealMatrix signals;  // rows: ms_pre, ms_post, wn_pre, wn_post
  std::vector<std::string> line_kinds;
  std::vector<SpectralLineEstimate> lines;  // amplitude = [pre; post]
  std::vector<double> radii;
  double ms_lag1_pre = 0.0, ms_lag1_post = 0.0;
  double wn_lag1_pre = 0.0, wn_lag1_post = 0.0;
};

ActuatorResult actuator_demo(const ScenarioConfig& config, int workers);
std::vector<NamedTable> actuator_tables(const ActuatorResult& result);

/// Dispatches on config.kind.
std::vector<NamedTable> run_scenario(const ScenarioConfig& config, int workers);

}  // namespace speclines
