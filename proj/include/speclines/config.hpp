#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "speclines/dynamics.hpp"

namespace speclines {

enum class ScenarioKind { EstimationSweep, Regret, LowerBoundProbe, ActuatorDemo };
enum class MapKind { None, HighPassSquare, LinearHighPass };
/// How an input energy level E0 is matched between white noise and multi-sine:
/// MatchedRms gives sum u^2 = T E0^2 (both have RMS E0); Literal gives the
/// multi-sine sum u^2 = T E0 while white noise keeps std E0.
enum class EnergyConvention { MatchedRms, Literal };
enum class BaselineKind { Analytic, Empirical };

struct UnmodeledSpec {
  MapKind kind = MapKind::None;
  double alpha = 0.0;
  double beta = 0.0;
  double gain = 0.0;

  [[nodiscard]] UnmodeledMap build(Index n) const;
};

struct PlantSpec {
  std::vector<double> coeffs;
  double sigma = 0.0;
  /// Regret scenarios: sigma = ratio * pilot RMS, one condition per ratio.
  /// Empty means the explicit sigma is used.
  std::vector<double> noise_ratios;
};

struct EstimationSpec {
  std::vector<double> energies{1, 5, 10, 50, 100, 500};
  std::vector<double> frequencies{0.01, 0.05};
  Index horizon = 500;
  EnergyConvention energy_convention = EnergyConvention::MatchedRms;
};

struct LowerBoundSpec {
  std::vector<Index> horizons{500, 1000, 2000};
  std::vector<double> frequencies{0.01, 0.05};
  double energy = 1.0;
};

struct RegretSpec {
  double q = 10.0;  // Q = q I
  double r = 1.0;   // R = r I
  Index T0 = 50;
  Index steps = 200;
  double amplitude_scale = 1.0;
  double amplitude_exponent = -0.25;
  double amplitude_fraction = 1.0;
  bool randomize_amplitudes = false;
  std::vector<double> frequencies{0.03, 0.05};
  bool snap_to_grid = false;
  bool optimize_frequencies = false;
  double perturb_scale = 0.01;
  Index pilot_steps = 500;
  BaselineKind baseline = BaselineKind::Analytic;
};

struct ActuatorSpec {
  Index horizon = 10000;
  Index burn_in = 2000;
  Index window = 8000;  // S + 1
  double smoothing = 0.3;
  std::vector<double> frequencies{0.01, 0.05};
  double energy = 1.0;
  double white_std = 1.0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::EstimationSweep;
  Index replications = 1;
  std::uint64_t seed = 0;
  PlantSpec plant;
  UnmodeledSpec unmodeled;
  EstimationSpec estimation;
  LowerBoundSpec lower_bound;
  RegretSpec regret;
  ActuatorSpec actuator;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// INI text: [scenario], [plant], [unmodeled] and one section for the scenario
/// kind. Unknown sections or keys are rejected. Missing keys keep defaults.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_string(const std::string& text);
ScenarioConfig load_config(const std::string& path);

const char* to_string(ScenarioKind kind);

}  // namespace speclines
