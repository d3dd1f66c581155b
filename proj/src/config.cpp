#include "speclines/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace speclines {

UnmodeledMap UnmodeledSpec::build(Index n) const {
  switch (kind) {
    case MapKind::None:
      return UnmodeledMap::none();
    case MapKind::HighPassSquare:
      return HighPassNonlinearity(alpha, beta, gain, n);
    case MapKind::LinearHighPass:
      return LinearFilterMap::high_pass(alpha, beta, gain, n);
  }
  return UnmodeledMap::none();
}

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::EstimationSweep:
      return "estimation_sweep";
    case ScenarioKind::Regret:
      return "regret";
    case ScenarioKind::LowerBoundProbe:
      return "lower_bound_probe";
    case ScenarioKind::ActuatorDemo:
      return "actuator_demo";
  }
  return "unknown";
}

namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(const ptree& tree, std::string section) : section_(std::move(section)) {
    if (auto child = tree.get_child_optional(section_)) node_ = &*child;
  }

  [[nodiscard]] bool has(const std::string& key) const {
    return node_ && node_->get_child_optional(key).has_value();
  }

  void real(const std::string& key, double& out) const {
    if (has(key)) out = parse_real(raw(key), key);
  }

  void count(const std::string& key, Index& out) const {
    if (has(key)) out = parse_count(raw(key), key);
  }

  void seed(const std::string& key, std::uint64_t& out) const {
    if (!has(key)) return;
    const std::string text = raw(key);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) fail(key, "expected an unsigned integer");
    out = v;
  }

  void flag(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const std::string text = raw(key);
    if (text == "true" || text == "1" || text == "yes") {
      out = true;
    } else if (text == "false" || text == "0" || text == "no") {
      out = false;
    } else {
      fail(key, "expected true or false");
    }
  }

  void reals(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    out.clear();
    for (const auto& item : split(raw(key))) out.push_back(parse_real(item, key));
    if (out.empty()) fail(key, "list must not be empty");
  }

  void counts(const std::string& key, std::vector<Index>& out) const {
    if (!has(key)) return;
    out.clear();
    for (const auto& item : split(raw(key))) out.push_back(parse_count(item, key));
    if (out.empty()) fail(key, "list must not be empty");
  }

  template <typename Enum>
  void choice(const std::string& key, Enum& out, const std::map<std::string, Enum>& options) const {
    if (!has(key)) return;
    const std::string text = raw(key);
    const auto it = options.find(text);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + name;
      fail(key, "expected one of: " + allowed);
    }
    out = it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError("[" + section_ + "] " + key + ": " + why);
  }

 private:
  [[nodiscard]] std::string raw(const std::string& key) const {
    return trim(node_->get<std::string>(key));
  }

  static std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    return items;
  }

  double parse_real(const std::string& text, const std::string& key) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
      fail(key, "expected a finite number, got '" + text + "'");
    }
    return v;
  }

  Index parse_count(const std::string& text, const std::string& key) const {
    long long v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || v < 0) {
      fail(key, "expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<Index>(v);
  }

  std::string section_;
  const ptree* node_ = nullptr;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"kind", "replications", "seed"}},
      {"plant", {"coeffs", "sigma", "noise_ratios"}},
      {"unmodeled", {"kind", "alpha", "beta", "gain"}},
      {"estimation", {"energies", "frequencies", "horizon", "energy_convention"}},
      {"lower_bound", {"horizons", "frequencies", "energy"}},
      {"regret",
       {"q", "r", "T0", "steps", "amplitude_scale", "amplitude_exponent", "amplitude_fraction",
        "randomize_amplitudes", "frequencies", "snap_to_grid", "optimize_frequencies",
        "perturb_scale", "pilot_steps", "baseline"}},
      {"actuator",
       {"horizon", "burn_in", "window", "smoothing", "frequencies", "energy", "white_std"}},
  };
  return keys;
}

const char* section_for(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::EstimationSweep:
      return "estimation";
    case ScenarioKind::Regret:
      return "regret";
    case ScenarioKind::LowerBoundProbe:
      return "lower_bound";
    case ScenarioKind::ActuatorDemo:
      return "actuator";
  }
  return "";
}

void check_frequencies(const std::vector<double>& freqs, const std::string& field) {
  if (freqs.empty()) throw ConfigError(field + ": at least one frequency required");
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!(freqs[i] > 0.0 && freqs[i] <= 0.5)) throw ConfigError(field + ": frequencies must lie in (0, 0.5]");
    for (std::size_t j = 0; j < i; ++j) {
      if (freqs[i] == freqs[j]) throw ConfigError(field + ": frequencies must be distinct");
    }
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (replications < 1) throw ConfigError("[scenario] replications: must be >= 1");
  if (plant.coeffs.empty()) throw ConfigError("[plant] coeffs: required");
  if (!(plant.sigma >= 0.0)) throw ConfigError("[plant] sigma: must be >= 0");
  for (double r : plant.noise_ratios) {
    if (!(r >= 0.0)) throw ConfigError("[plant] noise_ratios: must be >= 0");
  }
  if (unmodeled.kind != MapKind::None) {
    if (!(std::abs(unmodeled.alpha) < 1.0)) throw ConfigError("[unmodeled] alpha: |alpha| must be < 1");
  }
  switch (kind) {
    case ScenarioKind::EstimationSweep:
      check_frequencies(estimation.frequencies, "[estimation] frequencies");
      if (estimation.horizon < 1) throw ConfigError("[estimation] horizon: must be >= 1");
      for (double e : estimation.energies) {
        if (!(e >= 0.0)) throw ConfigError("[estimation] energies: must be >= 0");
      }
      break;
    case ScenarioKind::LowerBoundProbe:
      check_frequencies(lower_bound.frequencies, "[lower_bound] frequencies");
      for (Index T : lower_bound.horizons) {
        if (T < 1) throw ConfigError("[lower_bound] horizons: must be >= 1");
      }
      if (!(lower_bound.energy >= 0.0)) throw ConfigError("[lower_bound] energy: must be >= 0");
      break;
    case ScenarioKind::Regret:
      check_frequencies(regret.frequencies, "[regret] frequencies");
      if (regret.T0 < 1) throw ConfigError("[regret] T0: must be >= 1");
      if (regret.steps < 1) throw ConfigError("[regret] steps: must be >= 1");
      if (!(regret.q >= 0.0)) throw ConfigError("[regret] q: must be >= 0");
      if (!(regret.r > 0.0)) throw ConfigError("[regret] r: must be > 0");
      if (!(regret.amplitude_fraction >= 0.5 && regret.amplitude_fraction <= 1.0)) {
        throw ConfigError("[regret] amplitude_fraction: must be in [0.5, 1]");
      }
      if (!(regret.perturb_scale >= 0.0)) throw ConfigError("[regret] perturb_scale: must be >= 0");
      if (regret.pilot_steps < 1) throw ConfigError("[regret] pilot_steps: must be >= 1");
      {
        const std::size_t d = plant.coeffs.size() + 1;
        if (regret.frequencies.size() < (d + 1) / 2) {
          throw ConfigError("[regret] frequencies: need at least ceil((n + 1) / 2) values");
        }
      }
      break;
    case ScenarioKind::ActuatorDemo:
      check_frequencies(actuator.frequencies, "[actuator] frequencies");
      if (!(actuator.smoothing > 0.0 && actuator.smoothing <= 1.0)) {
        throw ConfigError("[actuator] smoothing: must be in (0, 1]");
      }
      if (actuator.window < 1 || actuator.burn_in + actuator.window > actuator.horizon) {
        throw ConfigError("[actuator] window: burn_in + window must not exceed horizon");
      }
      if (replications < 30) throw ConfigError("[scenario] replications: actuator demo needs >= 30");
      break;
  }
}

ScenarioConfig parse_config(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  // read_ini drops sections without keys, so headers are checked separately.
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] != '[') continue;
    const auto close = line.find(']', first);
    const std::string name = line.substr(first + 1, close == std::string::npos ? close : close - first - 1);
    if (!schema().count(name)) throw ConfigError("config: unknown section [" + name + "]");
  }
  ptree tree;
  try {
    std::istringstream body(text);
    boost::property_tree::ini_parser::read_ini(body, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ScenarioConfig config;
  Reader scenario(tree, "scenario");
  if (!scenario.has("kind")) throw ConfigError("[scenario] kind: required");
  scenario.choice("kind", config.kind,
                  std::map<std::string, ScenarioKind>{
                      {"estimation_sweep", ScenarioKind::EstimationSweep},
                      {"regret", ScenarioKind::Regret},
                      {"lower_bound_probe", ScenarioKind::LowerBoundProbe},
                      {"actuator_demo", ScenarioKind::ActuatorDemo}});

  const std::string own = section_for(config.kind);
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (body.data().size() && body.empty()) {
      throw ConfigError("config: key '" + section + "' outside any section");
    }
    if (it == schema().end()) throw ConfigError("config: unknown section [" + section + "]");
    const bool shared = section == "scenario" || section == "plant" || section == "unmodeled";
    if (!shared && section != own) {
      throw ConfigError("config: section [" + section + "] does not apply to kind " +
                        to_string(config.kind));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("[" + section + "] " + key + ": unknown key");
    }
  }

  scenario.count("replications", config.replications);
  scenario.seed("seed", config.seed);

  Reader plant(tree, "plant");
  plant.reals("coeffs", config.plant.coeffs);
  plant.real("sigma", config.plant.sigma);
  plant.reals("noise_ratios", config.plant.noise_ratios);

  Reader unmodeled(tree, "unmodeled");
  unmodeled.choice("kind", config.unmodeled.kind,
                   std::map<std::string, MapKind>{{"none", MapKind::None},
                                                  {"high_pass_square", MapKind::HighPassSquare},
                                                  {"linear_high_pass", MapKind::LinearHighPass}});
  unmodeled.real("alpha", config.unmodeled.alpha);
  unmodeled.real("beta", config.unmodeled.beta);
  unmodeled.real("gain", config.unmodeled.gain);

  Reader est(tree, "estimation");
  est.reals("energies", config.estimation.energies);
  est.reals("frequencies", config.estimation.frequencies);
  est.count("horizon", config.estimation.horizon);
  est.choice("energy_convention", config.estimation.energy_convention,
             std::map<std::string, EnergyConvention>{{"matched_rms", EnergyConvention::MatchedRms},
                                                     {"literal", EnergyConvention::Literal}});

  Reader lb(tree, "lower_bound");
  lb.counts("horizons", config.lower_bound.horizons);
  lb.reals("frequencies", config.lower_bound.frequencies);
  lb.real("energy", config.lower_bound.energy);

  Reader rg(tree, "regret");
  rg.real("q", config.regret.q);
  rg.real("r", config.regret.r);
  rg.count("T0", config.regret.T0);
  rg.count("steps", config.regret.steps);
  rg.real("amplitude_scale", config.regret.amplitude_scale);
  rg.real("amplitude_exponent", config.regret.amplitude_exponent);
  rg.real("amplitude_fraction", config.regret.amplitude_fraction);
  rg.flag("randomize_amplitudes", config.regret.randomize_amplitudes);
  rg.reals("frequencies", config.regret.frequencies);
  rg.flag("snap_to_grid", config.regret.snap_to_grid);
  rg.flag("optimize_frequencies", config.regret.optimize_frequencies);
  rg.real("perturb_scale", config.regret.perturb_scale);
  rg.count("pilot_steps", config.regret.pilot_steps);
  rg.choice("baseline", config.regret.baseline,
            std::map<std::string, BaselineKind>{{"analytic", BaselineKind::Analytic},
                                                {"empirical", BaselineKind::Empirical}});

  Reader act(tree, "actuator");
  act.count("horizon", config.actuator.horizon);
  act.count("burn_in", config.actuator.burn_in);
  act.count("window", config.actuator.window);
  act.real("smoothing", config.actuator.smoothing);
  act.reals("frequencies", config.actuator.frequencies);
  act.real("energy", config.actuator.energy);
  act.real("white_std", config.actuator.white_std);

  config.validate();
  return config;
}

ScenarioConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

}  // namespace speclines
