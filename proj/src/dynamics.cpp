#include "speclines/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <type_traits>

#include "speclines/csv.hpp"

namespace speclines {

void LinearSystem::validate() const {
  if (A.rows() != A.cols()) throw DimensionMismatch("LinearSystem: A must be square");
  if (B.rows() != A.rows()) throw DimensionMismatch("LinearSystem: B.rows must equal n");
  if (!(sigma >= 0.0)) throw ConfigError("LinearSystem: sigma must be >= 0");
  if (!A.allFinite() || !B.allFinite()) throw ConfigError("LinearSystem: non-finite entries");
}

LinearSystem companion_system(std::span<const double> coeffs, double sigma) {
  const auto n = static_cast<Index>(coeffs.size());
  if (n < 1) throw ConfigError("companion_system: need at least one coefficient");
  LinearSystem sys;
  sys.A = RealMatrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) sys.A(i, i + 1) = 1.0;
  for (Index j = 0; j < n; ++j) sys.A(n - 1, j) = coeffs[j];
  sys.B = RealMatrix::Zero(n, 1);
  sys.B(n - 1, 0) = 1.0;
  sys.sigma = sigma;
  sys.validate();
  return sys;
}

namespace {
Complex unit_circle(double f) { return std::polar(1.0, 2.0 * std::numbers::pi * f); }
}  // namespace

HighPassNonlinearity::HighPassNonlinearity(double alpha, double beta, double gain,
                                           RealVector direction)
    : alpha_(alpha), beta_(beta), gain_(gain), direction_(std::move(direction)) {
  if (!(std::abs(alpha_) < 1.0)) throw ConfigError("HighPassNonlinearity: |alpha| must be < 1");
  if (!std::isfinite(beta_) || !std::isfinite(gain_)) {
    throw ConfigError("HighPassNonlinearity: beta and gain must be finite");
  }
}

HighPassNonlinearity::HighPassNonlinearity(double alpha, double beta, double gain, Index n)
    : HighPassNonlinearity(alpha, beta, gain, RealVector::Ones(n)) {}

RealVector HighPassNonlinearity::step(double u) {
  filter_state_ = alpha_ * filter_state_ + alpha_ * (u - beta_ * prev_input_);
  prev_input_ = u;
  return direction_ * (gain_ * filter_state_ * filter_state_);
}

void HighPassNonlinearity::reset() {
  filter_state_ = 0.0;
  prev_input_ = 0.0;
}

Complex HighPassNonlinearity::frequency_response(double f) const {
  const Complex z = unit_circle(f);
  return alpha_ * (z - beta_) / (z - alpha_);
}

double HighPassNonlinearity::dc_gain() const { return alpha_ * (1.0 - beta_) / (1.0 - alpha_); }

Complex hp_frequency_response(const HighPassNonlinearity& map, double f) {
  if (!(f >= 0.0 && f <= 0.5)) throw ConfigError("hp_frequency_response: f must be in [0, 0.5]");
  return map.frequency_response(f);
}

LinearFilterMap::LinearFilterMap(std::vector<double> feedback, std::vector<double> feedforward,
                                 double gain, RealVector direction)
    : feedback_(std::move(feedback)),
      feedforward_(std::move(feedforward)),
      gain_(gain),
      direction_(std::move(direction)),
      past_outputs_(feedback_.size(), 0.0),
      past_inputs_(feedforward_.empty() ? 0 : feedforward_.size() - 1, 0.0) {}

LinearFilterMap LinearFilterMap::high_pass(double alpha, double beta, double gain, Index n) {
  if (!(std::abs(alpha) < 1.0)) throw ConfigError("LinearFilterMap: |alpha| must be < 1");
  return LinearFilterMap({alpha}, {alpha, -alpha * beta}, gain, RealVector::Ones(n));
}

RealVector LinearFilterMap::step(double u) {
  double out = feedforward_.empty() ? 0.0 : feedforward_[0] * u;
  for (std::size_t i = 1; i < feedforward_.size(); ++i) out += feedforward_[i] * past_inputs_[i - 1];
  for (std::size_t i = 0; i < feedback_.size(); ++i) out += feedback_[i] * past_outputs_[i];
  if (!past_inputs_.empty()) {
    std::copy_backward(past_inputs_.begin(), past_inputs_.end() - 1, past_inputs_.end());
    past_inputs_[0] = u;
  }
  if (!past_outputs_.empty()) {
    std::copy_backward(past_outputs_.begin(), past_outputs_.end() - 1, past_outputs_.end());
    past_outputs_[0] = out;
  }
  return direction_ * (gain_ * out);
}

void LinearFilterMap::reset() {
  std::fill(past_outputs_.begin(), past_outputs_.end(), 0.0);
  std::fill(past_inputs_.begin(), past_inputs_.end(), 0.0);
}

Complex LinearFilterMap::frequency_response(double f) const {
  const Complex zinv = 1.0 / unit_circle(f);
  Complex num = 0.0, den = 1.0, power = 1.0;
  for (double b : feedforward_) {
    num += b * power;
    power *= zinv;
  }
  power = zinv;
  for (double a : feedback_) {
    den -= a * power;
    power *= zinv;
  }
  return num / den;
}

RealVector UnmodeledMap::step(const RealVector& u, Index n) {
  return std::visit(
      [&](auto& map) -> RealVector {
        using T = std::decay_t<decltype(map)>;
        if constexpr (std::is_same_v<T, NoUnmodeled>) {
          return RealVector::Zero(n);
        } else {
          if (u.size() != 1) throw DimensionMismatch("unmodeled map: scalar input required");
          RealVector w = map.step(u(0));
          if (w.size() != n) throw DimensionMismatch("unmodeled map: direction length != n");
          return w;
        }
      },
      impl_);
}

void UnmodeledMap::reset() {
  std::visit(
      [](auto& map) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(map)>, NoUnmodeled>) map.reset();
      },
      impl_);
}

RealVector Trajectory::regressor(Index k) const {
  RealVector phi(state_dim() + input_dim());
  phi << states.col(k), inputs.col(k);
  return phi;
}

RealMatrix Trajectory::regressors() const {
  RealMatrix phi(state_dim() + input_dim(), horizon());
  phi.topRows(state_dim()) = states.leftCols(horizon());
  phi.bottomRows(input_dim()) = inputs;
  return phi;
}

Trajectory Trajectory::slice(Index begin, Index end) const {
  if (begin < 0 || end > horizon() || begin > end) {
    throw DimensionMismatch("Trajectory::slice: range outside trajectory");
  }
  const Index len = end - begin;
  return Trajectory{states.middleCols(begin, len + 1), inputs.middleCols(begin, len),
                    unmodeled.middleCols(begin, len), noises.middleCols(begin, len)};
}

InputPolicy open_loop(std::function<double(Index)> signal) {
  return [signal = std::move(signal)](Index k, const RealVector&) {
    return RealVector::Constant(1, signal(k));
  };
}

InputPolicy open_loop(const RealMatrix& inputs) {
  return [inputs](Index k, const RealVector&) -> RealVector { return inputs.col(k); };
}

InputPolicy state_feedback(RealMatrix K, std::function<double(Index)> exploration) {
  return [K = std::move(K), exploration = std::move(exploration)](Index k, const RealVector& x) {
    RealVector u = K * x;
    if (exploration) u.array() += exploration(k);
    return u;
  };
}

Simulator::Simulator(LinearSystem system, UnmodeledMap map, const RngSpec& rng, RealVector x0,
                     SimulationOptions options)
    : system_(std::move(system)), map_(std::move(map)), noise_(rng), options_(options) {
  system_.validate();
  x_ = x0.size() == 0 ? RealVector::Zero(system_.state_dim()) : std::move(x0);
  if (x_.size() != system_.state_dim()) throw DimensionMismatch("Simulator: x0 has wrong size");
  states_.push_back(x_);
}

const RealVector& Simulator::step(const RealVector& u) {
  const Index n = system_.state_dim();
  if (u.size() != system_.input_dim()) throw DimensionMismatch("Simulator: input has wrong size");
  RealVector w = map_.step(u, n);
  RealVector eta = system_.sigma * noise_.vector(n);
  RealVector next = system_.A * x_ + system_.B * u + w + eta;
  if (!next.allFinite() || next.norm() > options_.blowup_guard) {
    throw StateBlowup("simulate: state norm exceeded the blowup guard at step " +
                      std::to_string(steps()));
  }
  inputs_.push_back(u);
  unmodeled_.push_back(std::move(w));
  noises_.push_back(std::move(eta));
  x_ = std::move(next);
  states_.push_back(x_);
  return x_;
}

namespace {
RealMatrix stack_columns(const std::vector<RealVector>& cols, Index rows) {
  RealMatrix out(rows, static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = cols[k];
  return out;
}
}  // namespace

Trajectory Simulator::trajectory() const {
  const Index n = system_.state_dim();
  return Trajectory{stack_columns(states_, n), stack_columns(inputs_, system_.input_dim()),
                    stack_columns(unmodeled_, n), stack_columns(noises_, n)};
}

Trajectory simulate(const LinearSystem& system, UnmodeledMap map, const InputPolicy& policy,
                    Index T, const RngSpec& rng, const RealVector& x0, SimulationOptions options) {
  if (T < 1) throw ConfigError("simulate: T must be >= 1");
  Simulator sim(system, std::move(map), rng, x0, options);
  for (Index k = 0; k < T; ++k) sim.step(policy(k, sim.state()));
  return sim.trajectory();
}

double replay_residual(const LinearSystem& system, const Trajectory& traj) {
  double worst = 0.0;
  for (Index k = 0; k < traj.horizon(); ++k) {
    const RealVector predicted = system.A * traj.states.col(k) + system.B * traj.inputs.col(k) +
                                 traj.unmodeled.col(k) + traj.noises.col(k);
    worst = std::max(worst, (traj.states.col(k + 1) - predicted).cwiseAbs().maxCoeff());
  }
  return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Index n = traj.state_dim(), m = traj.input_dim(), T = traj.horizon();
  std::vector<std::string> header{"k"};
  for (Index i = 1; i <= n; ++i) header.push_back("x_" + std::to_string(i));
  for (Index i = 1; i <= m; ++i) header.push_back("u_" + std::to_string(i));
  for (Index i = 1; i <= n; ++i) header.push_back("w_" + std::to_string(i));
  csv::Table table(header);
  for (Index k = 0; k <= T; ++k) {
    std::vector<std::string> row{csv::format(static_cast<std::int64_t>(k))};
    for (Index i = 0; i < n; ++i) row.push_back(csv::format(traj.states(i, k)));
    for (Index i = 0; i < m; ++i) row.push_back(k < T ? csv::format(traj.inputs(i, k)) : "");
    for (Index i = 0; i < n; ++i) row.push_back(k < T ? csv::format(traj.unmodeled(i, k)) : "");
    table.add_row(std::move(row));
  }
  table.write(out);
}

}  // namespace speclines
