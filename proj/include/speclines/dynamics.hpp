#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <variant>

#include "speclines/numerics.hpp"
#include "speclines/random.hpp"

namespace speclines {

/// The modeled plant x_{k+1} = A x_k + B u_k + (unmodeled) + eta_k with
/// eta_k ~ N(0, sigma^2 I).
struct LinearSystem {
  RealMatrix A;
  RealMatrix B;
  double sigma = 0.0;

  [[nodiscard]] Index state_dim() const { return A.rows(); }
  [[nodiscard]] Index input_dim() const { return B.cols(); }
  /// Throws DimensionMismatch / ConfigError on a malformed system.
  void validate() const;
};

/// Control canonical form: ones on the superdiagonal, `coeffs` as the bottom
/// row, B = e_n.
LinearSystem companion_system(std::span<const double> coeffs, double sigma);

/// w_k = direction * c * wbar_k^2 with the first order filter
/// wbar_k = alpha wbar_{k-1} + alpha (u_k - beta u_{k-1}). Scalar input only.
class HighPassNonlinearity {
 public:
  HighPassNonlinearity(double alpha, double beta, double gain, RealVector direction);
  /// Direction defaults to the all-ones vector of length n.
  HighPassNonlinearity(double alpha, double beta, double gain, Index n);

  RealVector step(double u);
  void reset();

  /// Linear filter part alpha (z - beta) / (z - alpha) at z = exp(j 2 pi f).
  [[nodiscard]] Complex frequency_response(double f) const;
  /// alpha (1 - beta) / (1 - alpha).
  [[nodiscard]] double dc_gain() const;

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double gain() const { return gain_; }
  [[nodiscard]] const RealVector& direction() const { return direction_; }
  [[nodiscard]] double filter_state() const { return filter_state_; }

 private:
  double alpha_;
  double beta_;
  double gain_;
  RealVector direction_;
  double filter_state_ = 0.0;
  double prev_input_ = 0.0;
};

/// A user-supplied causal linear filter from a scalar input:
///   wbar_k = sum_{i>=1} a_i wbar_{k-i} + sum_{i>=0} b_i u_{k-i},
///   w_k    = direction * gain * wbar_k.
class LinearFilterMap {
 public:
  LinearFilterMap(std::vector<double> feedback, std::vector<double> feedforward, double gain,
                  RealVector direction);

  /// The linear part of HighPassNonlinearity as a map of its own.
  static LinearFilterMap high_pass(double alpha, double beta, double gain, Index n);

  RealVector step(double u);
  void reset();
  [[nodiscard]] Complex frequency_response(double f) const;

 private:
  std::vector<double> feedback_;     // a_1..a_p
  std::vector<double> feedforward_;  // b_0..b_q
  double gain_;
  RealVector direction_;
  std::vector<double> past_outputs_;  // wbar_{k-1}, wbar_{k-2}, ...
  std::vector<double> past_inputs_;   // u_{k-1}, u_{k-2}, ...
};

struct NoUnmodeled {};

/// Causal input-driven map u_k -> w_k. Carries its own internal state.
class UnmodeledMap {
 public:
  UnmodeledMap() = default;
  UnmodeledMap(HighPassNonlinearity map) : impl_(std::move(map)) {}
  UnmodeledMap(LinearFilterMap map) : impl_(std::move(map)) {}

  static UnmodeledMap none() { return {}; }

  /// w_k for input u_k; n is the state dimension (used by the None variant).
  RealVector step(const RealVector& u, Index n);
  void reset();
  [[nodiscard]] bool is_none() const { return std::holds_alternative<NoUnmodeled>(impl_); }

 private:
  std::variant<NoUnmodeled, HighPassNonlinearity, LinearFilterMap> impl_;
};

/// Frequency response of the linear part of the map; requires 0 <= f <= 0.5.
Complex hp_frequency_response(const HighPassNonlinearity& map, double f);

/// Recorded run. Column k of each matrix is time step k.
struct Trajectory {
  RealMatrix states;     // n x (T+1)
  RealMatrix inputs;     // m x T
  RealMatrix unmodeled;  // n x T
  RealMatrix noises;     // n x T

  [[nodiscard]] Index horizon() const { return inputs.cols(); }
  [[nodiscard]] Index state_dim() const { return states.rows(); }
  [[nodiscard]] Index input_dim() const { return inputs.rows(); }
  /// phi_k = [x_k; u_k].
  [[nodiscard]] RealVector regressor(Index k) const;
  /// All regressors, (n+m) x T.
  [[nodiscard]] RealMatrix regressors() const;
  /// Steps [begin, end) as a trajectory of its own (states begin..end).
  [[nodiscard]] Trajectory slice(Index begin, Index end) const;
};

/// u_k as a function of the step index and the current state.
using InputPolicy = std::function<RealVector(Index k, const RealVector& x)>;

InputPolicy open_loop(std::function<double(Index)> signal);
InputPolicy open_loop(const RealMatrix& inputs);
template <typename Derived>
InputPolicy open_loop(const Eigen::MatrixBase<Derived>& inputs) {
  return open_loop(RealMatrix(inputs));
}
/// u_k = K x_k + exploration(k), scalar exploration for m = 1.
InputPolicy state_feedback(RealMatrix K, std::function<double(Index)> exploration);

struct SimulationOptions {
  double blowup_guard = 1e12;
};

/// Step-by-step simulator that records everything it produces. Used directly
/// when the policy changes between segments of one run.
class Simulator {
 public:
  Simulator(LinearSystem system, UnmodeledMap map, const RngSpec& rng, RealVector x0 = {},
            SimulationOptions options = {});

  /// Applies u_k, returns x_{k+1}. Throws StateBlowup past the guard.
  const RealVector& step(const RealVector& u);
  [[nodiscard]] const RealVector& state() const { return x_; }
  [[nodiscard]] Index steps() const { return static_cast<Index>(inputs_.size()); }
  [[nodiscard]] const LinearSystem& system() const { return system_; }
  [[nodiscard]] Trajectory trajectory() const;

 private:
  LinearSystem system_;
  UnmodeledMap map_;
  GaussianStream noise_;
  SimulationOptions options_;
  RealVector x_;
  std::vector<RealVector> states_, inputs_, unmodeled_, noises_;
};

Trajectory simulate(const LinearSystem& system, UnmodeledMap map, const InputPolicy& policy,
                    Index T, const RngSpec& rng, const RealVector& x0 = {},
                    SimulationOptions options = {});

/// max_k |x_{k+1} - (A x_k + B u_k + w_k + eta_k)| over all entries.
double replay_residual(const LinearSystem& system, const Trajectory& traj);

/// CSV with columns k, x_1..x_n, u_1..u_m, w_1..w_n. The final row k = T
/// carries the terminal state with empty input and unmodeled cells.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace speclines
