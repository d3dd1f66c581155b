#pragma once

#include <limits>
#include <string>
#include <vector>

#include "speclines/dynamics.hpp"
#include "speclines/estimation.hpp"
#include "speclines/excitation.hpp"
#include "speclines/numerics.hpp"
#include "speclines/random.hpp"

namespace speclines {

struct CostMatrices {
  RealMatrix Q;
  RealMatrix R;

  /// Symmetric, Q >= 0, R > 0, sized n x n and m x m.
  void validate(Index n, Index m) const;
  static CostMatrices scaled_identity(Index n, Index m, double q, double r);
};

struct LqrSolution {
  RealMatrix P;
  RealMatrix K;  // u = K x
  double J_star = 0.0;  // average cost at unit noise scale, tr(P)
  double riccati_residual = 0.0;
  double closed_loop_radius = 0.0;  // of A + B K for the (A, B) that was solved
  Index iterations = 0;
};

/// Value iteration P <- A'PA - A'PB (R + B'PB)^{-1} B'PA + Q from P = Q.
/// Stops when the largest entry change is below tol * max(1, max|P|).
/// Throws NotStabilizable on divergence (|P| > 1e12), when max_iter is
/// exhausted, or when the resulting closed loop is not Schur stable.
LqrSolution solve_dare(const RealMatrix& A, const RealMatrix& B, const CostMatrices& costs,
                       double tol = 1e-10, Index max_iter = 100000);

/// |A'PA - A'PB (R + B'PB)^{-1} B'PA + Q - P| (operator norm).
double riccati_residual(const RealMatrix& A, const RealMatrix& B, const CostMatrices& costs,
                        const RealMatrix& P);

double optimal_average_cost(const RealMatrix& P, double sigma);

/// sigma_min([B AB ... A^{ell-1}B]); zero when ell * m < n.
double ln_stability(const RealMatrix& A, const RealMatrix& B, Index ell);

struct RegretRecord {
  std::vector<double> costs;   // c_k = x_k'Qx_k + u_k'Ru_k
  double J_star = 0.0;
  std::vector<double> regret;  // regret[k] = sum_{i<=k} (c_i - J_star)
};

RegretRecord regret(const Trajectory& traj, const CostMatrices& costs, double J_star);

struct InitialController {
  RealMatrix K;
  RealMatrix A_hat;
  double perturb_scale = 0.0;  // scale of the accepted perturbation
  int retries = 0;
};

/// Perturbs the bottom row of truth.A by perturb_scale * N(0, I), designs the
/// LQR gain for the perturbed model, and halves the scale (at most 10 times)
/// until A + B K is Schur stable for the true plant.
InitialController perturbed_initial_controller(const LinearSystem& truth,
                                               const CostMatrices& costs, double perturb_scale,
                                               const RngSpec& rng);

enum class ExplorationKind { MultiSine, Gaussian };

struct EpochConfig {
  Index T0 = 50;
  double amplitude_scale = 1.0;       // M
  double amplitude_exponent = -0.25;  // Mbar_i = M T_i^exponent
  /// Candidate set; the first ceil((n+m)/2) are used unless optimize_frequencies.
  std::vector<double> frequencies;
  /// Fraction in [0.5, 1]: M_j = fraction * Mbar_i.
  double amplitude_fraction = 1.0;
  /// Draw M_j uniformly in [Mbar_i / 2, Mbar_i] instead of the fixed fraction.
  bool randomize_amplitudes = false;
  /// Round each frequency to the nearest multiple of 1 / T_i.
  bool snap_to_grid = false;
  /// Best ceil((n+m)/2)-subset of the candidates by sigma_min of the
  /// information matrix under the current model.
  bool optimize_frequencies = false;
  ExplorationKind exploration = ExplorationKind::MultiSine;
  /// Stop after this many steps overall (0 = run all epochs in full).
  Index horizon = 0;
};

struct EpochState {
  Index epoch_index = 0;
  Index start = 0;
  Index epoch_length = 0;  // T_i
  Index steps = 0;         // samples actually collected (< T_i when truncated)
  double amplitude_cap = 0.0;
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
  RealMatrix K;  // controller applied during the epoch
  RealMatrix A_hat;
  RealMatrix B_hat;
  double err_A = std::numeric_limits<double>::quiet_NaN();
  double err_B = std::numeric_limits<double>::quiet_NaN();
  double riccati_residual = std::numeric_limits<double>::quiet_NaN();
  double closed_loop_radius = std::numeric_limits<double>::quiet_NaN();
  bool controller_updated = false;
  std::string note;
};

struct EpochDoublingResult {
  Trajectory trajectory;
  std::vector<EpochState> epochs;
  RegretRecord regret;
};

/// Ceil((n+m)/2) frequencies for epoch i, per the config rules.
std::vector<double> select_frequencies(const EpochConfig& config, const LinearSystem& model,
                                       Index epoch_length, const std::vector<double>& amplitudes);

/// Epoch-doubling exploration and certainty-equivalent control. Process noise
/// is drawn from rng.derive(0), exploration randomness from rng.derive(1).
EpochDoublingResult run_epoch_doubling(const EpochConfig& config, const LinearSystem& truth,
                                const UnmodeledMap& map, const CostMatrices& costs,
                                const InitialController& init, double J_star, const RngSpec& rng,
                                Index num_epochs, const RealVector& x0 = {});

/// Average cost of the true plant under K with the noise stream rng.derive(0).
double empirical_baseline(const LinearSystem& truth, const UnmodeledMap& map,
                          const CostMatrices& costs, const RealMatrix& K, const RngSpec& rng,
                          Index T, const RealVector& x0 = {});

}  // namespace speclines
