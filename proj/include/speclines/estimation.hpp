#pragma once

#include <vector>

#include "speclines/dynamics.hpp"
#include "speclines/excitation.hpp"
#include "speclines/numerics.hpp"

namespace speclines {

struct EstimationResult {
  RealMatrix A_hat;
  RealMatrix B_hat;
  RealMatrix gram;  // sum_k phi_k phi_k^T
  Index sample_count = 0;
};

/// argmin sum_k |x_{k+1} - A x_k - B u_k|^2 over every step of `traj`.
/// Throws RankDeficient when sigma_min(gram) < 1e-10 trace(gram).
EstimationResult least_squares(const Trajectory& traj);

/// max(|A_hat - A|, |B_hat - B|) in operator norm.
double estimation_error(const EstimationResult& result, const LinearSystem& truth);

struct RecursiveState {
  RealVector theta;
  double gamma = 1.0;
};

/// theta_{k+1} = theta_k - gamma phi_k (theta_k^T phi_k - y_k) / (1 + phi_k^T phi_k).
/// `phis` holds one regressor per column. Returns theta_0 .. theta_N.
std::vector<RecursiveState> recursive_estimate(const RealMatrix& phis, const RealVector& ys,
                                               double gamma, const RealVector& theta0);

/// Runs the recursion row by row over `passes` sweeps of the trajectory,
/// starting from zero. Returns [A_hat B_hat].
RealMatrix recursive_fit(const Trajectory& traj, double gamma, int passes);

/// sigma sqrt(8 d log(5 det(Ybar)^{1/(2d)} det(V)^{-1/(2d)} / delta^{1/d})).
double martingale_bound(const RealMatrix& gram_plus_V, const RealMatrix& V, double sigma,
                        double delta, Index d);

/// |Ybar^{-1/2} S| with S = sum_k phi_k eta_k^T and Ybar = sum_k phi_k phi_k^T + V.
double self_normalized_statistic(const RealMatrix& phis, const RealMatrix& noises,
                                 const RealMatrix& V);

/// (sigma^2 T tr G_{T-1}(A) + T u_M^2 tr G_{T-1}(A, B) + T u_M^2) / delta.
double deterministic_gram_upper_bound(const LinearSystem& system, Index T, double u_M,
                                      double delta);

struct BoundReport {
  double ideal_term = 0.0;
  double unmodeled_term = 0.0;
  double total = 0.0;
  Index T = 0;
  double sigma_min = 0.0;
};

/// sqrt(1 / (T s^2)) + (1 / (T s^2)) sum_k (|phibar(k) w(k)^T| + |w(k)| / sqrt(T)),
/// with s = sigma_min(Phi), phibar = DFT(phi) / T and w = DFT(w), over the first
/// T steps of `traj`.
BoundReport estimation_bound(const InformationMatrix& info, const Trajectory& traj, Index T);

/// |sum_k (u(k) / T) (w(k) / T)^H| over the DFT grid of the whole trajectory.
double cross_term_tau(const Trajectory& traj);

}  // namespace speclines
