#include "speclines/estimation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace speclines {

EstimationResult least_squares(const Trajectory& traj) {
  const Index n = traj.state_dim(), m = traj.input_dim(), T = traj.horizon();
  if (T < n + m) throw RankDeficient("least_squares: fewer samples than unknowns");
  const RealMatrix phis = traj.regressors();
  EstimationResult result;
  result.gram = phis * phis.transpose();
  result.sample_count = T;

  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(result.gram, Eigen::EigenvaluesOnly);
  const double trace = result.gram.trace();
  if (!(trace > 0.0) || eig.eigenvalues()(0) < 1e-10 * trace) {
    throw RankDeficient("least_squares: regressors are not sufficiently exciting");
  }

  const RealMatrix targets = traj.states.rightCols(T).transpose();
  Eigen::ColPivHouseholderQR<RealMatrix> qr(phis.transpose());
  const RealMatrix theta = qr.solve(targets);  // (n+m) x n
  result.A_hat = theta.topRows(n).transpose();
  result.B_hat = theta.bottomRows(m).transpose();
  return result;
}

double estimation_error(const EstimationResult& result, const LinearSystem& truth) {
  if (result.A_hat.rows() != truth.A.rows() || result.A_hat.cols() != truth.A.cols() ||
      result.B_hat.rows() != truth.B.rows() || result.B_hat.cols() != truth.B.cols()) {
    throw DimensionMismatch("estimation_error: estimate and truth differ in shape");
  }
  return std::max(operator_norm(result.A_hat - truth.A), operator_norm(result.B_hat - truth.B));
}

std::vector<RecursiveState> recursive_estimate(const RealMatrix& phis, const RealVector& ys,
                                               double gamma, const RealVector& theta0) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw ConfigError("recursive_estimate: gamma must be in (0, 2)");
  if (phis.cols() != ys.size() || phis.rows() != theta0.size()) {
    throw DimensionMismatch("recursive_estimate: inconsistent dimensions");
  }
  std::vector<RecursiveState> states;
  states.reserve(static_cast<std::size_t>(ys.size()) + 1);
  states.push_back({theta0, gamma});
  RealVector theta = theta0;
  for (Index k = 0; k < ys.size(); ++k) {
    const auto phi = phis.col(k);
    const double error = theta.dot(phi) - ys(k);
    theta -= (gamma * error / (1.0 + phi.squaredNorm())) * phi;
    states.push_back({theta, gamma});
  }
  return states;
}

RealMatrix recursive_fit(const Trajectory& traj, double gamma, int passes) {
  const Index n = traj.state_dim(), T = traj.horizon();
  const RealMatrix phis = traj.regressors();
  RealMatrix theta = RealMatrix::Zero(n, phis.rows());
  for (Index i = 0; i < n; ++i) {
    RealVector row = RealVector::Zero(phis.rows());
    const RealVector ys = traj.states.row(i).tail(T).transpose();
    for (int p = 0; p < passes; ++p) row = recursive_estimate(phis, ys, gamma, row).back().theta;
    theta.row(i) = row.transpose();
  }
  return theta;
}

namespace {
double log_det_pd(const RealMatrix& M, const char* what) {
  if (M.rows() != M.cols() || M.rows() == 0) throw DimensionMismatch(what);
  Eigen::LLT<RealMatrix> llt(M);
  if (llt.info() != Eigen::Success) throw NonPositiveDefinite(what);
  const RealVector diag = llt.matrixL().toDenseMatrix().diagonal();
  if ((diag.array() <= 0.0).any()) throw NonPositiveDefinite(what);
  return 2.0 * diag.array().log().sum();
}
}  // namespace

double martingale_bound(const RealMatrix& gram_plus_V, const RealMatrix& V, double sigma,
                        double delta, Index d) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("martingale_bound: delta must be in (0, 1]");
  if (d < 1) throw ConfigError("martingale_bound: d must be >= 1");
  const double ld_y = log_det_pd(gram_plus_V, "martingale_bound: Ybar must be positive definite");
  const double ld_v = log_det_pd(V, "martingale_bound: V must be positive definite");
  const double dd = static_cast<double>(d);
  const double log_arg = std::log(5.0) + (ld_y - ld_v) / (2.0 * dd) - std::log(delta) / dd;
  return sigma * std::sqrt(8.0 * dd * log_arg);
}

double self_normalized_statistic(const RealMatrix& phis, const RealMatrix& noises,
                                 const RealMatrix& V) {
  if (phis.cols() != noises.cols() || V.rows() != phis.rows()) {
    throw DimensionMismatch("self_normalized_statistic: inconsistent dimensions");
  }
  const RealMatrix ybar = phis * phis.transpose() + V;
  const RealMatrix S = phis * noises.transpose();
  Eigen::LLT<RealMatrix> llt(ybar);
  if (llt.info() != Eigen::Success) throw NonPositiveDefinite("self_normalized_statistic: Ybar");
  // |Ybar^{-1/2} S| = |L^{-1} S| for Ybar = L L^T.
  const RealMatrix whitened = llt.matrixL().solve(S);
  return operator_norm(whitened);
}

double deterministic_gram_upper_bound(const LinearSystem& system, Index T, double u_M,
                                      double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("deterministic_gram_upper_bound: delta must be in (0, 1)");
  }
  if (T < 1) throw ConfigError("deterministic_gram_upper_bound: T must be >= 1");
  const double t = static_cast<double>(T);
  const double noise = system.sigma * system.sigma * t * gramian(system.A, T - 1).trace();
  const double input = t * u_M * u_M * controllability_gramian(system.A, system.B, T - 1).trace();
  return (noise + input + t * u_M * u_M) / delta;
}

BoundReport estimation_bound(const InformationMatrix& info, const Trajectory& traj, Index T) {
  if (T < 1 || T > traj.horizon()) throw DimensionMismatch("estimation_bound: T outside trajectory");
  BoundReport report;
  report.T = T;
  report.sigma_min = info.sigma_min;
  const double t = static_cast<double>(T);
  const double s2 = info.sigma_min * info.sigma_min;
  if (!(s2 > 0.0)) {
    report.ideal_term = report.unmodeled_term = report.total =
        std::numeric_limits<double>::infinity();
    return report;
  }
  report.ideal_term = std::sqrt(1.0 / (t * s2));

  const RealMatrix w = traj.unmodeled.leftCols(T);
  if (w.cwiseAbs().maxCoeff() > 0.0) {
    const ComplexMatrix phi_hat = dft_all(traj.regressors().leftCols(T)) / t;
    const ComplexMatrix w_hat = dft_all(w);
    double sum = 0.0;
    for (Index k = 0; k < T; ++k) {
      const double w_norm = w_hat.col(k).norm();
      sum += phi_hat.col(k).norm() * w_norm + w_norm / std::sqrt(t);
    }
    report.unmodeled_term = sum / (t * s2);
  }
  report.total = report.ideal_term + report.unmodeled_term;
  return report;
}

double cross_term_tau(const Trajectory& traj) {
  const Index T = traj.horizon();
  if (T < 1) throw EmptyInput("cross_term_tau: empty trajectory");
  if (traj.unmodeled.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const double t = static_cast<double>(T);
  const ComplexMatrix u_hat = dft_all(traj.inputs) / t;
  const ComplexMatrix w_hat = dft_all(traj.unmodeled) / t;
  const ComplexMatrix cross = u_hat * w_hat.adjoint();
  return operator_norm(cross);
}

}  // namespace speclines
