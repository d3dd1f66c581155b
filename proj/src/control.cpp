#include "speclines/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace speclines {

void CostMatrices::validate(Index n, Index m) const {
  if (Q.rows() != n || Q.cols() != n) throw DimensionMismatch("CostMatrices: Q must be n x n");
  if (R.rows() != m || R.cols() != m) throw DimensionMismatch("CostMatrices: R must be m x m");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()) ||
      (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, R.cwiseAbs().maxCoeff())) {
    throw ConfigError("CostMatrices: Q and R must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> q(Q, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<RealMatrix> r(R, Eigen::EigenvaluesOnly);
  if (q.eigenvalues()(0) < -1e-12) throw NonPositiveDefinite("CostMatrices: Q must be PSD");
  if (!(r.eigenvalues()(0) > 0.0)) throw NonPositiveDefinite("CostMatrices: R must be PD");
}

CostMatrices CostMatrices::scaled_identity(Index n, Index m, double q, double r) {
  return {q * RealMatrix::Identity(n, n), r * RealMatrix::Identity(m, m)};
}

namespace {

RealMatrix riccati_step(const RealMatrix& A, const RealMatrix& B, const CostMatrices& costs,
                        const RealMatrix& P, RealMatrix* gain) {
  const RealMatrix S = costs.R + B.transpose() * P * B;
  const RealMatrix BtPA = B.transpose() * P * A;
  const RealMatrix K = -S.ldlt().solve(BtPA);
  if (gain) *gain = K;
  RealMatrix next = A.transpose() * P * A + A.transpose() * P * B * K + costs.Q;
  return (0.5 * (next + next.transpose())).eval();
}

}  // namespace

double riccati_residual(const RealMatrix& A, const RealMatrix& B, const CostMatrices& costs,
                        const RealMatrix& P) {
  return operator_norm(riccati_step(A, B, costs, P, nullptr) - P);
}

LqrSolution solve_dare(const RealMatrix& A, const RealMatrix& B, const CostMatrices& costs,
                       double tol, Index max_iter) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw DimensionMismatch("solve_dare: inconsistent A and B");
  }
  costs.validate(A.rows(), B.cols());
  RealMatrix P = costs.Q;
  LqrSolution sol;
  bool converged = false;
  for (Index it = 1; it <= max_iter; ++it) {
    RealMatrix next = riccati_step(A, B, costs, P, nullptr);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > 1e12) {
      throw NotStabilizable("solve_dare: Riccati iteration diverged");
    }
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (change <= tol * std::max(1.0, P.cwiseAbs().maxCoeff())) {
      sol.iterations = it;
      converged = true;
      break;
    }
  }
  if (!converged) throw NotStabilizable("solve_dare: no convergence within max_iter");
  sol.P = P;
  riccati_step(A, B, costs, P, &sol.K);
  sol.J_star = P.trace();
  sol.riccati_residual = riccati_residual(A, B, costs, P);
  sol.closed_loop_radius = spectral_radius(A + B * sol.K);
  if (!(sol.closed_loop_radius < 1.0)) {
    throw NotStabilizable("solve_dare: closed loop is not Schur stable");
  }
  return sol;
}

double optimal_average_cost(const RealMatrix& P, double sigma) { return sigma * sigma * P.trace(); }

double ln_stability(const RealMatrix& A, const RealMatrix& B, Index ell) {
  if (ell < 1) throw ConfigError("ln_stability: ell must be >= 1");
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw DimensionMismatch("ln_stability: inconsistent A and B");
  }
  const Index n = A.rows(), m = B.cols();
  if (ell * m < n) return 0.0;
  RealMatrix C(n, ell * m);
  RealMatrix block = B;
  for (Index i = 0; i < ell; ++i) {
    C.middleCols(i * m, m) = block;
    block = (A * block).eval();
  }
  return sigma_min(C);
}

RegretRecord regret(const Trajectory& traj, const CostMatrices& costs, double J_star) {
  costs.validate(traj.state_dim(), traj.input_dim());
  RegretRecord record;
  record.J_star = J_star;
  const auto T = static_cast<std::size_t>(traj.horizon());
  record.costs.reserve(T);
  record.regret.reserve(T);
  double total = 0.0;
  for (Index k = 0; k < traj.horizon(); ++k) {
    const auto x = traj.states.col(k);
    const auto u = traj.inputs.col(k);
    const double c = x.dot(costs.Q * x) + u.dot(costs.R * u);
    total += c - J_star;
    record.costs.push_back(c);
    record.regret.push_back(total);
  }
  return record;
}

InitialController perturbed_initial_controller(const LinearSystem& truth,
                                               const CostMatrices& costs, double perturb_scale,
                                               const RngSpec& rng) {
  truth.validate();
  if (!(perturb_scale >= 0.0)) throw ConfigError("perturb_scale must be >= 0");
  const Index n = truth.state_dim();
  GaussianStream stream(rng);
  double scale = perturb_scale;
  for (int attempt = 0; attempt <= 10; ++attempt, scale *= 0.5) {
    RealMatrix A_hat = truth.A;
    A_hat.row(n - 1) += scale * stream.vector(n).transpose();
    try {
      const LqrSolution sol = solve_dare(A_hat, truth.B, costs);
      if (spectral_radius(truth.A + truth.B * sol.K) < 1.0) {
        return {sol.K, A_hat, scale, attempt};
      }
    } catch (const NotStabilizable&) {
    }
  }
  throw NoStabilizingController("perturbed_initial_controller: retries exhausted");
}

namespace {

// All k-subsets of {0..count-1} in lexicographic order.
void for_each_subset(std::size_t count, std::size_t k, std::vector<std::size_t>& current,
                     std::size_t from, const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (current.size() == k) {
    f(current);
    return;
  }
  for (std::size_t i = from; i < count; ++i) {
    current.push_back(i);
    for_each_subset(count, k, current, i + 1, f);
    current.pop_back();
  }
}

std::vector<double> snap(std::vector<double> freqs, Index length) {
  for (double& f : freqs) {
    const double snapped = std::round(f * static_cast<double>(length)) / static_cast<double>(length);
    if (snapped > 0.0) f = snapped;
  }
  return freqs;
}

}  // namespace

std::vector<double> select_frequencies(const EpochConfig& config, const LinearSystem& model,
                                       Index epoch_length, const std::vector<double>& amplitudes) {
  const auto d = static_cast<std::size_t>(model.state_dim() + model.input_dim());
  const std::size_t J = (d + 1) / 2;
  const std::vector<double> candidates =
      config.snap_to_grid ? snap(config.frequencies, epoch_length) : config.frequencies;
  if (candidates.size() < J) {
    throw ConfigError("select_frequencies: need at least ceil((n+m)/2) candidate frequencies");
  }
  if (!config.optimize_frequencies) {
    std::vector<double> chosen(candidates.begin(), candidates.begin() + static_cast<long>(J));
    MultiSine{chosen, amplitudes}.validate();
    return chosen;
  }
  std::vector<double> best;
  double best_sigma = -1.0;
  std::vector<std::size_t> current;
  for_each_subset(candidates.size(), J, current, 0, [&](const std::vector<std::size_t>& idx) {
    MultiSine ms;
    for (std::size_t i : idx) ms.frequencies.push_back(candidates[i]);
    ms.amplitudes = amplitudes;
    try {
      ms.validate();
      const double s = information_matrix(model, ms).sigma_min;
      if (s > best_sigma) {
        best_sigma = s;
        best = ms.frequencies;
      }
    } catch (const NumericalError&) {
    } catch (const ConfigError&) {
    }
  });
  if (best.empty()) throw ConfigError("select_frequencies: no admissible frequency set");
  return best;
}

EpochDoublingResult run_epoch_doubling(const EpochConfig& config, const LinearSystem& truth,
                                const UnmodeledMap& map, const CostMatrices& costs,
                                const InitialController& init, double J_star, const RngSpec& rng,
                                Index num_epochs, const RealVector& x0) {
  truth.validate();
  const Index n = truth.state_dim(), m = truth.input_dim();
  costs.validate(n, m);
  if (config.T0 < 1) throw ConfigError("run_epoch_doubling: T0 must be >= 1");
  if (num_epochs < 0) throw ConfigError("run_epoch_doubling: num_epochs must be >= 0");
  if (!(config.amplitude_fraction >= 0.5 && config.amplitude_fraction <= 1.0)) {
    throw ConfigError("run_epoch_doubling: amplitude_fraction must be in [0.5, 1]");
  }
  if (m != 1) throw DimensionMismatch("run_epoch_doubling: scalar input required");

  EpochDoublingResult result;
  if (num_epochs == 0) {
    result.trajectory = Trajectory{RealMatrix::Zero(n, 0), RealMatrix::Zero(m, 0),
                                   RealMatrix::Zero(n, 0), RealMatrix::Zero(n, 0)};
    result.regret.J_star = J_star;
    return result;
  }

  Simulator sim(truth, map, rng.derive(0), x0);
  GaussianStream exploration(rng.derive(1));
  RealMatrix K = init.K;
  LinearSystem model{init.A_hat, truth.B, truth.sigma};
  const std::size_t J = static_cast<std::size_t>(n + m + 1) / 2;

  Index k = 0;
  for (Index i = 0; i < num_epochs; ++i) {
    if (config.horizon > 0 && k >= config.horizon) break;
    EpochState epoch;
    epoch.epoch_index = i;
    epoch.start = k;
    epoch.epoch_length = config.T0 << i;
    epoch.amplitude_cap =
        config.amplitude_scale * std::pow(static_cast<double>(epoch.epoch_length),
                                          config.amplitude_exponent);
    epoch.amplitudes.resize(J);
    for (double& a : epoch.amplitudes) {
      a = config.randomize_amplitudes
              ? epoch.amplitude_cap * (0.5 + 0.5 * exploration.uniform())
              : config.amplitude_fraction * epoch.amplitude_cap;
    }
    epoch.frequencies = select_frequencies(config, model, epoch.epoch_length, epoch.amplitudes);
    epoch.K = K;

    const MultiSine probe{epoch.frequencies, epoch.amplitudes};
    double gaussian_std = 0.0;
    for (double a : epoch.amplitudes) gaussian_std += a * a / 2.0;
    gaussian_std = std::sqrt(gaussian_std);

    Index end = epoch.start + epoch.epoch_length;
    if (config.horizon > 0) end = std::min(end, config.horizon);
    for (; k < end; ++k) {
      const double excite = config.exploration == ExplorationKind::MultiSine
                              ? probe.sample(k)
                              : gaussian_std * exploration.next();
      RealVector u = K * sim.state();
      u.array() += excite;
      sim.step(u);
    }
    epoch.steps = end - epoch.start;

    const Trajectory segment = sim.trajectory().slice(epoch.start, end);
    try {
      const EstimationResult est = least_squares(segment);
      epoch.A_hat = est.A_hat;
      epoch.B_hat = est.B_hat;
      epoch.err_A = operator_norm(est.A_hat - truth.A);
      epoch.err_B = operator_norm(est.B_hat - truth.B);
      const LqrSolution sol = solve_dare(est.A_hat, est.B_hat, costs);
      K = sol.K;
      model = LinearSystem{est.A_hat, est.B_hat, truth.sigma};
      epoch.riccati_residual = sol.riccati_residual;
      epoch.closed_loop_radius = spectral_radius(truth.A + truth.B * K);
      epoch.controller_updated = true;
    } catch (const RankDeficient& e) {
      epoch.note = e.what();
    } catch (const NotStabilizable& e) {
      epoch.note = e.what();
    }
    result.epochs.push_back(std::move(epoch));
  }

  result.trajectory = sim.trajectory();
  result.regret = regret(result.trajectory, costs, J_star);
  return result;
}

double empirical_baseline(const LinearSystem& truth, const UnmodeledMap& map,
                          const CostMatrices& costs, const RealMatrix& K, const RngSpec& rng,
                          Index T, const RealVector& x0) {
  const Trajectory traj = simulate(truth, map, state_feedback(K, nullptr), T, rng.derive(0), x0);
  const RegretRecord record = regret(traj, costs, 0.0);
  return record.regret.back() / static_cast<double>(T);
}

}  // namespace speclines
