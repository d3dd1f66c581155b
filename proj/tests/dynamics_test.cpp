#include "speclines/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

namespace speclines {
namespace {

LinearSystem scalar(double a, double b, double sigma = 0.0) {
  return {RealMatrix::Constant(1, 1, a), RealMatrix::Constant(1, 1, b), sigma};
}

RealMatrix constant_input(double value, Index T) { return RealMatrix::Constant(1, T, value); }

TEST(CompanionSystem, Structure) {
  const std::vector<double> a{0.048, -0.44, 1.2};
  const LinearSystem sys = companion_system(a, 0.1);
  RealMatrix expected(3, 3);
  expected << 0, 1, 0, 0, 0, 1, 0.048, -0.44, 1.2;
  EXPECT_EQ(sys.A, expected);
  EXPECT_EQ(sys.B, (RealMatrix(3, 1) << 0, 0, 1).finished());
  EXPECT_EQ(sys.sigma, 0.1);
  EXPECT_NEAR(spectral_radius(sys.A), 0.6, 1e-10);
}

TEST(CompanionSystem, FiveStates) {
  const std::vector<double> a{1.05, -5.20, 10.3, -10.2, 5.05};
  const LinearSystem sys = companion_system(a, 0.0);
  EXPECT_EQ(sys.A.rows(), 5);
  EXPECT_EQ(sys.input_dim(), 1);
  EXPECT_NEAR(spectral_radius(sys.A), 1.05, 1e-8);
}

TEST(CompanionSystem, Scalar) {
  const std::vector<double> a{0.0};
  const LinearSystem sys = companion_system(a, 0.0);
  EXPECT_EQ(sys.A(0, 0), 0.0);
  EXPECT_EQ(sys.B(0, 0), 1.0);
  EXPECT_THROW(companion_system(std::vector<double>{}, 0.0), ConfigError);
}

TEST(LinearSystem, Validate) {
  LinearSystem bad{RealMatrix::Zero(2, 3), RealMatrix::Zero(2, 1), 0.0};
  EXPECT_THROW(bad.validate(), DimensionMismatch);
  EXPECT_THROW(scalar(0.5, 1.0, -1.0).validate(), ConfigError);
}

TEST(HighPassNonlinearity, ZeroDcGainWithBetaOne) {
  HighPassNonlinearity map(0.5, 1.0, 1.0, 1);
  double last = 1.0;
  for (int k = 0; k < 200; ++k) last = map.step(1.0)(0);
  EXPECT_NEAR(last, 0.0, 1e-12);
  EXPECT_EQ(map.dc_gain(), 0.0);
}

TEST(HighPassNonlinearity, RecursionByHand) {
  HighPassNonlinearity map(0.1, 0.9, 2.0, 2);
  // wbar_0 = 0.1 * 1 = 0.1; wbar_1 = 0.1 * 0.1 + 0.1 * (3 - 0.9) = 0.22
  EXPECT_NEAR(map.step(1.0)(0), 2.0 * 0.01, 1e-15);
  const RealVector w = map.step(3.0);
  EXPECT_NEAR(map.filter_state(), 0.22, 1e-15);
  EXPECT_NEAR(w(0), 2.0 * 0.22 * 0.22, 1e-15);
  EXPECT_NEAR(w(1), w(0), 0.0);
}

TEST(HighPassNonlinearity, DcGain) {
  HighPassNonlinearity map(0.1, 0.9, 1.0, 1);
  EXPECT_NEAR(map.dc_gain(), 0.1 * 0.1 / 0.9, 1e-15);
  EXPECT_NEAR(std::abs(hp_frequency_response(map, 0.0)), 0.011111111111111112, 1e-12);
  EXPECT_NEAR(std::abs(hp_frequency_response(map, 0.5)), 0.1 * 1.9 / 1.1, 1e-12);
  // The filter state settles at the DC gain for a constant input.
  for (int k = 0; k < 100; ++k) map.step(1.0);
  EXPECT_NEAR(map.filter_state(), map.dc_gain(), 1e-12);
}

TEST(HighPassNonlinearity, ZeroAtDcWhenBetaOne) {
  HighPassNonlinearity map(0.3, 1.0, 1.0, 1);
  EXPECT_NEAR(std::abs(hp_frequency_response(map, 0.0)), 0.0, 1e-15);
  EXPECT_THROW(hp_frequency_response(map, 0.6), ConfigError);
  EXPECT_THROW(hp_frequency_response(map, -0.1), ConfigError);
}

TEST(HighPassNonlinearity, GainZero) {
  HighPassNonlinearity map(0.1, 0.9, 0.0, 3);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(map.step(std::sin(k)).norm(), 0.0);
}

TEST(HighPassNonlinearity, RejectsUnstableFilter) {
  EXPECT_THROW(HighPassNonlinearity(1.0, 0.5, 1.0, 1), ConfigError);
}

TEST(LinearFilterMap, HighPassMatchesSquareMapFilter) {
  LinearFilterMap linear = LinearFilterMap::high_pass(0.1, 0.9, 1.0, 1);
  HighPassNonlinearity square(0.1, 0.9, 1.0, 1);
  for (int k = 0; k < 50; ++k) {
    const double u = std::cos(0.3 * k) + 0.1 * k;
    const double w = linear.step(u)(0);
    square.step(u);
    EXPECT_NEAR(w, square.filter_state(), 1e-14);
  }
  for (double f : {0.0, 0.01, 0.2, 0.5}) {
    EXPECT_NEAR(std::abs(linear.frequency_response(f) - square.frequency_response(f)), 0.0, 1e-14);
  }
}

TEST(Simulate, ZeroEverything) {
  const LinearSystem sys = companion_system(std::vector<double>{0.048, -0.44, 1.2}, 0.0);
  const Trajectory traj =
      simulate(sys, UnmodeledMap::none(), open_loop(constant_input(0.0, 20)), 20, RngSpec{1, 0});
  EXPECT_EQ(traj.states.norm(), 0.0);
  EXPECT_EQ(traj.horizon(), 20);
  EXPECT_EQ(traj.states.cols(), 21);
}

TEST(Simulate, ScalarAffineRecursion) {
  const Trajectory traj = simulate(scalar(0.5, 1.0), UnmodeledMap::none(),
                                   open_loop(constant_input(1.0, 60)), 60, RngSpec{1, 0});
  EXPECT_EQ(traj.states(0, 1), 1.0);
  EXPECT_EQ(traj.states(0, 2), 1.5);
  EXPECT_EQ(traj.states(0, 3), 1.75);
  EXPECT_NEAR(traj.states(0, 60), 2.0, 1e-12);
}

TEST(Simulate, DeterministicGivenSpec) {
  const LinearSystem sys = companion_system(std::vector<double>{0.048, -0.44, 1.2}, 0.3);
  HighPassNonlinearity map(0.1, 0.9, 4.0, 3);
  const RealMatrix u = RealMatrix::Random(1, 100);
  const Trajectory a = simulate(sys, map, open_loop(u), 100, RngSpec{5, 2});
  const Trajectory b = simulate(sys, map, open_loop(u), 100, RngSpec{5, 2});
  const Trajectory c = simulate(sys, map, open_loop(u), 100, RngSpec{5, 3});
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.noises, b.noises);
  EXPECT_NE(a.noises, c.noises);
}

TEST(Simulate, ReplayInvariant) {
  const LinearSystem sys = companion_system(std::vector<double>{0.048, -0.44, 1.2}, 0.5);
  HighPassNonlinearity map(0.1, 0.9, 4.0, 3);
  RealMatrix K(1, 3);
  K << -0.01, 0.1, -0.5;
  const Trajectory traj =
      simulate(sys, map, state_feedback(K, [](Index k) { return std::cos(0.2 * k); }), 300,
               RngSpec{9, 0});
  EXPECT_LE(replay_residual(sys, traj), 1e-10);
  const Trajectory part = traj.slice(100, 150);
  EXPECT_EQ(part.horizon(), 50);
  EXPECT_LE(replay_residual(sys, part), 1e-10);
  EXPECT_EQ(part.states.col(0), traj.states.col(100));
}

TEST(Simulate, GeometricBound) {
  const LinearSystem sys = companion_system(std::vector<double>{0.048, -0.44, 1.2}, 0.0);
  const double u_max = 2.0;
  RealVector x0(3);
  x0 << 1.0, -2.0, 0.5;
  const Index T = 400;
  RealMatrix u(1, T);
  for (Index k = 0; k < T; ++k) u(0, k) = u_max * std::sin(0.7 * static_cast<double>(k));
  const Trajectory traj = simulate(sys, UnmodeledMap::none(), open_loop(u), T, RngSpec{}, x0);
  // |x_k| <= |A^k| |x0| + u_max sum_i |A^i B|.
  RealMatrix power = RealMatrix::Identity(3, 3);
  double input_sum = 0.0;
  for (Index k = 0; k <= T; ++k) {
    const double bound = operator_norm(power) * x0.norm() + u_max * input_sum;
    ASSERT_LE(traj.states.col(k).norm(), bound * (1 + 1e-12) + 1e-12) << "k = " << k;
    input_sum += operator_norm(power * sys.B);
    power = power * sys.A;
  }
}

TEST(Simulate, SuperpositionWithoutUnmodeled) {
  const LinearSystem sys = companion_system(std::vector<double>{0.048, -0.44, 1.2}, 0.0);
  const RealMatrix u1 = RealMatrix::Random(1, 200), u2 = RealMatrix::Random(1, 200);
  const auto run = [&](const RealMatrix& u) {
    return simulate(sys, UnmodeledMap::none(), open_loop(u), 200, RngSpec{}).states;
  };
  EXPECT_LE((run(u1 + u2) - run(u1) - run(u2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Simulate, SquareMapQuadruplesUnderDoubledInput) {
  const LinearSystem sys = companion_system(std::vector<double>{0.048, -0.44, 1.2}, 0.0);
  HighPassNonlinearity map(0.1, 0.9, 4.0, 3);
  const RealMatrix u = RealMatrix::Random(1, 200);
  const Trajectory single = simulate(sys, map, open_loop(u), 200, RngSpec{});
  const Trajectory doubled = simulate(sys, map, open_loop(2.0 * u), 200, RngSpec{});
  EXPECT_LE((doubled.unmodeled - 4.0 * single.unmodeled).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Simulate, BlowupGuard) {
  EXPECT_THROW(simulate(scalar(2.0, 1.0), UnmodeledMap::none(), open_loop(constant_input(1.0, 100)),
                        100, RngSpec{}),
               StateBlowup);
  SimulationOptions tight{10.0};
  EXPECT_THROW(simulate(scalar(0.5, 1.0), UnmodeledMap::none(),
                        open_loop(constant_input(100.0, 5)), 5, RngSpec{}, {}, tight),
               StateBlowup);
}

TEST(Simulate, NoiseScale) {
  const Trajectory traj = simulate(scalar(0.0, 0.0, 0.25), UnmodeledMap::none(),
                                   open_loop(constant_input(0.0, 20000)), 20000, RngSpec{3, 0});
  const double var = traj.noises.squaredNorm() / 20000.0;
  EXPECT_NEAR(var, 0.0625, 0.0625 * 0.05);
}

TEST(Trajectory, CsvLayout) {
  const Trajectory traj = simulate(scalar(0.5, 1.0), HighPassNonlinearity(0.5, 0.0, 1.0, 1),
                                   open_loop(constant_input(1.0, 3)), 3, RngSpec{});
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,x_1,u_1,w_1");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_NE(text.find("\n3,"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 3), ",,\n");
}

TEST(Trajectory, Regressors) {
  const Trajectory traj = simulate(scalar(0.5, 1.0), UnmodeledMap::none(),
                                   open_loop(constant_input(1.0, 4)), 4, RngSpec{});
  const RealMatrix phi = traj.regressors();
  EXPECT_EQ(phi.rows(), 2);
  EXPECT_EQ(phi.cols(), 4);
  EXPECT_EQ(phi.col(2), traj.regressor(2));
  EXPECT_EQ(phi(0, 2), 1.5);
  EXPECT_EQ(phi(1, 2), 1.0);
}

}  // namespace
}  // namespace speclines
