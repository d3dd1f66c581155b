#include "speclines/numerics.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "speclines/dynamics.hpp"
#include "speclines/random.hpp"

namespace speclines {
namespace {

ComplexMatrix random_complex(GaussianStream& g, Index rows, Index cols) {
  ComplexMatrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = Complex(g.next(), g.next());
  return M;
}

// |M^{-1}| by power iteration on M^{-H} M^{-1}, using only solves.
double inverse_norm_by_power_iteration(const ComplexMatrix& M) {
  const ComplexMatrix Mh = M.adjoint();
  ComplexVector v = ComplexVector::Ones(M.rows()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const ComplexVector w = complex_solve(Mh, complex_solve(M, v));
    const double next = std::sqrt(w.norm());
    v = w.normalized();
    if (std::abs(next - estimate) < 1e-15 * next) return next;
    estimate = next;
  }
  return estimate;
}

// lambda^n - sum_j a_{j+1} lambda^j for the companion bottom row a.
Complex characteristic(const std::vector<double>& a, Complex lambda) {
  Complex p = std::pow(lambda, static_cast<int>(a.size()));
  for (std::size_t j = 0; j < a.size(); ++j) p -= a[j] * std::pow(lambda, static_cast<int>(j));
  return p;
}

TEST(ComplexSolve, Identity) {
  const ComplexMatrix rhs = (ComplexMatrix(2, 1) << 3.0, 4.0).finished();
  const ComplexMatrix x = complex_solve(ComplexMatrix::Identity(2, 2), rhs);
  EXPECT_EQ(x(0, 0), Complex(3.0));
  EXPECT_EQ(x(1, 0), Complex(4.0));
}

TEST(ComplexSolve, ScalarReciprocal) {
  const ComplexMatrix M = ComplexMatrix::Constant(1, 1, std::polar(1.0, 0.0) - 0.5);
  EXPECT_NEAR(std::abs(complex_solve(M, ComplexMatrix::Ones(1, 1))(0, 0) - 2.0), 0.0, 1e-15);
}

TEST(ComplexSolve, ZeroMatrixIsSingular) {
  EXPECT_THROW(complex_solve(ComplexMatrix::Zero(2, 2), ComplexMatrix::Ones(2, 1)), SingularMatrix);
}

TEST(ComplexSolve, RankOneIsSingular) {
  ComplexMatrix M(2, 2);
  M << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(complex_solve(M, ComplexMatrix::Ones(2, 1)), SingularMatrix);
}

TEST(ComplexSolve, ResidualOnRandomWellConditioned) {
  GaussianStream g(RngSpec{11, 0});
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + trial % 8;
    ComplexMatrix M = random_complex(g, n, n);
    M.diagonal().array() += Complex(2.0 * static_cast<double>(n));
    const ComplexMatrix rhs = random_complex(g, n, 1 + trial % 3);
    const ComplexMatrix X = complex_solve(M, rhs);
    const double tol = 1e-10 * std::max(1.0, operator_norm(rhs));
    ASSERT_LE(operator_norm(M * X - rhs), tol) << "trial " << trial;
  }
}

TEST(SigmaMin, Examples) {
  EXPECT_NEAR(sigma_min(RealMatrix::Identity(3, 3)), 1.0, 1e-14);
  RealMatrix orth(2, 2);
  orth << 1, -1, 1, 1;
  EXPECT_NEAR(sigma_min(orth), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(sigma_min(RealMatrix::Ones(2, 2)), 0.0, 1e-14);
  EXPECT_THROW(sigma_min(RealMatrix(0, 0)), DimensionMismatch);
}

TEST(SigmaMin, InverseNormDuality) {
  GaussianStream g(RngSpec{12, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 7;
    ComplexMatrix M = random_complex(g, n, n);
    M.diagonal().array() += Complex(1.0);
    const double expected = 1.0 / inverse_norm_by_power_iteration(M);
    EXPECT_NEAR(sigma_min(M), expected, 1e-8 * std::max(1.0, expected)) << "trial " << trial;
  }
}

TEST(SpectralRadius, ZeroMatrix) { EXPECT_EQ(spectral_radius(RealMatrix::Zero(4, 4)), 0.0); }

TEST(SpectralRadius, StableCompanion) {
  const std::vector<double> a{0.048, -0.44, 1.2};
  const LinearSystem sys = companion_system(a, 0.0);
  EXPECT_NEAR(spectral_radius(sys.A), 0.6, 1e-10);
  std::vector<double> moduli;
  for (const Complex& l : eigenvalues(sys.A)) moduli.push_back(std::abs(l));
  std::sort(moduli.begin(), moduli.end());
  EXPECT_NEAR(moduli[0], 0.2, 1e-10);
  EXPECT_NEAR(moduli[1], 0.4, 1e-10);
  EXPECT_NEAR(moduli[2], 0.6, 1e-10);
}

// The rounded coefficients factor as (lambda - 1.03)(lambda - 1)^2, so the
// largest root is 1.03 exactly.
TEST(SpectralRadius, RoundedThreeStateCompanion) {
  const std::vector<double> a{1.03, -3.06, 3.03};
  EXPECT_NEAR(std::abs(characteristic(a, 1.03)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(characteristic(a, 1.0)), 0.0, 1e-12);
  EXPECT_NEAR(spectral_radius(companion_system(a, 0.0).A), 1.03, 1e-8);
}

// (lambda - 1.05)(lambda - 1)^4.
TEST(SpectralRadius, RoundedFiveStateCompanion) {
  const std::vector<double> a{1.05, -5.20, 10.3, -10.2, 5.05};
  EXPECT_NEAR(std::abs(characteristic(a, 1.05)), 0.0, 1e-12);
  EXPECT_NEAR(spectral_radius(companion_system(a, 0.0).A), 1.05, 1e-8);
}

TEST(SpectralRadius, MatchesPolynomialRoots) {
  GaussianStream g(RngSpec{13, 0});
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(1 + trial % 8);
    std::vector<double> a(n);
    for (double& v : a) v = 0.5 * g.next();
    const RealMatrix A = companion_system(a, 0.0).A;
    const ComplexVector eig = eigenvalues(A);
    double radius = 0.0;
    for (const Complex& l : eig) {
      // Relative polynomial residual at each returned eigenvalue.
      double scale = std::pow(std::abs(l), static_cast<double>(n));
      for (std::size_t j = 0; j < n; ++j) scale += std::abs(a[j]) * std::pow(std::abs(l), double(j));
      EXPECT_LE(std::abs(characteristic(a, l)), 1e-10 * std::max(1.0, scale));
      radius = std::max(radius, std::abs(l));
    }
    EXPECT_NEAR(spectral_radius(A), radius, 1e-8);
  }
}

TEST(Dft, Examples) {
  const RealMatrix ones = RealMatrix::Ones(1, 8);
  EXPECT_NEAR(std::abs(dft(ones, 0)(0) - 8.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(dft(ones, 1)(0)), 0.0, 1e-12);
  RealMatrix impulse = RealMatrix::Zero(1, 4);
  impulse(0, 0) = 1.0;
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(dft(impulse, k)(0) - 1.0), 0.0, 1e-15);
}

TEST(Dft, OffGrid) {
  EXPECT_THROW(dft(RealMatrix::Ones(1, 8), 8), FrequencyOffGrid);
  EXPECT_THROW(dft(RealMatrix::Ones(1, 8), -1), FrequencyOffGrid);
}

TEST(Dft, Parseval) {
  GaussianStream g(RngSpec{14, 0});
  for (Index T : {1, 7, 64, 100, 256}) {
    RealMatrix y(3, T);
    for (Index k = 0; k < T; ++k) y.col(k) = g.vector(3);
    const ComplexMatrix Y = dft_all(y);
    const double time = y.squaredNorm();
    const double freq = Y.squaredNorm() / static_cast<double>(T);
    EXPECT_NEAR(time, freq, 1e-8 * time) << "T = " << T;
  }
}

TEST(Dft, FastPathMatchesDirect) {
  GaussianStream g(RngSpec{15, 0});
  RealMatrix y(2, 512);
  for (Index k = 0; k < y.cols(); ++k) y.col(k) = g.vector(2);
  const ComplexMatrix fast = dft_all(y);
  const ComplexMatrix direct = dft_all_direct(y);
  EXPECT_LE((fast - direct).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((fast.col(37) - dft(y, 37)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GaussianStream, Deterministic) {
  GaussianStream a(RngSpec{7, 0}), b(RngSpec{7, 0});
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(GaussianStream, Moments) {
  GaussianStream g(RngSpec{7, 0});
  const int N = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < N; ++i) {
    const double v = g.next();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / N;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(sq / N - mean * mean, 1.0, 0.02);
}

TEST(GaussianStream, DistinctStreamsDecorrelated) {
  const int N = 10000;
  for (std::uint64_t s = 1; s < 6; ++s) {
    GaussianStream a(RngSpec{7, 0}), b(RngSpec{7, s});
    std::vector<double> x(N), y(N);
    for (int i = 0; i < N; ++i) {
      x[i] = a.next();
      y[i] = b.next();
    }
    double lag0 = 0.0, lag1 = 0.0;
    for (int i = 0; i + 1 < N; ++i) {
      lag0 += x[i] * y[i];
      lag1 += x[i] * y[i + 1];
    }
    EXPECT_LT(std::abs(lag0 / N), 0.05);
    EXPECT_LT(std::abs(lag1 / N), 0.05);
  }
  EXPECT_NE(RngSpec({7, 0}).derive(1), RngSpec({7, 0}).derive(2));
}

TEST(LagAutocorrelation, Examples) {
  std::vector<double> alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  EXPECT_NEAR(lag_autocorrelation(alt, 1), -1.0, 1e-12);
  EXPECT_NEAR(lag_autocorrelation(alt, 0), 1.0, 1e-12);

  GaussianStream g(RngSpec{16, 0});
  std::vector<double> white(10000);
  for (double& v : white) v = g.next();
  EXPECT_NEAR(lag_autocorrelation(white, 1), 0.0, 0.03);
  EXPECT_NEAR(lag_autocorrelation(white, 0), 1.0, 1e-12);
}

TEST(LagAutocorrelation, Errors) {
  EXPECT_THROW(lag_autocorrelation(std::vector<double>(10, 2.0), 1), DegenerateSequence);
  EXPECT_THROW(lag_autocorrelation(std::vector<double>{1.0, 2.0}, 1), DimensionMismatch);
}

TEST(Gramian, Examples) {
  EXPECT_TRUE(gramian(RealMatrix::Zero(3, 3), 5).isApprox(RealMatrix::Identity(3, 3)));
  const RealMatrix half = RealMatrix::Constant(1, 1, 0.5);
  EXPECT_NEAR(gramian(half, 1)(0, 0), 1.25, 1e-15);
  EXPECT_NEAR(gramian(half, 40)(0, 0), 4.0 / 3.0, 1e-6);
}

TEST(Gramian, Telescoping) {
  GaussianStream g(RngSpec{17, 0});
  RealMatrix A(4, 4);
  for (Index i = 0; i < 4; ++i) A.col(i) = 0.4 * g.vector(4);
  RealMatrix power = RealMatrix::Identity(4, 4);
  for (Index k = 1; k < 10; ++k) {
    power = power * A;
    const RealMatrix diff = gramian(A, k) - gramian(A, k - 1) - power * power.transpose();
    EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ControllabilityGramian, Examples) {
  EXPECT_TRUE(controllability_gramian(RealMatrix::Zero(2, 2), RealMatrix::Identity(2, 2), 4)
                  .isApprox(RealMatrix::Identity(2, 2)));
  const RealMatrix half = RealMatrix::Constant(1, 1, 0.5);
  EXPECT_NEAR(controllability_gramian(half, RealMatrix::Ones(1, 1), 1)(0, 0), 1.25, 1e-15);
  EXPECT_EQ(controllability_gramian(half, RealMatrix::Zero(1, 1), 3)(0, 0), 0.0);
}

}  // namespace
}  // namespace speclines
