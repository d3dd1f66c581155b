#include "speclines/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace speclines {

ComplexMatrix complex_solve(const ComplexMatrix& M, const ComplexMatrix& rhs) {
  if (M.rows() != M.cols()) throw DimensionMismatch("complex_solve: M must be square");
  if (rhs.rows() != M.rows()) throw DimensionMismatch("complex_solve: rhs rows != M rows");
  if (M.rows() == 0) return ComplexMatrix(0, rhs.cols());

  const double scale = operator_norm(M);
  Eigen::PartialPivLU<ComplexMatrix> lu(M);
  const auto& packed = lu.matrixLU();
  for (Index i = 0; i < packed.rows(); ++i) {
    if (!(std::abs(packed(i, i)) >= 1e-14 * scale) || scale == 0.0) {
      throw SingularMatrix("complex_solve: pivot below 1e-14 * ||M||");
    }
  }
  return lu.solve(rhs);
}

ComplexVector eigenvalues(const RealMatrix& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("eigenvalues: A must be square");
  if (A.rows() == 0) return ComplexVector(0);
  Eigen::EigenSolver<RealMatrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NonConvergence("eigenvalues: QR iteration did not converge");
  }
  return solver.eigenvalues();
}

double spectral_radius(const RealMatrix& A) {
  const ComplexVector lambda = eigenvalues(A);
  double radius = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) radius = std::max(radius, std::abs(lambda(i)));
  return radius;
}

ComplexVector dft(const RealMatrix& sequence, Index frequency_index) {
  const Index T = sequence.cols();
  if (T < 1) throw DimensionMismatch("dft: empty sequence");
  if (frequency_index < 0 || frequency_index >= T) {
    throw FrequencyOffGrid("dft: frequency index outside [0, T)");
  }
  ComplexVector out = ComplexVector::Zero(sequence.rows());
  for (Index k = 0; k < T; ++k) {
    // k * index mod T keeps the phase argument small for long sequences.
    const Index r = (k * frequency_index) % T;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(T);
    out += sequence.col(k).cast<Complex>() * std::polar(1.0, angle);
  }
  return out;
}

ComplexMatrix dft_all_direct(const RealMatrix& sequence) {
  const Index T = sequence.cols();
  if (T < 1) throw DimensionMismatch("dft: empty sequence");
  std::vector<Complex> twiddle(static_cast<std::size_t>(T));
  for (Index r = 0; r < T; ++r) {
    twiddle[r] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(T));
  }
  ComplexMatrix out = ComplexMatrix::Zero(sequence.rows(), T);
  for (Index f = 0; f < T; ++f) {
    for (Index k = 0; k < T; ++k) {
      const Complex w = twiddle[(k * f) % T];
      for (Index d = 0; d < sequence.rows(); ++d) out(d, f) += sequence(d, k) * w;
    }
  }
  return out;
}

namespace {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative Cooley-Tukey on one row.
void fft_radix2(std::vector<Complex>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Complex w = std::polar(1.0, angle * static_cast<double>(j));
        const Complex u = a[i + j];
        const Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

}  // namespace

ComplexMatrix dft_all(const RealMatrix& sequence) {
  const Index T = sequence.cols();
  if (!is_power_of_two(T)) return dft_all_direct(sequence);
  ComplexMatrix out(sequence.rows(), T);
  std::vector<Complex> row(static_cast<std::size_t>(T));
  for (Index d = 0; d < sequence.rows(); ++d) {
    for (Index k = 0; k < T; ++k) row[k] = sequence(d, k);
    fft_radix2(row);
    for (Index k = 0; k < T; ++k) out(d, k) = row[k];
  }
  return out;
}

double lag_autocorrelation(std::span<const double> sequence, std::size_t lag) {
  if (sequence.size() <= lag + 1) {
    throw DimensionMismatch("lag_autocorrelation: sequence length must exceed lag + 1");
  }
  const std::size_t n = sequence.size() - lag;
  const auto head = sequence.subspan(0, n);
  const auto tail = sequence.subspan(lag, n);
  double mean_head = 0.0, mean_tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_head += head[i];
    mean_tail += tail[i];
  }
  mean_head /= static_cast<double>(n);
  mean_tail /= static_cast<double>(n);
  double cross = 0.0, var_head = 0.0, var_tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = head[i] - mean_head;
    const double b = tail[i] - mean_tail;
    cross += a * b;
    var_head += a * a;
    var_tail += b * b;
  }
  if (var_head <= 0.0 || var_tail <= 0.0) {
    throw DegenerateSequence("lag_autocorrelation: zero sample variance");
  }
  return std::clamp(cross / std::sqrt(var_head * var_tail), -1.0, 1.0);
}

}  // namespace speclines
