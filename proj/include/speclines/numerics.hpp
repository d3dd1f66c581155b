#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "speclines/errors.hpp"

namespace speclines {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Solves M X = rhs by LU with partial pivoting.
/// Throws SingularMatrix when a pivot falls below 1e-14 * ||M||.
ComplexMatrix complex_solve(const ComplexMatrix& M, const ComplexMatrix& rhs);

/// Smallest singular value (over min(rows, cols) values). Zero for rank
/// deficient input; the empty matrix is rejected.
template <typename Derived>
double sigma_min(const Eigen::MatrixBase<Derived>& M) {
  if (M.rows() == 0 || M.cols() == 0) {
    throw DimensionMismatch("sigma_min: empty matrix");
  }
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(M.eval());
  const auto& s = svd.singularValues();
  return static_cast<double>(s(s.size() - 1));
}

template <typename Derived>
double sigma_max(const Eigen::MatrixBase<Derived>& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(M.eval());
  return static_cast<double>(svd.singularValues()(0));
}

/// Operator (spectral) norm.
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& M) {
  return sigma_max(M);
}

/// Eigenvalues of a real square matrix (Hessenberg reduction + shifted QR).
ComplexVector eigenvalues(const RealMatrix& A);

/// max |lambda_i(A)|. Throws NonConvergence if the QR iteration fails.
double spectral_radius(const RealMatrix& A);

/// Unnormalized DFT of the columns of `sequence` (one column per time step)
/// at grid frequency index/T: sum_k y_k exp(-j 2 pi k index / T).
ComplexVector dft(const RealMatrix& sequence, Index frequency_index);

/// Full unnormalized DFT: column k holds the transform at frequency k/T.
/// Uses a radix-2 FFT when T is a power of two, the direct sum otherwise.
ComplexMatrix dft_all(const RealMatrix& sequence);

/// Direct O(T^2) transform, kept separately so the fast path can be checked.
ComplexMatrix dft_all_direct(const RealMatrix& sequence);

/// Pearson correlation between y[0..N-lag) and y[lag..N).
/// Throws DegenerateSequence when either segment has zero variance.
double lag_autocorrelation(std::span<const double> sequence, std::size_t lag);

/// Gramian of A: sum_{i=0}^{k} A^i (A^i)^T.
template <typename Derived>
auto gramian(const Eigen::MatrixBase<Derived>& A, Index k) {
  using Plain = typename Derived::PlainObject;
  if (A.rows() != A.cols()) throw DimensionMismatch("gramian: A must be square");
  Plain power = Plain::Identity(A.rows(), A.cols());
  Plain sum = Plain::Zero(A.rows(), A.cols());
  for (Index i = 0; i <= k; ++i) {
    sum.noalias() += power * power.transpose();
    power = (power * A).eval();
  }
  return sum;
}

/// Controllability Gramian of (A, B): sum_{i=0}^{k} A^i B B^T (A^i)^T.
template <typename DerivedA, typename DerivedB>
auto controllability_gramian(const Eigen::MatrixBase<DerivedA>& A,
                             const Eigen::MatrixBase<DerivedB>& B, Index k) {
  using Plain = typename DerivedA::PlainObject;
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw DimensionMismatch("controllability_gramian: inconsistent dimensions");
  }
  Plain sum = Plain::Zero(A.rows(), A.rows());
  typename DerivedB::PlainObject column_block = B;
  for (Index i = 0; i <= k; ++i) {
    sum.noalias() += column_block * column_block.transpose();
    column_block = (A * column_block).eval();
  }
  return sum;
}

}  // namespace speclines
