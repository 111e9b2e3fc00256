#pragma once

#include <Eigen/Dense>
#include <Eigen/Jacobi>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qreduce/error.hpp"

namespace qreduce {

template <typename Scalar>
struct JacobiDecomposition {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;                // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns match values
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a dense symmetric matrix. Sweeps over every
/// (p, q) pair in row order, annihilating a_pq with a plane rotation, until
/// the off-diagonal Frobenius norm drops below tol * ||A||_F. Only the upper
/// triangle's symmetry is assumed; the input is not checked beyond size.
template <typename Derived>
JacobiDecomposition<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                           double tol = 1e-12,
                                                           int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (input.rows() != input.cols()) throw SolverError("jacobi_eigen: matrix is not square");

  Matrix a = input;
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  const Scalar norm = a.norm();

  auto off_norm = [&] {
    Scalar sum(0);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) sum += a(i, j) * a(i, j);
    using std::sqrt;
    return sqrt(Scalar(2) * sum);
  };

  JacobiDecomposition<Scalar> out;
  bool converged = n <= 1 || norm == Scalar(0);
  while (!converged) {
    if (off_norm() <= Scalar(tol) * norm) {
      converged = true;
      break;
    }
    if (out.sweeps == max_sweeps) break;
    ++out.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        v.applyOnTheRight(p, q, rot);
        a(p, q) = a(q, p) = Scalar(0);
      }
    }
  }
  if (!converged) {
    throw SolverError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
                      " sweeps (off-diagonal " + std::to_string(double(off_norm())) +
                      ", ||A|| " + std::to_string(double(norm)) + ")");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Lowest eigenpairs of a symmetric operator.
struct Spectrum {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // may be empty
  std::vector<int> degeneracy;
  /// max_i ||A v_i - lambda_i v_i|| over the reported pairs, and the norm it
  /// is measured against.
  double residual = 0.0;
  double operator_norm = 0.0;
  int iterations = 0;
};

/// Lowest `count` eigenpairs by cyclic Jacobi on the full matrix.
Spectrum eigensolve_dense(const Eigen::MatrixXd& a, int count);

/// Lowest `count` eigenpairs of a sparse symmetric matrix by shift-and-invert
/// subspace iteration with Rayleigh-Ritz (the small projected problems go
/// through jacobi_eigen). `shift` must lie below the spectrum; when the
/// factorization of A - shift I turns out indefinite the shift is lowered and
/// the solve restarted. Starting block is seeded deterministically.
Spectrum eigensolve_sparse_lowest(const Eigen::SparseMatrix<double>& a, int count, double shift,
                                  int max_iterations = 1000);

}  // namespace qreduce
