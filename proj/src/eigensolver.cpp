#include "qreduce/eigensolver.hpp"

#include <Eigen/SparseCholesky>

#include <random>

namespace qreduce {

namespace {

double max_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& values,
                    const Eigen::MatrixXd& vectors) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    worst = std::max(worst, (a * vectors.col(k) - values[k] * vectors.col(k)).norm());
  }
  return worst;
}

double infinity_norm(const Eigen::SparseMatrix<double>& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      rows[it.row()] += std::abs(it.value());
    }
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

}  // namespace

Spectrum eigensolve_dense(const Eigen::MatrixXd& a, int count) {
  if (count < 1 || count > a.rows()) {
    throw UsageError("eigensolve: requested " + std::to_string(count) + " eigenvalues of an order-" +
                     std::to_string(a.rows()) + " operator");
  }
  const auto dec = jacobi_eigen(a);
  Spectrum out;
  out.values = dec.values.head(count);
  out.vectors = dec.vectors.leftCols(count);
  out.iterations = dec.sweeps;
  out.operator_norm = a.norm();
  out.residual = max_residual(a, out.values, out.vectors);
  return out;
}

Spectrum eigensolve_sparse_lowest(const Eigen::SparseMatrix<double>& a, int count, double shift,
                                  int max_iterations) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw SolverError("eigensolve_sparse_lowest: matrix is not square");
  if (count < 1 || count > n) throw UsageError("eigensolve_sparse_lowest: bad eigenvalue count");
  const Eigen::Index block = std::min<Eigen::Index>(n, count + std::max(8, count));
  const double norm = infinity_norm(a);

  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  for (int attempt = 0;; ++attempt) {
    ldlt.compute(a - shift * identity);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) break;
    if (attempt == 30) throw SolverError("eigensolve_sparse_lowest: could not place shift below the spectrum");
    shift -= std::max(1.0, 0.1 * std::abs(shift)) * double(1 << std::min(attempt, 20));
  }

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = uniform(rng);
  x = orthonormalize(x);

  Spectrum out;
  out.operator_norm = norm;
  Eigen::VectorXd previous = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::infinity());
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const Eigen::MatrixXd q = orthonormalize(ldlt.solve(x));
    const Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd projected = q.transpose() * aq;
    projected = 0.5 * (projected + projected.transpose()).eval();
    const auto ritz = jacobi_eigen(projected);
    x = q * ritz.vectors;
    const Eigen::MatrixXd ax = aq * ritz.vectors;

    const Eigen::VectorXd values = ritz.values.head(count);
    double residual = 0.0;
    for (int k = 0; k < count; ++k) {
      residual = std::max(residual, (ax.col(k) - values[k] * x.col(k)).norm());
    }
    // relative drift with an eps * ||A|| floor
    const double drift = ((values - previous).array().abs() -
                          (1e-13 * values.array().abs() + 1e-15 * norm)).maxCoeff();
    previous = values;
    if (drift <= 0.0 && residual <= 1e-9 * norm) {
      out.values = values;
      out.vectors = x.leftCols(count);
      out.residual = residual;
      out.iterations = iter;
      return out;
    }
  }
  throw SolverError("eigensolve_sparse_lowest: no convergence after " +
                    std::to_string(max_iterations) + " iterations");
}

}  // namespace qreduce
