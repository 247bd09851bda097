#include "ruinkit/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

#include "ruinkit/errors.hpp"

namespace ruinkit {

namespace {

// Relative pivot threshold under which an LU factorization is treated as singular.
constexpr double kSingularPivot = 1e-14;

bool is_singular(const Eigen::PartialPivLU<Matrix>& lu) {
  if (lu.rows() == 0) return false;
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double scale = std::max(1.0, lu.matrixLU().cwiseAbs().maxCoeff());
  return !(diag.minCoeff() > kSingularPivot * scale) || !diag.allFinite();
}

}  // namespace

Matrix expm(const Matrix& m) {
  if (m.size() == 0) return m;
  return m.exp();
}

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Resolvent::Resolvent(const Matrix& m) : lu_(m), lu_t_(m.transpose()) {
  if (m.rows() != m.cols()) throw DimensionMismatch("resolvent of a non-square matrix");
  if (is_singular(lu_)) throw SingularResolvent("matrix is numerically singular");
}

Matrix Resolvent::apply_right(const Matrix& b) const {
  return lu_t_.solve(b.transpose()).transpose();
}

Matrix Resolvent::apply_left(const Matrix& b) const { return lu_.solve(b); }

Matrix solve_right(const Matrix& b, const Matrix& m) { return Resolvent(m).apply_right(b); }

Matrix solve_left(const Matrix& m, const Matrix& b) { return Resolvent(m).apply_left(b); }

SchurFactor::SchurFactor(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("Schur form of a non-square matrix");
  if (m.rows() == 0) return;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m.cast<std::complex<double>>());
  if (schur.info() != Eigen::Success) throw NumericalFailure("complex Schur decomposition failed");
  q = schur.matrixU();
  t = schur.matrixT();
}

Matrix solve_sylvester(const SchurFactor& a, const SchurFactor& b, const Matrix& rhs) {
  const Eigen::Index n = a.t.rows();
  const Eigen::Index m = b.t.rows();
  if (rhs.rows() != n || rhs.cols() != m) throw DimensionMismatch("Sylvester right-hand side shape");
  if (n == 0 || m == 0) return Matrix::Zero(n, m);

  // T_a Y + Y T_b = Q_a^H rhs Q_b, solved one column of Y at a time.
  Eigen::MatrixXcd f = a.q.adjoint() * rhs.cast<std::complex<double>>() * b.q;
  Eigen::MatrixXcd y(n, m);
  const double scale = std::max({1.0, a.t.cwiseAbs().maxCoeff(), b.t.cwiseAbs().maxCoeff()});
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXcd col = f.col(j);
    if (j > 0) col -= y.leftCols(j) * b.t.col(j).head(j);
    Eigen::MatrixXcd coef = a.t;
    coef.diagonal().array() += b.t(j, j);
    if (coef.diagonal().cwiseAbs().minCoeff() <= 1e-13 * scale)
      throw SylvesterFailure("coefficient spectra overlap numerically");
    y.col(j) = coef.triangularView<Eigen::Upper>().solve(col);
  }
  return (a.q * y * b.q.adjoint()).real();
}

}  // namespace ruinkit
