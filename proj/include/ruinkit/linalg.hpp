#pragma once

#include <Eigen/Dense>

#include <complex>

namespace ruinkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Matrix exponential (scaling and squaring with a Pade approximant).
Matrix expm(const Matrix& m);

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column vector of ones.
inline Vector ones(Eigen::Index n) { return Vector::Ones(n); }

/// Returns b * m^{-1} without forming the inverse (solves m^T x^T = b^T).
/// Throws SingularResolvent when m is numerically singular.
Matrix solve_right(const Matrix& b, const Matrix& m);

/// Returns m^{-1} * b; throws SingularResolvent when m is numerically singular.
Matrix solve_left(const Matrix& m, const Matrix& b);

/// LU factorization of a square matrix reused across many right-hand sides.
class Resolvent {
 public:
  Resolvent() = default;
  /// Factorizes m; throws SingularResolvent if m is numerically singular.
  explicit Resolvent(const Matrix& m);

  /// b * m^{-1}
  Matrix apply_right(const Matrix& b) const;
  /// m^{-1} * b
  Matrix apply_left(const Matrix& b) const;

  Eigen::Index size() const { return lu_.rows(); }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  Eigen::PartialPivLU<Matrix> lu_t_;
};

/// Schur form of one coefficient matrix, shared between many Sylvester solves.
struct SchurFactor {
  Eigen::MatrixXcd q;
  Eigen::MatrixXcd t;

  SchurFactor() = default;
  explicit SchurFactor(const Matrix& m);
};

/// Solves a X + X b = rhs with precomputed Schur factors of a and b.
Matrix solve_sylvester(const SchurFactor& a, const SchurFactor& b, const Matrix& rhs);

/// Maximum absolute entry.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace ruinkit
