#include <algorithm>
#include <string>

#include "ruinkit/errors.hpp"
#include "ruinkit/solver.hpp"

namespace ruinkit {

namespace {

void check_stationary_inputs(const Matrix& A, const Matrix& D, double lambda, double c, double theta) {
  if (A.rows() != A.cols() || D.rows() != A.rows() || D.cols() != A.cols())
    throw DimensionMismatch("A and D must be square of equal size");
  if (!(lambda > 0.0) || !(c > 0.0)) throw InvalidSubgenerator("lambda and c must be positive");
  if (!(theta >= 0.0)) throw DimensionMismatch("theta must be nonnegative");
}

}  // namespace

double riccati_residual(const Matrix& Z, const Matrix& A, const Matrix& D, double lambda, double c,
                        double theta) {
  const Eigen::Index p = A.rows();
  const Matrix I = Matrix::Identity(p, p);
  const Matrix r = (lambda / c) * I + Z * (A - ((lambda + theta) / c) * I) + Z * D * Z;
  return max_abs(r);
}

RiccatiSolution riccati_psi_hat(const Matrix& A, const Matrix& D, double lambda, double c, double theta,
                                double tol, std::size_t max_iterations) {
  check_stationary_inputs(A, D, lambda, c, theta);
  const Eigen::Index p = A.rows();
  const Matrix I = Matrix::Identity(p, p);
  const Matrix shifted = ((lambda + theta) / c) * I - A;
  const Resolvent res(shifted);
  const Matrix base = res.apply_right((lambda / c) * I);

  Matrix Z = Matrix::Zero(p, p);
  std::size_t it = 0;
  double change = 0.0;
  for (; it < max_iterations; ++it) {
    Matrix next = base + res.apply_right(Z * D * Z);
    change = max_abs(next - Z);
    Z = std::move(next);
    if (change < tol) break;
  }
  if (it == max_iterations && change >= tol)
    throw NonConvergence("Riccati iteration did not converge in " + std::to_string(max_iterations) +
                         " steps (last change " + std::to_string(change) + ")");

  const double resid = riccati_residual(Z, A, D, lambda, c, theta);
  return RiccatiSolution{Z, it + 1, resid};
}

double stationary_transform(const Matrix& A, const Matrix& D, const RowVector& alpha, double lambda, double c,
                            double u, double theta, double y, double tol) {
  if (!(u >= 0.0) || !(y >= 0.0)) throw DimensionMismatch("u and y must be nonnegative");
  if (alpha.size() != A.rows()) throw DimensionMismatch("alpha does not match A");
  const RiccatiSolution sol = riccati_psi_hat(A, D, lambda, c, theta, tol);
  const Vector tail = y == 0.0 ? Vector::Ones(A.rows()) : Vector(expm(A * y).rowwise().sum());
  const RowVector entry = alpha * sol.psi;
  const Matrix M = A + D * sol.psi;
  const double q = M.diagonal().cwiseAbs().maxCoeff();
  const RowVector v = uniformized_action(entry, u, q, [&M](const RowVector& t) { return RowVector(t * M); });
  return std::clamp(v.dot(tail), 0.0, 1.0);
}

bool is_psi_stochastic(const Matrix& psi, double tol) {
  return (psi.rowwise().sum().array() - 1.0).abs().maxCoeff() < tol;
}

}  // namespace ruinkit
