#include "ruinkit/phasetype.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>
#include <string>

#include "ruinkit/errors.hpp"

namespace ruinkit {

namespace {

template <class Derived>
void clamp_noise(Eigen::MatrixBase<Derived>& m, bool skip_diagonal) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (skip_diagonal && i == j) continue;
      if (m(i, j) < 0.0 && m(i, j) > -kValidationTol) m(i, j) = 0.0;
    }
}

std::string at(Eigen::Index i) { return "[" + std::to_string(i) + "]"; }
std::string at(Eigen::Index i, Eigen::Index j) {
  return "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

}  // namespace

void validate_probability(const RowVector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v(i) >= 0.0)) throw NonStochasticInitial(std::string(what) + at(i) + " is negative");
  const double sum = v.sum();
  if (std::abs(sum - 1.0) > kValidationTol) {
    std::ostringstream os;
    os.precision(15);
    os << what << " sums to " << sum << ", expected 1";
    throw NonStochasticInitial(os.str());
  }
}

void validate_subgenerator(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw InvalidSubgenerator("sub-generator must be square and nonempty");
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (!(A(i, i) < 0.0)) throw InvalidSubgenerator("diagonal entry" + at(i, i) + " is not negative");
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (i != j && !(A(i, j) >= 0.0))
        throw InvalidSubgenerator("off-diagonal entry" + at(i, j) + " is negative");
    const double row = A.row(i).sum();
    if (row > kValidationTol * std::max(1.0, -A(i, i)))
      throw InvalidSubgenerator("row" + at(i) + " has positive sum");
  }
  // All states transient <=> A invertible (for a sub-generator).
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw InvalidSubgenerator("sub-generator is singular (a state is not transient)");
}

void validate_ph(const PhaseTypeRep& rep) {
  if (rep.alpha.size() != rep.A.rows())
    throw DimensionMismatch("initial vector length does not match sub-generator size");
  validate_probability(rep.alpha);
  validate_subgenerator(rep.A);
}

PhaseTypeRep make_ph(RowVector alpha, Matrix A) {
  clamp_noise(alpha, false);
  clamp_noise(A, true);
  PhaseTypeRep rep{std::move(alpha), std::move(A)};
  validate_ph(rep);
  return rep;
}

PhaseTypeRep exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidSubgenerator("exponential rate must be positive");
  return PhaseTypeRep{RowVector::Ones(1), Matrix::Constant(1, 1, -rate)};
}

PhaseTypeRep erlang(int stages, double rate) {
  if (stages < 1) throw InvalidSubgenerator("Erlang stage count must be at least 1");
  if (!(rate > 0.0)) throw InvalidSubgenerator("Erlang rate must be positive");
  Matrix A = Matrix::Zero(stages, stages);
  for (int i = 0; i < stages; ++i) {
    A(i, i) = -rate;
    if (i + 1 < stages) A(i, i + 1) = rate;
  }
  RowVector alpha = RowVector::Zero(stages);
  alpha(0) = 1.0;
  return PhaseTypeRep{std::move(alpha), std::move(A)};
}

double ph_density(const PhaseTypeRep& rep, double t) {
  const double f = (rep.alpha * expm(rep.A * t) * rep.exit_vector())(0);
  return std::max(f, 0.0);
}

double ph_survival(const PhaseTypeRep& rep, double t) {
  if (t <= 0.0) return 1.0;
  const double s = (rep.alpha * expm(rep.A * t)).sum();
  return std::clamp(s, 0.0, 1.0);
}

double ph_moment(const PhaseTypeRep& rep, int k) {
  if (k < 1) throw DimensionMismatch("moment order must be positive");
  const Resolvent neg_a(-rep.A);
  RowVector v = rep.alpha;
  double factorial = 1.0;
  for (int i = 1; i <= k; ++i) {
    v = neg_a.apply_right(v);
    factorial *= i;
  }
  return factorial * v.sum();
}

double ph_mean(const PhaseTypeRep& rep) { return ph_moment(rep, 1); }

double ph_variance(const PhaseTypeRep& rep) {
  const double m = ph_moment(rep, 1);
  return ph_moment(rep, 2) - m * m;
}

PhaseTypeRep ph_convolve(const PhaseTypeRep& r1, const PhaseTypeRep& r2) {
  const Eigen::Index p1 = r1.size(), p2 = r2.size();
  Matrix B = Matrix::Zero(p1 + p2, p1 + p2);
  B.topLeftCorner(p1, p1) = r1.A;
  B.topRightCorner(p1, p2) = r1.exit_vector() * r2.alpha;
  B.bottomRightCorner(p2, p2) = r2.A;
  RowVector beta = RowVector::Zero(p1 + p2);
  beta.head(p1) = r1.alpha;
  return PhaseTypeRep{std::move(beta), std::move(B)};
}

PhaseTypeRep ph_mixture(double p, const PhaseTypeRep& r1, const PhaseTypeRep& r2) {
  if (!(p >= 0.0 && p <= 1.0)) throw NonStochasticInitial("mixture probability outside [0,1]");
  const Eigen::Index p1 = r1.size(), p2 = r2.size();
  Matrix B = Matrix::Zero(p1 + p2, p1 + p2);
  B.topLeftCorner(p1, p1) = r1.A;
  B.bottomRightCorner(p2, p2) = r2.A;
  RowVector beta(p1 + p2);
  beta << p * r1.alpha, (1.0 - p) * r2.alpha;
  return PhaseTypeRep{std::move(beta), std::move(B)};
}

double dominant_eigenvalue(const Matrix& A) {
  Eigen::EigenSolver<Matrix> solver(A, false);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (ev(i).real() > ev(best).real()) best = i;
  if (std::abs(ev(best).imag()) > 1e-8)
    throw NumericalFailure("dominant eigenvalue is not real");
  return ev(best).real();
}

double max_exit_rate(const Matrix& A) { return std::max(0.0, (-A.rowwise().sum()).maxCoeff()); }

JumpTable::JumpTable(const Matrix& A, const Matrix& exits)
    : n_(A.rows()), rates_(static_cast<std::size_t>(A.rows())), cumulative_(static_cast<std::size_t>(A.rows())) {
  if (exits.rows() != A.rows()) throw DimensionMismatch("exit matrix rows do not match block size");
  for (Eigen::Index i = 0; i < n_; ++i) {
    const double rate = -A(i, i);
    auto& row = cumulative_[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(n_ + exits.cols()));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (j != i) acc += A(i, j) / rate;
      row.push_back(acc);
    }
    for (Eigen::Index j = 0; j < exits.cols(); ++j) {
      acc += exits(i, j) / rate;
      row.push_back(acc);
    }
    // Rounding: the chain must leave through some destination.
    for (std::size_t j = row.size(); j-- > 0;) {
      if (j == 0 || row[j] > row[j - 1]) {
        row[j] = 2.0;
        break;
      }
    }
    rates_[static_cast<std::size_t>(i)] = rate;
  }
}

}  // namespace ruinkit
