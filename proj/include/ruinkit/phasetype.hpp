#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "ruinkit/linalg.hpp"

namespace ruinkit {

/// Tolerance used by every probability-vector and sub-generator sign check.
inline constexpr double kValidationTol = 1e-12;

/// Phase-type law PH(alpha, A): absorption time of a Markov jump process
/// started from alpha with transient sub-generator A.
struct PhaseTypeRep {
  RowVector alpha;
  Matrix A;

  Eigen::Index size() const { return A.rows(); }
  /// Exit vector a = -A 1.
  Vector exit_vector() const { return -A.rowwise().sum(); }
};

/// Builds a representation, clamping entries in (-1e-12, 0) to zero, then
/// validates it.
PhaseTypeRep make_ph(RowVector alpha, Matrix A);

PhaseTypeRep exponential(double rate);
PhaseTypeRep erlang(int stages, double rate);

/// Throws NonStochasticInitial or InvalidSubgenerator naming the failing
/// invariant and index.
void validate_ph(const PhaseTypeRep& rep);

/// Throws InvalidSubgenerator unless A has a strictly negative diagonal,
/// nonnegative off-diagonal, nonpositive row sums and is invertible.
void validate_subgenerator(const Matrix& A);

/// Throws NonStochasticInitial unless v >= 0 and v 1 = 1.
void validate_probability(const RowVector& v, const char* what = "initial vector");

double ph_density(const PhaseTypeRep& rep, double t);
double ph_survival(const PhaseTypeRep& rep, double t);
/// k! alpha (-A)^{-k} 1
double ph_moment(const PhaseTypeRep& rep, int k);
double ph_mean(const PhaseTypeRep& rep);
double ph_variance(const PhaseTypeRep& rep);

/// Law of the independent sum Y1 + Y2.
PhaseTypeRep ph_convolve(const PhaseTypeRep& r1, const PhaseTypeRep& r2);
/// Law of delta Y1 + (1 - delta) Y2 with delta ~ Bernoulli(p).
PhaseTypeRep ph_mixture(double p, const PhaseTypeRep& r1, const PhaseTypeRep& r2);

/// Eigenvalue of largest real part.  Throws NumericalFailure if the solver
/// fails or that eigenvalue has an imaginary part above 1e-8.
double dominant_eigenvalue(const Matrix& A);

/// max_i (-A 1)_i
double max_exit_rate(const Matrix& A);

/// Jump-chain tables for drawing sojourns in a block of transient states.
///
/// Destinations 0..n-1 are the block's own states; destinations n.. are the
/// columns of an exit matrix (the next block, or the single absorbing state).
class JumpTable {
 public:
  JumpTable() = default;
  /// `exits` is p x q; pass the exit vector as a p x 1 matrix for plain PH.
  JumpTable(const Matrix& A, const Matrix& exits);

  /// Runs the chain from `state` until it leaves the block.  Returns the
  /// sojourn time; `state` is overwritten with the exit column index.
  template <class Urbg>
  double run(Eigen::Index& state, Urbg& rng) const {
    double elapsed = 0.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (;;) {
      const auto& row = cumulative_[static_cast<std::size_t>(state)];
      elapsed += -std::log1p(-unif(rng)) / rates_[static_cast<std::size_t>(state)];
      const double r = unif(rng);
      std::size_t j = 0;
      while (j + 1 < row.size() && row[j] <= r) ++j;
      if (static_cast<Eigen::Index>(j) < n_) {
        state = static_cast<Eigen::Index>(j);
        continue;
      }
      state = static_cast<Eigen::Index>(j) - n_;
      return elapsed;
    }
  }

  Eigen::Index size() const { return n_; }

 private:
  Eigen::Index n_ = 0;
  std::vector<double> rates_;
  std::vector<std::vector<double>> cumulative_;
};

/// Draws an index from a probability vector.
template <class Urbg>
Eigen::Index sample_index(const RowVector& probs, Urbg& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = unif(rng);
  double acc = 0.0;
  Eigen::Index last = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) <= 0.0) continue;
    last = i;
    acc += probs(i);
    if (r < acc) return i;
  }
  return last;
}

/// Draws one absorption time.  Simulates the jump chain with exponential
/// holding times.
template <class Urbg>
double ph_sample(const PhaseTypeRep& rep, Urbg& rng) {
  JumpTable table(rep.A, Matrix(rep.exit_vector()));
  Eigen::Index state = sample_index(rep.alpha, rng);
  return table.run(state, rng);
}

}  // namespace ruinkit
