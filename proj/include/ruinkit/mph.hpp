#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "ruinkit/linalg.hpp"
#include "ruinkit/phasetype.hpp"

namespace ruinkit {

/// Transient block S_k of the claim generator: A_k within S_k, D_k into S_{k+1}.
struct MphBlock {
  Matrix A;
  Matrix D;
};

enum class FamilyKind { stationary, explicit_list, parametric };

/// Sequential multivariate phase-type claim stream.
///
/// Y_k is the time the underlying jump process spends in block S_k.  The
/// family of blocks is infinite; block(k) is defined for every k >= 1.  An
/// explicit list repeats its last block for k beyond the list.  Parametric
/// generators must be pure: block(k) is called concurrently.
class MphModel {
 public:
  using Generator = std::function<MphBlock(std::size_t)>;

  static MphModel stationary(RowVector alpha, Matrix A, Matrix D);
  static MphModel explicit_list(RowVector alpha, std::vector<MphBlock> blocks);
  static MphModel parametric(RowVector alpha, Generator generator);

  const RowVector& alpha() const { return alpha_; }
  FamilyKind kind() const { return kind_; }

  /// Block k (1-based).
  MphBlock block(std::size_t k) const;
  Eigen::Index dimension(std::size_t k) const { return block(k).A.rows(); }

  /// Checks the invariants for blocks 1..depth: valid sub-generators,
  /// D_k >= 0 and A_k 1 + D_k 1 = 0.  Throws on the first violation.
  void validate(std::size_t depth) const;

 private:
  MphModel(FamilyKind kind, RowVector alpha) : kind_(kind), alpha_(std::move(alpha)) {}

  FamilyKind kind_;
  RowVector alpha_;
  std::shared_ptr<const std::vector<MphBlock>> list_;
  Generator generator_;
};

/// Entry distributions gamma_1..gamma_n into S_1..S_n.
std::vector<RowVector> marginal_vectors(const MphModel& model, std::size_t n);

/// Y_k ~ PH(gamma_k, A_k).
PhaseTypeRep marginal_rep(const MphModel& model, std::size_t k);

/// alpha e^{A_1 y_1} D_1 ... e^{A_n y_n} (-A_n 1)
double joint_density(const MphModel& model, const std::vector<double>& y);

/// Cov(Y_k, Y_l) for 1 <= k < l; returns Var(Y_k) when k == l.
double covariance(const MphModel& model, std::size_t k, std::size_t l);
double correlation(const MphModel& model, std::size_t k, std::size_t l);

/// E[exp(-<theta, Y>)] for the first theta.size() claims.
double laplace(const MphModel& model, const std::vector<double>& theta);

/// Independent claims Y_k ~ reps[k-1]; the last rep repeats forever.
MphModel build_independent(const std::vector<PhaseTypeRep>& reps);

using Sequence = std::function<double(std::size_t)>;

/// Two regimes: regular claims ~ B and severe claims ~ G.  Claim 1 is regular
/// with probability r; after a regular claim k the next is regular with
/// probability r_k(k), after a severe claim k the next is severe with
/// probability p_k(k).
MphModel build_two_regime(const PhaseTypeRep& B, const PhaseTypeRep& G, double r, Sequence r_k,
                          Sequence p_k);

/// m exponential stages of rate mu_k(k); each stage continues to the next one
/// with probability p_k(k).  A claim that stops at stage i < m makes the next
/// claim start at a stage drawn from row i of P; a claim that reaches stage m
/// makes the next claim start from beta_k(k).
MphModel build_stage_cascade(int m, Sequence mu_k, Sequence p_k, const Matrix& P,
                             std::function<RowVector(std::size_t)> beta_k, const RowVector& alpha);

/// The (m-1)x(m-1) upper-triangular stochastic matrix whose row i is uniform
/// over columns i..m-2.
Matrix upper_uniform_matrix(int m);

/// Carries the phase of the claim process from one claim to the next.
class ClaimSampler {
 public:
  /// Precomputes jump tables for blocks 1..depth (the last table repeats).
  ClaimSampler(const MphModel& model, std::size_t depth);

  /// Starts a fresh claim sequence.
  template <class Urbg>
  void reset(Urbg& rng) {
    index_ = 0;
    phase_ = sample_index(alpha_, rng);
  }

  /// Size of the next claim.
  template <class Urbg>
  double next(Urbg& rng) {
    const auto& table = tables_[std::min(index_, tables_.size() - 1)];
    ++index_;
    return table.run(phase_, rng);
  }

 private:
  RowVector alpha_;
  std::vector<JumpTable> tables_;
  std::size_t index_ = 0;
  Eigen::Index phase_ = 0;
};

/// Draws (Y_1..Y_n) by simulating the jump process through S_1..S_n.
template <class Urbg>
std::vector<double> mph_sample(const MphModel& model, std::size_t n, Urbg& rng) {
  ClaimSampler sampler(model, n);
  sampler.reset(rng);
  std::vector<double> out(n);
  for (auto& y : out) y = sampler.next(rng);
  return out;
}

}  // namespace ruinkit
