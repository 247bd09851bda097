#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ruinkit/embedding.hpp"
#include "ruinkit/errors.hpp"
#include "ruinkit/linalg.hpp"

namespace ruinkit {

/// Parameters of E[e^{-theta T} 1{T < inf, N(T) <= s, -R(T) >= y} | R(0) = u].
struct RuinQuery {
  double u = 0.0;
  double theta = 0.0;
  std::size_t s = 1;
  double y = 0.0;
};

/// Throws DimensionMismatch on negative u, theta, y or s == 0.
void validate_query(const RuinQuery& q);

/// Upper block-triangular array X(k, l), 1 <= k <= l <= n, stored by block
/// column.  Column l holds the blocks X(1, l) .. X(l, l) stacked vertically.
/// Growing the array appends columns; existing blocks never change.
class BlockTriangular {
 public:
  std::size_t size() const { return columns_.size(); }

  /// Row dimension of block row k.
  Eigen::Index row_dim(std::size_t k) const { return row_offsets_[k] - row_offsets_[k - 1]; }
  /// Row offset of block row k inside every column (k is 1-based).
  Eigen::Index row_offset(std::size_t k) const { return row_offsets_[k - 1]; }
  Eigen::Index col_dim(std::size_t l) const { return columns_[l - 1].cols(); }

  /// Block X(k, l) for k <= l.
  auto block(std::size_t k, std::size_t l) const {
    return columns_[l - 1].middleRows(row_offsets_[k - 1], row_dim(k));
  }
  const Matrix& column(std::size_t l) const { return columns_[l - 1]; }

  /// Appends column l = size() + 1 whose block row l has `row_dim` rows.
  void push_column(Matrix column, Eigen::Index row_dim);

  /// Assembles the leading s x s blocks into one dense matrix.
  Matrix assemble(std::size_t s) const;

 private:
  std::vector<Eigen::Index> row_offsets_{0};
  std::vector<Matrix> columns_;
};

/// How the first-passage blocks Psi_theta(k, l) are computed.
enum class PsiMethod {
  /// Resolvent recursion of the Poisson embedding (Poisson kind only).
  closed_form,
  /// Block Sylvester equations of the general embedding (any kind).
  sylvester,
};

/// Psi_theta, U_theta blocks for one theta, grown on demand.
///
/// Column l of both arrays is computed from columns < l only, so enlarging
/// the truncation never changes blocks already computed.
class SolverWorkspace {
 public:
  SolverWorkspace(FluidBlocks blocks, double theta, PsiMethod method);
  /// Uses the closed form for Poisson blocks and Sylvester otherwise.
  SolverWorkspace(FluidBlocks blocks, double theta);

  /// Computes all blocks with l <= s.
  void extend(std::size_t s);

  std::size_t truncation() const { return psi_.size(); }
  double theta() const { return theta_; }
  const FluidBlocks& blocks() const { return blocks_; }
  const BlockTriangular& psi() const { return psi_; }
  const BlockTriangular& ubl() const { return ubl_; }
  /// Down->down block G_k (A_k for the Poisson kind).
  const Matrix& down_block(std::size_t k) const { return levels_[k - 1].G; }

  /// Joint transform at claim cap s <= truncation().
  double transform(double u, double y, std::size_t s) const;
  /// Transform on a nondecreasing grid of reserves, in one sweep.
  std::vector<double> transform_u_grid(const std::vector<double>& u, double y, std::size_t s) const;

  /// Approximate bytes held by blocks up to truncation s.
  double projected_bytes(std::size_t s) const;

 private:
  void push_level();
  void compute_column(std::size_t l);
  RowVector entry_vector(std::size_t s) const;
  Vector deficit_vector(double y, std::size_t s) const;
  RowVector propagate(RowVector v, double u, std::size_t s) const;

  FluidBlocks blocks_;
  double theta_;
  PsiMethod method_;
  std::vector<FluidLevel> levels_;
  BlockTriangular psi_;
  BlockTriangular ubl_;
  std::vector<Resolvent> shifted_;    // closed form: I - c/(lambda+theta) A_l
  std::vector<SchurFactor> up_schur_;    // sylvester: C_k^{-1}(V_k - theta I)
  std::vector<SchurFactor> down_schur_;  // sylvester: G_l
  std::vector<Matrix> up_entry_;         // sylvester: -C_k^{-1} W_k
};

/// Psi_theta(k, l), 1 <= k <= l <= s, by the Poisson resolvent recursion.
BlockTriangular psi_blocks_poisson(const FluidBlocks& blocks, double theta, std::size_t s);

/// Psi_theta(k, l) by block Sylvester equations; valid for every kind.
BlockTriangular psi_blocks_general(const FluidBlocks& blocks, double theta, std::size_t s);

/// U_theta(k, l) = G_k if k = l, F_k Psi_theta(k+1, l) otherwise.
BlockTriangular u_blocks(const BlockTriangular& psi, const FluidBlocks& blocks, std::size_t s);

/// Leading blocks of Phi_theta(u) = exp(U_theta u), from one exponential of
/// the assembled truncated matrix.
BlockTriangular phi_blocks(const BlockTriangular& ubl, double u, std::size_t s);

/// v exp(M t) for a sub-generator M = apply(.) by uniformization; q must
/// bound the absolute diagonal of M.
template <class Apply>
RowVector uniformized_action(RowVector v, double t, double q, Apply&& apply);

double ruin_transform(const FluidBlocks& blocks, const RuinQuery& query);

/// P(ruin, N(T) <= s | R(0) = u).
double ruin_prob_by_claims(const FluidBlocks& blocks, double u, std::size_t s);

struct UltimateRuinOptions {
  std::size_t start = 64;
  std::size_t cap = std::size_t{1} << 14;
  /// Workspace memory above which growth stops with TruncationLimit.
  double max_bytes = double(1u << 30);
};

struct UltimateRuin {
  double probability;
  std::size_t truncation;
};

/// Doubles s until one doubling changes the ruin probability by less than tol.
/// For Poisson arrivals and a stationary model whose Riccati solution is
/// stochastic, ruin is certain and the result is {1, 0} without truncation.
UltimateRuin ultimate_ruin(const FluidBlocks& blocks, double u, double tol = 1e-6,
                           const UltimateRuinOptions& options = {});

struct RiccatiSolution {
  Matrix psi;
  std::size_t iterations;
  double residual;
};

/// Minimal nonnegative solution of
///   (lambda/c) I + Z (A - ((lambda+theta)/c) I) + Z D Z = 0
/// by the monotone iteration Z <- ((lambda/c) I + Z D Z)(((lambda+theta)/c) I - A)^{-1}
/// started from 0.
RiccatiSolution riccati_psi_hat(const Matrix& A, const Matrix& D, double lambda, double c, double theta,
                                double tol = 1e-10, std::size_t max_iterations = 100000);

/// Riccati residual in max norm.
double riccati_residual(const Matrix& Z, const Matrix& A, const Matrix& D, double lambda, double c,
                        double theta);

/// alpha Psi_hat exp((A + D Psi_hat) u) exp(A y) 1: the transform with s = infinity.
double stationary_transform(const Matrix& A, const Matrix& D, const RowVector& alpha, double lambda,
                            double c, double u, double theta, double y, double tol = 1e-10);

/// True iff max_i |(Psi 1)_i - 1| < tol.
bool is_psi_stochastic(const Matrix& psi, double tol = 1e-8);

// ---------------------------------------------------------------------------

template <class Apply>
RowVector uniformized_action(RowVector v, double t, double q, Apply&& apply) {
  if (t <= 0.0 || v.size() == 0) return v;
  if (!(q > 0.0)) throw DimensionMismatch("uniformization rate must be positive");
  // Chunks keep the Poisson mean small enough that e^{-q dt} cannot underflow.
  constexpr double kMaxMean = 24.0;
  const int chunks = static_cast<int>(std::ceil(q * t / kMaxMean));
  const double dt = t / chunks;
  const double mean = q * dt;
  for (int c = 0; c < chunks; ++c) {
    RowVector term = v;
    double weight = std::exp(-mean);
    RowVector acc = weight * term;
    // Terms are nonnegative and bounded by |v|, so the tail is below the
    // remaining Poisson weight.
    for (int n = 1; n <= mean || weight > 1e-18; ++n) {
      term += apply(term) / q;
      weight *= mean / n;
      acc += weight * term;
    }
    v = std::move(acc);
  }
  return v;
}

}  // namespace ruinkit
