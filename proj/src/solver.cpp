#include "ruinkit/solver.hpp"

#include <algorithm>
#include <string>

#include "ruinkit/errors.hpp"

namespace ruinkit {

void validate_query(const RuinQuery& q) {
  if (!(q.u >= 0.0)) throw DimensionMismatch("query: u must be nonnegative");
  if (!(q.theta >= 0.0)) throw DimensionMismatch("query: theta must be nonnegative");
  if (!(q.y >= 0.0)) throw DimensionMismatch("query: y must be nonnegative");
  if (q.s < 1) throw DimensionMismatch("query: s must be at least 1");
}

void BlockTriangular::push_column(Matrix column, Eigen::Index row_dim) {
  const Eigen::Index rows = row_offsets_.back() + row_dim;
  if (column.rows() != rows) throw DimensionMismatch("block column has the wrong number of rows");
  row_offsets_.push_back(rows);
  columns_.push_back(std::move(column));
}

Matrix BlockTriangular::assemble(std::size_t s) const {
  if (s > size()) throw DimensionMismatch("assemble beyond the computed truncation");
  Eigen::Index cols = 0;
  for (std::size_t l = 1; l <= s; ++l) cols += col_dim(l);
  Matrix out = Matrix::Zero(row_offsets_[s], cols);
  Eigen::Index c = 0;
  for (std::size_t l = 1; l <= s; ++l) {
    out.block(0, c, columns_[l - 1].rows(), col_dim(l)) = columns_[l - 1];
    c += col_dim(l);
  }
  return out;
}

SolverWorkspace::SolverWorkspace(FluidBlocks blocks, double theta, PsiMethod method)
    : blocks_(std::move(blocks)), theta_(theta), method_(method) {
  if (!(theta >= 0.0)) throw DimensionMismatch("theta must be nonnegative");
  if (method_ == PsiMethod::closed_form && blocks_.kind() != FluidKind::poisson)
    throw DimensionMismatch("the closed-form recursion needs Poisson blocks");
}

SolverWorkspace::SolverWorkspace(FluidBlocks blocks, double theta)
    : SolverWorkspace(blocks, theta,
                      blocks.kind() == FluidKind::poisson ? PsiMethod::closed_form : PsiMethod::sylvester) {}

void SolverWorkspace::push_level() {
  const std::size_t k = levels_.size() + 1;
  FluidLevel lv = blocks_.level(k);
  if (k > 1 && levels_.back().F.cols() != lv.V.rows())
    throw DimensionMismatch("F_" + std::to_string(k - 1) + " does not match the up block of index " +
                            std::to_string(k));
  if (method_ == PsiMethod::closed_form) {
    const double kappa = blocks_.premium() / (blocks_.lambda() + theta_);
    const Matrix shifted = Matrix::Identity(lv.G.rows(), lv.G.cols()) - kappa * lv.G;
    try {
      shifted_.emplace_back(shifted);
    } catch (const SingularResolvent&) {
      throw SingularResolvent("I - c/(lambda+theta) A_" + std::to_string(k) + " is singular");
    }
  } else {
    const Vector inv_rate = lv.up_rates.cwiseInverse();
    const Matrix coef = inv_rate.asDiagonal() * (lv.V - theta_ * Matrix::Identity(lv.V.rows(), lv.V.cols()));
    up_schur_.emplace_back(coef);
    down_schur_.emplace_back(lv.G);
    up_entry_.push_back(-(inv_rate.asDiagonal() * lv.W));
  }
  levels_.push_back(std::move(lv));
}

void SolverWorkspace::compute_column(std::size_t l) {
  const FluidLevel& lv = levels_[l - 1];
  const Eigen::Index up_l = lv.V.rows();
  const Eigen::Index down_l = lv.G.rows();
  const Eigen::Index up_before = psi_.row_offset(l);
  const Eigen::Index down_before = ubl_.row_offset(l);

  Matrix psi_col(up_before + up_l, down_l);
  Matrix u_col(down_before + down_l, down_l);
  // acc rows of block k < l hold sum_{v=k}^{l-1} Psi(k,v) F_v Psi(v+1,l), filled
  // as the blocks below them are finished.
  Matrix acc = Matrix::Zero(up_before, down_l);

  const double kappa = method_ == PsiMethod::closed_form ? blocks_.premium() / (blocks_.lambda() + theta_) : 0.0;

  for (std::size_t k = l; k >= 1; --k) {
    const Eigen::Index off = psi_.row_offset(k);
    const Eigen::Index up_k = k == l ? up_l : psi_.row_dim(k);
    Matrix x;
    if (method_ == PsiMethod::closed_form) {
      if (k == l)
        x = (blocks_.lambda() / (blocks_.lambda() + theta_)) *
            shifted_[l - 1].apply_right(Matrix::Identity(up_l, down_l));
      else
        x = kappa * shifted_[l - 1].apply_right(acc.middleRows(off, up_k));
    } else {
      if (k == l)
        x = solve_sylvester(up_schur_[l - 1], down_schur_[l - 1], up_entry_[l - 1]);
      else
        x = solve_sylvester(up_schur_[k - 1], down_schur_[l - 1], -acc.middleRows(off, up_k));
    }
    psi_col.middleRows(off, up_k) = x;
    if (k == 1) break;

    const FluidLevel& prev = levels_[k - 2];
    Matrix u_block = prev.F * x;
    acc.topRows(off).noalias() += psi_.column(k - 1) * u_block;
    u_col.middleRows(ubl_.row_offset(k - 1), prev.G.rows()) = std::move(u_block);
  }
  u_col.bottomRows(down_l) = lv.G;
  psi_.push_column(std::move(psi_col), up_l);
  ubl_.push_column(std::move(u_col), down_l);
}

void SolverWorkspace::extend(std::size_t s) {
  while (truncation() < s) {
    push_level();
    compute_column(truncation() + 1);
  }
}

double SolverWorkspace::projected_bytes(std::size_t s) const {
  const FluidLevel lv = levels_.empty() ? blocks_.level(1) : levels_.back();
  const double up = static_cast<double>(lv.V.rows());
  const double down = static_cast<double>(lv.G.rows());
  const double blocks = 0.5 * static_cast<double>(s) * static_cast<double>(s + 1);
  return 8.0 * blocks * (up + down) * down;
}

RowVector SolverWorkspace::entry_vector(std::size_t s) const {
  Eigen::Index n = ubl_.row_offset(s) + ubl_.row_dim(s);
  RowVector x(n);
  const RowVector& pi = blocks_.initial();
  for (std::size_t l = 1; l <= s; ++l) x.segment(ubl_.row_offset(l), ubl_.row_dim(l)) = pi * psi_.block(1, l);
  return x;
}

Vector SolverWorkspace::deficit_vector(double y, std::size_t s) const {
  Vector w(ubl_.row_offset(s) + ubl_.row_dim(s));
  const Matrix* last = nullptr;
  Vector tail;
  for (std::size_t l = 1; l <= s; ++l) {
    const Matrix& G = levels_[l - 1].G;
    if (y == 0.0) {
      tail = Vector::Ones(G.rows());
    } else if (last == nullptr || last->rows() != G.rows() || *last != G) {
      tail = expm(G * y).rowwise().sum();
      last = &G;
    }
    w.segment(ubl_.row_offset(l), G.rows()) = tail;
  }
  return w;
}

RowVector SolverWorkspace::propagate(RowVector v, double u, std::size_t s) const {
  double q = 0.0;
  for (std::size_t l = 1; l <= s; ++l) q = std::max(q, levels_[l - 1].G.diagonal().cwiseAbs().maxCoeff());
  auto apply = [this, s](const RowVector& t) {
    RowVector out(t.size());
    for (std::size_t l = 1; l <= s; ++l) {
      const Matrix& col = ubl_.column(l);
      out.segment(ubl_.row_offset(l), ubl_.row_dim(l)).noalias() = t.head(col.rows()) * col;
    }
    return out;
  };
  return uniformized_action(std::move(v), u, q, apply);
}

double SolverWorkspace::transform(double u, double y, std::size_t s) const {
  return transform_u_grid({u}, y, s).front();
}

std::vector<double> SolverWorkspace::transform_u_grid(const std::vector<double>& u, double y,
                                                      std::size_t s) const {
  if (s < 1 || s > truncation()) throw DimensionMismatch("claim cap outside the computed truncation");
  if (!(y >= 0.0)) throw DimensionMismatch("deficit threshold must be nonnegative");
  const Vector w = deficit_vector(y, s);
  RowVector v = entry_vector(s);
  std::vector<double> out;
  out.reserve(u.size());
  double at = 0.0;
  for (double x : u) {
    if (!(x >= at)) throw DimensionMismatch("reserve grid must be nonnegative and nondecreasing");
    v = propagate(std::move(v), x - at, s);
    at = x;
    out.push_back(std::clamp(v.dot(w), 0.0, 1.0));
  }
  return out;
}

BlockTriangular psi_blocks_poisson(const FluidBlocks& blocks, double theta, std::size_t s) {
  SolverWorkspace ws(blocks, theta, PsiMethod::closed_form);
  ws.extend(s);
  return ws.psi();
}

BlockTriangular psi_blocks_general(const FluidBlocks& blocks, double theta, std::size_t s) {
  SolverWorkspace ws(blocks, theta, PsiMethod::sylvester);
  ws.extend(s);
  return ws.psi();
}

BlockTriangular u_blocks(const BlockTriangular& psi, const FluidBlocks& blocks, std::size_t s) {
  if (s > psi.size()) throw DimensionMismatch("U blocks requested beyond the Psi truncation");
  std::vector<FluidLevel> levels;
  levels.reserve(s);
  for (std::size_t k = 1; k <= s; ++k) levels.push_back(blocks.level(k));
  BlockTriangular out;
  Eigen::Index rows = 0;
  for (std::size_t l = 1; l <= s; ++l) {
    const Eigen::Index down_l = levels[l - 1].G.rows();
    Matrix col(rows + down_l, down_l);
    Eigen::Index off = 0;
    for (std::size_t k = 1; k < l; ++k) {
      const Matrix& F = levels[k - 1].F;
      col.middleRows(off, F.rows()) = F * psi.block(k + 1, l);
      off += F.rows();
    }
    col.bottomRows(down_l) = levels[l - 1].G;
    out.push_column(std::move(col), down_l);
    rows += down_l;
  }
  return out;
}

BlockTriangular phi_blocks(const BlockTriangular& ubl, double u, std::size_t s) {
  if (!(u >= 0.0)) throw DimensionMismatch("reserve must be nonnegative");
  const Matrix e = expm(ubl.assemble(s) * u);
  BlockTriangular out;
  Eigen::Index c = 0;
  for (std::size_t l = 1; l <= s; ++l) {
    const Eigen::Index d = ubl.col_dim(l);
    out.push_column(e.block(0, c, c + d, d), d);
    c += d;
  }
  return out;
}

double ruin_transform(const FluidBlocks& blocks, const RuinQuery& query) {
  validate_query(query);
  SolverWorkspace ws(blocks, query.theta);
  ws.extend(query.s);
  return ws.transform(query.u, query.y, query.s);
}

double ruin_prob_by_claims(const FluidBlocks& blocks, double u, std::size_t s) {
  return ruin_transform(blocks, RuinQuery{u, 0.0, s, 0.0});
}

UltimateRuin ultimate_ruin(const FluidBlocks& blocks, double u, double tol, const UltimateRuinOptions& options) {
  if (!(tol > 0.0)) throw DimensionMismatch("tolerance must be positive");
  if (!(u >= 0.0)) throw DimensionMismatch("reserve must be nonnegative");
  if (blocks.kind() == FluidKind::poisson && blocks.model().kind() == FamilyKind::stationary) {
    const MphBlock b = blocks.model().block(1);
    const RiccatiSolution sol = riccati_psi_hat(b.A, b.D, blocks.lambda(), blocks.premium(), 0.0, 1e-13);
    if (is_psi_stochastic(sol.psi)) return UltimateRuin{1.0, 0};
  }
  SolverWorkspace ws(blocks, 0.0);
  std::size_t s = std::max<std::size_t>(options.start, 1);
  if (s > options.cap) throw TruncationLimit("initial truncation exceeds the cap", 0.0, 0);
  ws.extend(s);
  double prev = ws.transform(u, 0.0, s);
  for (;;) {
    const std::size_t next = 2 * s;
    if (next > options.cap || ws.projected_bytes(next) > options.max_bytes)
      throw TruncationLimit("ultimate ruin did not converge before s = " + std::to_string(s), prev, s);
    ws.extend(next);
    const double cur = ws.transform(u, 0.0, next);
    if (std::abs(cur - prev) < tol) return UltimateRuin{cur, next};
    prev = cur;
    s = next;
  }
}

}  // namespace ruinkit
