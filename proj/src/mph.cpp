#include "ruinkit/mph.hpp"

#include <string>

#include "ruinkit/errors.hpp"

namespace ruinkit {

MphModel MphModel::stationary(RowVector alpha, Matrix A, Matrix D) {
  MphModel model(FamilyKind::stationary, std::move(alpha));
  model.list_ = std::make_shared<const std::vector<MphBlock>>(
      std::vector<MphBlock>{MphBlock{std::move(A), std::move(D)}});
  return model;
}

MphModel MphModel::explicit_list(RowVector alpha, std::vector<MphBlock> blocks) {
  if (blocks.empty()) throw DimensionMismatch("explicit block list is empty");
  MphModel model(FamilyKind::explicit_list, std::move(alpha));
  model.list_ = std::make_shared<const std::vector<MphBlock>>(std::move(blocks));
  return model;
}

MphModel MphModel::parametric(RowVector alpha, Generator generator) {
  MphModel model(FamilyKind::parametric, std::move(alpha));
  model.generator_ = std::move(generator);
  return model;
}

MphBlock MphModel::block(std::size_t k) const {
  if (k < 1) throw DimensionMismatch("block index is 1-based");
  if (kind_ == FamilyKind::parametric) return generator_(k);
  const auto& list = *list_;
  return list[std::min(k, list.size()) - 1];
}

void MphModel::validate(std::size_t depth) const {
  validate_probability(alpha_);
  Eigen::Index expected_rows = alpha_.size();
  for (std::size_t k = 1; k <= depth; ++k) {
    const MphBlock b = block(k);
    const std::string where = "block " + std::to_string(k) + ": ";
    if (b.A.rows() != expected_rows)
      throw DimensionMismatch(where + "A_k size does not match the incoming dimension");
    if (b.D.rows() != b.A.rows()) throw DimensionMismatch(where + "D_k rows do not match A_k");
    try {
      validate_subgenerator(b.A);
    } catch (const InvalidSubgenerator& e) {
      throw InvalidSubgenerator(where + e.what());
    }
    if (b.D.size() > 0 && b.D.minCoeff() < 0.0) throw InvalidSubgenerator(where + "D_k has a negative entry");
    const double closure = (b.A.rowwise().sum() + b.D.rowwise().sum()).cwiseAbs().maxCoeff();
    if (closure > kValidationTol * std::max(1.0, max_abs(b.A)))
      throw InvalidSubgenerator(where + "A_k 1 + D_k 1 != 0");
    expected_rows = b.D.cols();
  }
}

std::vector<RowVector> marginal_vectors(const MphModel& model, std::size_t n) {
  std::vector<RowVector> gammas;
  gammas.reserve(n);
  RowVector g = model.alpha();
  for (std::size_t k = 1; k <= n; ++k) {
    gammas.push_back(g);
    if (k == n) break;
    const MphBlock b = model.block(k);
    g = solve_right(g, -b.A) * b.D;
  }
  return gammas;
}

PhaseTypeRep marginal_rep(const MphModel& model, std::size_t k) {
  auto gammas = marginal_vectors(model, k);
  return PhaseTypeRep{std::move(gammas.back()), model.block(k).A};
}

double joint_density(const MphModel& model, const std::vector<double>& y) {
  if (y.empty()) throw DimensionMismatch("joint density needs at least one coordinate");
  RowVector v = model.alpha();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const MphBlock b = model.block(i + 1);
    v = v * expm(b.A * y[i]);
    if (i + 1 < y.size())
      v = v * b.D;
    else
      return std::max(0.0, (v * (-b.A.rowwise().sum()))(0));
  }
  return 0.0;
}

double covariance(const MphModel& model, std::size_t k, std::size_t l) {
  if (k < 1 || l < k) throw DimensionMismatch("covariance needs 1 <= k <= l");
  const auto gammas = marginal_vectors(model, l);
  if (k == l) return ph_variance(PhaseTypeRep{gammas[k - 1], model.block(k).A});

  const MphBlock bk = model.block(k);
  const Resolvent neg_ak(-bk.A);
  const double mean_k = neg_ak.apply_right(gammas[k - 1]).sum();
  RowVector v = neg_ak.apply_right(neg_ak.apply_right(gammas[k - 1])) * bk.D;
  for (std::size_t j = k + 1; j < l; ++j) {
    const MphBlock bj = model.block(j);
    v = solve_right(v, -bj.A) * bj.D;
  }
  const Matrix al = model.block(l).A;
  const Resolvent neg_al(-al);
  const double cross = neg_al.apply_right(v).sum();
  const double mean_l = neg_al.apply_right(gammas[l - 1]).sum();
  return cross - mean_k * mean_l;
}

double correlation(const MphModel& model, std::size_t k, std::size_t l) {
  if (k > l) std::swap(k, l);
  if (k == l) return 1.0;
  return covariance(model, k, l) / std::sqrt(covariance(model, k, k) * covariance(model, l, l));
}

double laplace(const MphModel& model, const std::vector<double>& theta) {
  if (theta.empty()) return 1.0;
  RowVector v = model.alpha();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] < 0.0) throw DimensionMismatch("Laplace argument must be nonnegative");
    const MphBlock b = model.block(i + 1);
    const Matrix shifted = theta[i] * Matrix::Identity(b.A.rows(), b.A.cols()) - b.A;
    v = solve_right(v, shifted);
    if (i + 1 < theta.size())
      v = v * b.D;
    else
      return (v * (-b.A.rowwise().sum()))(0);
  }
  return 0.0;
}

MphModel build_independent(const std::vector<PhaseTypeRep>& reps) {
  if (reps.empty()) throw DimensionMismatch("independent model needs at least one law");
  std::vector<MphBlock> blocks;
  blocks.reserve(reps.size());
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const auto& next = reps[std::min(k + 1, reps.size() - 1)];
    blocks.push_back(MphBlock{reps[k].A, reps[k].exit_vector() * next.alpha});
  }
  return MphModel::explicit_list(reps.front().alpha, std::move(blocks));
}

MphModel build_two_regime(const PhaseTypeRep& B, const PhaseTypeRep& G, double r, Sequence r_k,
                          Sequence p_k) {
  if (!(r >= 0.0 && r <= 1.0)) throw NonStochasticInitial("r outside [0,1]");
  const Eigen::Index nb = B.size(), ng = G.size();
  Matrix A = Matrix::Zero(nb + ng, nb + ng);
  A.topLeftCorner(nb, nb) = B.A;
  A.bottomRightCorner(ng, ng) = G.A;
  RowVector alpha(nb + ng);
  alpha << r * B.alpha, (1.0 - r) * G.alpha;

  const Matrix bb = B.exit_vector() * B.alpha;
  const Matrix bg = B.exit_vector() * G.alpha;
  const Matrix gb = G.exit_vector() * B.alpha;
  const Matrix gg = G.exit_vector() * G.alpha;
  auto generator = [A, bb, bg, gb, gg, nb, ng, r_k = std::move(r_k), p_k = std::move(p_k)](std::size_t k) {
    const double rk = r_k(k), pk = p_k(k);
    if (!(rk >= 0.0 && rk <= 1.0 && pk >= 0.0 && pk <= 1.0))
      throw NonStochasticInitial("r_k or p_k outside [0,1] at k=" + std::to_string(k));
    Matrix D(nb + ng, nb + ng);
    D << rk * bb, (1.0 - rk) * bg, (1.0 - pk) * gb, pk * gg;
    return MphBlock{A, std::move(D)};
  };
  return MphModel::parametric(std::move(alpha), std::move(generator));
}

Matrix upper_uniform_matrix(int m) {
  const int n = m - 1;
  Matrix P = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) P(i, j) = 1.0 / (n - i);
  return P;
}

MphModel build_stage_cascade(int m, Sequence mu_k, Sequence p_k, const Matrix& P,
                             std::function<RowVector(std::size_t)> beta_k, const RowVector& alpha) {
  if (m < 2) throw DimensionMismatch("stage cascade needs m >= 2");
  if (P.rows() != m - 1 || P.cols() != m - 1) throw DimensionMismatch("P must be (m-1)x(m-1)");
  if (alpha.size() != m) throw DimensionMismatch("alpha must have m entries");
  for (Eigen::Index i = 0; i < P.rows(); ++i) validate_probability(P.row(i), "row of P");

  auto generator = [m, P, mu_k = std::move(mu_k), p_k = std::move(p_k),
                    beta_k = std::move(beta_k)](std::size_t k) {
    const double mu = mu_k(k), p = p_k(k);
    if (!(mu > 0.0)) throw InvalidSubgenerator("mu_k must be positive at k=" + std::to_string(k));
    if (!(p > 0.0 && p < 1.0)) throw NonStochasticInitial("p_k outside (0,1) at k=" + std::to_string(k));
    const RowVector beta = beta_k(k);
    if (beta.size() != m - 1) throw DimensionMismatch("beta_k must have m-1 entries");
    Matrix A = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      A(i, i) = -mu;
      if (i + 1 < m) A(i, i + 1) = mu * p;
    }
    Matrix D = Matrix::Zero(m, m);
    D.topLeftCorner(m - 1, m - 1) = mu * (1.0 - p) * P;
    D.block(m - 1, 0, 1, m - 1) = mu * beta;
    return MphBlock{std::move(A), std::move(D)};
  };
  return MphModel::parametric(alpha, std::move(generator));
}

ClaimSampler::ClaimSampler(const MphModel& model, std::size_t depth) : alpha_(model.alpha()) {
  const std::size_t n = std::max<std::size_t>(depth, 1);
  tables_.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const MphBlock b = model.block(k);
    tables_.emplace_back(b.A, b.D);
    if (model.kind() == FamilyKind::stationary) break;
  }
}

}  // namespace ruinkit
