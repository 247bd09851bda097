#include "ruinkit/embedding.hpp"

#include <string>

#include "ruinkit/errors.hpp"

namespace ruinkit {

namespace {

void validate_environment(const Environment& env) {
  const Eigen::Index n = env.generator.rows();
  if (n == 0 || env.generator.cols() != n) throw DimensionMismatch("environment generator must be square");
  if (env.initial.size() != n || env.lambda.size() != n || env.premium.size() != n)
    throw DimensionMismatch("environment vectors must match the generator size");
  validate_probability(env.initial, "environment initial vector");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && env.generator(i, j) < 0.0)
        throw InvalidSubgenerator("environment generator has a negative off-diagonal entry");
    if (std::abs(env.generator.row(i).sum()) > kValidationTol * std::max(1.0, max_abs(env.generator)))
      throw InvalidSubgenerator("environment generator row " + std::to_string(i) + " does not sum to 0");
    if (!(env.lambda(i) > 0.0)) throw InvalidSubgenerator("environment claim rates must be positive");
    if (!(env.premium(i) > 0.0)) throw InvalidSubgenerator("environment premium rates must be positive");
  }
}

}  // namespace

FluidBlocks build_poisson(const MphModel& model, double lambda, double c) {
  if (!(lambda > 0.0)) throw InvalidSubgenerator("claim rate lambda must be positive");
  if (!(c > 0.0)) throw InvalidSubgenerator("premium rate c must be positive");
  FluidBlocks out;
  out.kind_ = FluidKind::poisson;
  out.model_ = std::make_shared<const MphModel>(model);
  out.initial_ = model.alpha();
  out.lambda_ = lambda;
  out.premium_ = c;
  return out;
}

FluidBlocks build_environment(const MphModel& model, const Environment& env) {
  validate_environment(env);
  FluidBlocks out;
  out.kind_ = FluidKind::environment;
  out.model_ = std::make_shared<const MphModel>(model);
  out.initial_ = kron(env.initial, model.alpha());
  out.environment_ = env;
  return out;
}

FluidBlocks build_ph_arrival(const MphModel& model, const PhaseTypeRep& arrival, double c) {
  validate_ph(arrival);
  if (!(c > 0.0)) throw InvalidSubgenerator("premium rate c must be positive");
  FluidBlocks out;
  out.kind_ = FluidKind::ph_arrival;
  out.model_ = std::make_shared<const MphModel>(model);
  out.initial_ = kron(arrival.alpha, model.alpha());
  out.premium_ = c;
  out.arrival_ = arrival;
  return out;
}

FluidLevel FluidBlocks::level(std::size_t k) const {
  const MphBlock b = model_->block(k);
  const Eigen::Index p = b.A.rows();
  const Matrix ip = Matrix::Identity(p, p);
  FluidLevel lv;
  switch (kind_) {
    case FluidKind::poisson:
      lv.V = -lambda_ * ip;
      lv.W = lambda_ * ip;
      lv.F = b.D;
      lv.G = b.A;
      lv.up_rates = Vector::Constant(p, premium_);
      break;
    case FluidKind::environment: {
      const auto& env = *environment_;
      const Eigen::Index n = env.generator.rows();
      const Matrix L = env.lambda.asDiagonal();
      const Matrix in = Matrix::Identity(n, n);
      lv.V = kron(env.generator - L, ip);
      lv.W = kron(L, ip);
      lv.F = kron(in, b.D);
      lv.G = kron(in, b.A);
      lv.up_rates = kron(Matrix(env.premium), Matrix(Vector::Ones(p)));
      break;
    }
    case FluidKind::ph_arrival: {
      const auto& arr = *arrival_;
      lv.V = kron(arr.A, ip);
      lv.W = kron(Matrix(arr.exit_vector()), ip);
      lv.F = kron(Matrix(arr.alpha), b.D);
      lv.G = b.A;
      lv.up_rates = Vector::Constant(arr.size() * p, premium_);
      break;
    }
  }
  return lv;
}

Matrix assemble_generator(const FluidBlocks& blocks, std::size_t s) {
  std::vector<FluidLevel> levels;
  levels.reserve(s);
  Eigen::Index total = 0;
  for (std::size_t k = 1; k <= s; ++k) {
    levels.push_back(blocks.level(k));
    total += levels.back().V.rows() + levels.back().G.rows();
  }
  Matrix Q = Matrix::Zero(total, total);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < s; ++k) {
    const auto& lv = levels[k];
    const Eigen::Index up = lv.V.rows(), down = lv.G.rows();
    Q.block(off, off, up, up) = lv.V;
    Q.block(off, off + up, up, down) = lv.W;
    Q.block(off + up, off + up, down, down) = lv.G;
    if (k + 1 < s) Q.block(off + up, off + up + down, down, lv.F.cols()) = lv.F;
    off += up + down;
  }
  return Q;
}

}  // namespace ruinkit
