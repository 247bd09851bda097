#include "ruinkit/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ruinkit/errors.hpp"
#include "ruinkit/solver.hpp"

namespace ruinkit {

BoundParams bound_params(const MphModel& model, std::size_t k_max) {
  if (k_max < 1) throw DimensionMismatch("k_max must be at least 1");
  BoundParams out{0, 0.0, 0.0};
  bool first = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const Matrix A = model.block(k).A;
    const double sigma = -dominant_eigenvalue(A);
    out.p = std::max(out.p, static_cast<int>(A.rows()));
    out.nu = std::max(out.nu, max_exit_rate(A));
    out.sigma = first ? sigma : std::min(out.sigma, sigma);
    first = false;
    if (model.kind() == FamilyKind::stationary) break;
  }
  return out;
}

double exp_claims_ruin(double u, double lambda, double c, double nu) {
  if (!(nu > 0.0) || !(lambda > 0.0) || !(c > 0.0)) throw DimensionMismatch("rates must be positive");
  if (!(u >= 0.0)) throw DimensionMismatch("reserve must be nonnegative");
  if (lambda >= c * nu) return 1.0;
  return std::min(1.0, lambda / (c * nu) * std::exp(-(nu - lambda / c) * u));
}

double erlang_claims_ruin(double u, double lambda, double c, int p, double sigma, double tol) {
  if (p < 1 || !(sigma > 0.0)) throw DimensionMismatch("Erlang envelope needs p >= 1 and sigma > 0");
  if (!(u >= 0.0)) throw DimensionMismatch("reserve must be nonnegative");
  if (lambda * p / sigma >= c) return 1.0;
  const PhaseTypeRep h = erlang(p, sigma);
  const Matrix D = h.exit_vector() * h.alpha;
  return stationary_transform(h.A, D, h.alpha, lambda, c, u, 0.0, 0.0, tol);
}

RuinBounds ruin_bounds(const MphModel& model, double lambda, double c, double u, std::size_t k_max) {
  const BoundParams bp = bound_params(model, k_max);
  const double lower = exp_claims_ruin(u, lambda, c, bp.nu);
  const double upper = erlang_claims_ruin(u, lambda, c, bp.p, bp.sigma);
  return RuinBounds{lower, upper, bp};
}

}  // namespace ruinkit
