#pragma once

#include <cstddef>

#include "ruinkit/mph.hpp"

namespace ruinkit {

/// Envelope of the claim blocks: dimensions at most p, exit rates at most nu,
/// dominant eigenvalues at most -sigma.
struct BoundParams {
  int p;
  double nu;
  double sigma;
};

/// Scans blocks 1..k_max.  Parametric families must have monotone parameter
/// sequences for the scan to capture the supremum.
BoundParams bound_params(const MphModel& model, std::size_t k_max = 64);

/// Ultimate ruin with Exp(nu) claims: min(1, lambda/(c nu) e^{-(nu - lambda/c) u}).
double exp_claims_ruin(double u, double lambda, double c, double nu);

/// Ultimate ruin with i.i.d. Erlang(p, sigma) claims, through the stationary
/// Riccati solution.
double erlang_claims_ruin(double u, double lambda, double c, int p, double sigma, double tol = 1e-12);

struct RuinBounds {
  double lower;
  double upper;
  BoundParams params;
};

/// lower <= P(ultimate ruin) <= upper for Poisson(lambda) arrivals and premium c.
RuinBounds ruin_bounds(const MphModel& model, double lambda, double c, double u, std::size_t k_max = 64);

}  // namespace ruinkit
