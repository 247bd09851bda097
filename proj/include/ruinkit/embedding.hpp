#pragma once

#include <cstddef>
#include <memory>
#include <optional>

#include "ruinkit/linalg.hpp"
#include "ruinkit/mph.hpp"
#include "ruinkit/phasetype.hpp"

namespace ruinkit {

enum class FluidKind { poisson, environment, ph_arrival };

/// Blocks of the embedded fluid generator at claim index k.
///
/// Up phases of index k ascend at the rates in `up_rates`; down phases
/// descend at unit rate.  V (up->up) and W (up->down) stay within index k,
/// F sends down phases of index k to up phases of index k+1, G is down->down.
struct FluidLevel {
  Matrix V;
  Matrix W;
  Matrix F;
  Matrix G;
  Vector up_rates;
};

/// Markov random environment driving claim intensity and premium rate.
struct Environment {
  Matrix generator;
  RowVector initial;
  Vector lambda;
  Vector premium;
};

/// Lazily produced blocks of the fluid embedding of a risk process.
///
/// Kronecker products always put the environment (or arrival stage) index
/// slowest and the claim phase fastest.
class FluidBlocks {
 public:
  FluidKind kind() const { return kind_; }
  const MphModel& model() const { return *model_; }
  /// Initial distribution over the up phases of index 1.
  const RowVector& initial() const { return initial_; }

  FluidLevel level(std::size_t k) const;

  /// Poisson kind only.
  double lambda() const { return lambda_; }
  /// Poisson and PH-arrival kinds only.
  double premium() const { return premium_; }
  const std::optional<Environment>& environment() const { return environment_; }
  const std::optional<PhaseTypeRep>& arrival() const { return arrival_; }

  friend FluidBlocks build_poisson(const MphModel& model, double lambda, double c);
  friend FluidBlocks build_environment(const MphModel& model, const Environment& env);
  friend FluidBlocks build_ph_arrival(const MphModel& model, const PhaseTypeRep& arrival, double c);

 private:
  FluidKind kind_ = FluidKind::poisson;
  std::shared_ptr<const MphModel> model_;
  RowVector initial_;
  double lambda_ = 0.0;
  double premium_ = 0.0;
  std::optional<Environment> environment_;
  std::optional<PhaseTypeRep> arrival_;
};

/// V = -lambda I, W = lambda I, F = D_k, G = A_k, up rates c.
FluidBlocks build_poisson(const MphModel& model, double lambda, double c);

/// V = (Theta - L) (x) I, W = L (x) I, F = I (x) D_k, G = I (x) A_k,
/// up rates diag(c_i) (x) I, initial q (x) alpha.
FluidBlocks build_environment(const MphModel& model, const Environment& env);

/// PH(gamma, U) inter-arrival times: V = U (x) I, W = u (x) I,
/// F = gamma (x) D_k, G = A_k, up rates c, initial gamma (x) alpha.
FluidBlocks build_ph_arrival(const MphModel& model, const PhaseTypeRep& arrival, double c);

/// Assembles the generator restricted to the first s indices, ordered
/// [up_1, down_1, up_2, down_2, ...].  Used to check generator closure.
Matrix assemble_generator(const FluidBlocks& blocks, std::size_t s);

}  // namespace ruinkit
