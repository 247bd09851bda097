#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruinkit/embedding.hpp"
#include "ruinkit/linalg.hpp"
#include "ruinkit/mph.hpp"
#include "ruinkit/phasetype.hpp"

namespace ruinkit {

/// Inclusive linear grid of `count` points.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;
  std::vector<double> values() const;
};

/// A scalar, or a grid in its place.
struct ScalarOrGrid {
  double value = 0.0;
  std::optional<GridSpec> grid;
  bool is_grid() const { return grid.has_value(); }
  std::vector<double> values() const { return grid ? grid->values() : std::vector<double>{value}; }
};

/// PH law given as {"kind": "exp", "rate"}, {"kind": "erlang", "stages",
/// "rate"} or {"kind": "matrix", "alpha", "A"}.
struct PhSpec {
  std::string kind = "exp";
  double rate = 1.0;
  int stages = 1;
  RowVector alpha;
  Matrix A;
  PhaseTypeRep build() const;
};

/// Indexed parameter k -> value.  JSON forms: a number (constant), an array
/// (entry k, the last one repeating) or {"base": a, "slope": b} meaning
/// a + b k/(k+1).
struct SequenceSpec {
  enum class Form { constant, list, hyperbolic };
  Form form = Form::constant;
  double base = 0.0;
  double slope = 0.0;
  std::vector<double> values;
  double at(std::size_t k) const;
  bool is_constant() const { return form == Form::constant || (form == Form::list && values.size() == 1); }
};

struct ModelSpec {
  std::string kind;
  // independent
  std::vector<PhSpec> claims;
  std::shared_ptr<ModelSpec> marginals_of;
  std::size_t count = 0;
  // two-regime
  PhSpec regular;
  PhSpec severe;
  double r = 1.0;
  SequenceSpec r_k;
  SequenceSpec p_k;
  // stage-cascade (p_k shared with two-regime)
  int m = 2;
  SequenceSpec mu_k;
  std::optional<Matrix> P;  // upper-uniform when absent
  std::optional<RowVector> beta;  // e_1 when absent
  // stage-cascade, stationary and explicit
  std::optional<RowVector> alpha;
  Matrix A;
  Matrix D;
  std::vector<MphBlock> blocks;

  MphModel build() const;
};

struct EnvironmentSpec {
  Matrix generator;
  RowVector initial;
  Vector lambda;
  Vector c;
};

struct ProcessSpec {
  enum class Kind { poisson, environment, ph_arrival };
  Kind kind = Kind::poisson;
  double lambda = 1.0;
  ScalarOrGrid c{1.0, std::nullopt};
  ScalarOrGrid u{0.0, std::nullopt};
  EnvironmentSpec environment;
  PhSpec arrival;

  /// Blocks at premium rate c (ignored for the environment kind).
  FluidBlocks build(const MphModel& model, double c) const;
};

struct QuerySpec {
  double theta = 0.0;
  ScalarOrGrid s{1.0, std::nullopt};
  double y = 0.0;
  double tol = 1e-6;
  /// "truncated", "ultimate" or "stationary".
  std::string method = "truncated";
  std::size_t s_cap = std::size_t{1} << 14;
};

struct CommandSpec {
  std::optional<std::string> out;
  std::uint64_t seed = 1;
  std::size_t n_paths = 200000;
  std::size_t depth = 8;
  bool correlation_matrix = false;
  std::size_t k_max = 64;
};

struct RunConfig {
  ModelSpec model;
  ProcessSpec process;
  QuerySpec query;
  CommandSpec command;
};

/// Parses and validates a JSON document.  Every failure, including unknown
/// fields and invalid model parameters, throws ConfigError naming the field
/// path (for example "model.regular.rate").
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Serializes to JSON text; parse_config(to_json(c)) reproduces c.
std::string to_json(const RunConfig& config);

}  // namespace ruinkit
