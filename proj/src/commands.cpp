#include "ruinkit/commands.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <vector>

#include "ruinkit/bounds.hpp"
#include "ruinkit/errors.hpp"
#include "ruinkit/simulate.hpp"
#include "ruinkit/solver.hpp"

namespace ruinkit {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// The fixed point stops on the step size, which near criticality understates
// the error by the factor 1/(1 - rate); a tight stop keeps row sums accurate.
constexpr double kRiccatiTol = 1e-13;

enum class Axis { none, u, c, s };

Axis grid_axis(const RunConfig& cfg) {
  const int grids = int(cfg.process.u.is_grid()) + int(cfg.process.c.is_grid()) + int(cfg.query.s.is_grid());
  if (grids > 1) throw ConfigError("process", "at most one of process.u, process.c and query.s may be a grid");
  if (cfg.process.u.is_grid()) return Axis::u;
  if (cfg.process.c.is_grid()) return Axis::c;
  if (cfg.query.s.is_grid()) return Axis::s;
  return Axis::none;
}

void require_scalars(const RunConfig& cfg) {
  if (grid_axis(cfg) != Axis::none) throw ConfigError("process", "this command takes a single point, not a grid");
}

std::size_t as_count(double s) { return static_cast<std::size_t>(s); }

MphBlock stationary_block(const RunConfig& cfg, const MphModel& model) {
  if (cfg.process.kind != ProcessSpec::Kind::poisson)
    throw ConfigError("query.method", "the stationary method needs Poisson arrivals");
  if (model.kind() != FamilyKind::stationary)
    throw ConfigError("query.method",
                      "the stationary method needs a level-homogeneous model (kind stationary, or constant "
                      "parameter sequences)");
  return model.block(1);
}

void cmd_describe(const RunConfig& cfg, const MphModel& model, std::ostream& out) {
  const std::size_t n = cfg.command.depth;
  std::vector<PhaseTypeRep> reps;
  const auto gammas = marginal_vectors(model, n + 1);
  for (std::size_t k = 1; k <= n + 1; ++k) reps.push_back(PhaseTypeRep{gammas[k - 1], model.block(k).A});

  out << "k,mean,variance,corr_next";
  if (cfg.command.correlation_matrix)
    for (std::size_t l = 1; l <= n; ++l) out << ",corr_" << l;
  out << '\n';
  for (std::size_t k = 1; k <= n; ++k) {
    out << k << ',' << num(ph_mean(reps[k - 1])) << ',' << num(ph_variance(reps[k - 1])) << ','
        << num(correlation(model, k, k + 1));
    if (cfg.command.correlation_matrix)
      for (std::size_t l = 1; l <= n; ++l)
        out << ',' << num(l == k ? 1.0 : correlation(model, std::min(k, l), std::max(k, l)));
    out << '\n';
  }
}

void cmd_ruin(const RunConfig& cfg, const MphModel& model, std::ostream& out) {
  if (cfg.query.theta != 0.0) throw ConfigError("query.theta", "ruin curves use theta = 0; use transform");
  if (cfg.query.y != 0.0) throw ConfigError("query.y", "ruin curves use y = 0; use transform");
  const Axis axis = grid_axis(cfg);
  const std::string& method = cfg.query.method;
  if (method != "truncated" && axis == Axis::s)
    throw ConfigError("query.s", "an s-grid needs the truncated method");

  const char* axis_name = axis == Axis::c ? "c" : axis == Axis::s ? "s" : "u";
  out << axis_name << ",ruin_probability";
  if (method == "ultimate") out << ",truncation";
  if (method == "stationary") out << ",psi_stochastic";
  out << '\n';

  const std::vector<double> cs = cfg.process.c.values();
  const std::vector<double> us = cfg.process.u.values();
  const std::vector<double> ss = cfg.query.s.values();

  if (method == "truncated") {
    if (axis == Axis::c) {
      for (double c : cs) {
        SolverWorkspace ws(cfg.process.build(model, c), 0.0);
        ws.extend(as_count(ss[0]));
        out << num(c) << ',' << num(ws.transform(us[0], 0.0, as_count(ss[0]))) << '\n' << std::flush;
      }
      return;
    }
    SolverWorkspace ws(cfg.process.build(model, cs[0]), 0.0);
    if (axis == Axis::s) {
      std::size_t s_max = 0;
      for (double s : ss) s_max = std::max(s_max, as_count(s));
      ws.extend(s_max);
      for (double s : ss) out << as_count(s) << ',' << num(ws.transform(us[0], 0.0, as_count(s))) << '\n';
      return;
    }
    ws.extend(as_count(ss[0]));
    const auto values = ws.transform_u_grid(us, 0.0, as_count(ss[0]));
    for (std::size_t i = 0; i < us.size(); ++i) out << num(us[i]) << ',' << num(values[i]) << '\n';
    return;
  }

  if (method == "ultimate") {
    UltimateRuinOptions opts;
    opts.cap = cfg.query.s_cap;
    opts.start = std::min<std::size_t>(opts.start, opts.cap);
    for (double c : cs)
      for (double u : us) {
        const UltimateRuin r = ultimate_ruin(cfg.process.build(model, c), u, cfg.query.tol, opts);
        out << num(axis == Axis::c ? c : u) << ',' << num(r.probability) << ',' << r.truncation << '\n'
            << std::flush;
      }
    return;
  }

  const MphBlock b = stationary_block(cfg, model);
  const double lambda = cfg.process.lambda;
  for (double c : cs) {
    const RiccatiSolution sol = riccati_psi_hat(b.A, b.D, lambda, c, 0.0, kRiccatiTol);
    const bool certain = is_psi_stochastic(sol.psi);
    for (double u : us) {
      const double v = stationary_transform(b.A, b.D, model.alpha(), lambda, c, u, 0.0, 0.0, kRiccatiTol);
      out << num(axis == Axis::c ? c : u) << ',' << num(v) << ',' << (certain ? "true" : "false") << '\n';
    }
  }
}

void cmd_transform(const RunConfig& cfg, const MphModel& model, std::ostream& out) {
  require_scalars(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const FluidBlocks blocks = cfg.process.build(model, cfg.process.c.value);
  const RuinQuery q{cfg.process.u.value, cfg.query.theta, as_count(cfg.query.s.value), cfg.query.y};
  double value = 0.0;
  std::string truncation;
  if (cfg.query.method == "truncated") {
    value = ruin_transform(blocks, q);
    truncation = std::to_string(q.s);
  } else if (cfg.query.method == "ultimate") {
    if (q.theta != 0.0 || q.y != 0.0)
      throw ConfigError("query.method", "the ultimate method needs theta = 0 and y = 0");
    UltimateRuinOptions opts;
    opts.cap = cfg.query.s_cap;
    opts.start = std::min<std::size_t>(opts.start, opts.cap);
    const UltimateRuin r = ultimate_ruin(blocks, q.u, cfg.query.tol, opts);
    value = r.probability;
    truncation = std::to_string(r.truncation);
  } else {
    const MphBlock b = stationary_block(cfg, model);
    value = stationary_transform(b.A, b.D, model.alpha(), cfg.process.lambda, cfg.process.c.value, q.u, q.theta,
                                 q.y, kRiccatiTol);
    truncation = "inf";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "value,truncation,elapsed_seconds\n" << num(value) << ',' << truncation << ',' << num(elapsed) << '\n';
}

void cmd_bounds(const RunConfig& cfg, const MphModel& model, std::ostream& out) {
  if (cfg.process.kind != ProcessSpec::Kind::poisson)
    throw ConfigError("process", "bounds need Poisson arrivals (process.lambda)");
  if (cfg.query.s.is_grid()) throw ConfigError("query.s", "bounds do not take an s-grid");
  grid_axis(cfg);
  out << "c,u,p,nu,sigma,lower,upper,ruin_certain\n";
  for (double c : cfg.process.c.values())
    for (double u : cfg.process.u.values()) {
      const RuinBounds b = ruin_bounds(model, cfg.process.lambda, c, u, cfg.command.k_max);
      out << num(c) << ',' << num(u) << ',' << b.params.p << ',' << num(b.params.nu) << ',' << num(b.params.sigma)
          << ',' << num(b.lower) << ',' << num(b.upper) << ',' << (b.lower >= 1.0 ? "true" : "false") << '\n';
    }
}

void cmd_simulate(const RunConfig& cfg, const MphModel& model, std::ostream& out) {
  require_scalars(cfg);
  const FluidBlocks blocks = cfg.process.build(model, cfg.process.c.value);
  const RuinQuery q{cfg.process.u.value, cfg.query.theta, as_count(cfg.query.s.value), cfg.query.y};
  const Estimate e = estimate_transform(blocks, q, cfg.command.n_paths, cfg.command.seed);
  out << "value,std_error,n_paths,seed\n"
      << num(e.value) << ',' << num(e.std_error) << ',' << e.n_paths << ',' << cfg.command.seed << '\n';
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const MphModel model = cfg.model.build();
    if (command == "describe")
      cmd_describe(cfg, model, out);
    else if (command == "ruin")
      cmd_ruin(cfg, model, out);
    else if (command == "transform")
      cmd_transform(cfg, model, out);
    else if (command == "bounds")
      cmd_bounds(cfg, model, out);
    else if (command == "simulate")
      cmd_simulate(cfg, model, out);
    else
      throw ConfigError("(command)", "unknown command " + command);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationLimit& e) {
    err << "truncation limit: " << e.what() << " (last value " << num(e.last_value()) << " at s = "
        << e.last_truncation() << ")\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int execute(const std::string& command, const std::string& config_path, const std::optional<std::string>& out_path,
            std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed) cfg.command.seed = *seed;
  const std::optional<std::string> path = out_path ? out_path : cfg.command.out;
  if (!path) return run_command(command, cfg, out, err);
  std::ofstream file(*path);
  if (!file) {
    err << "config error: command.out: cannot write " << *path << '\n';
    return kExitConfig;
  }
  return run_command(command, cfg, file, err);
}

}  // namespace ruinkit
