#include "ruinkit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ruinkit/errors.hpp"

namespace ruinkit {

using json = nlohmann::json;

namespace {

/// Read cursor over one JSON value that remembers its path and, for objects,
/// which keys were consumed.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }

  void expect_object() const {
    if (!j_->is_object()) fail("expected an object");
  }
  bool has(const std::string& key) const {
    expect_object();
    return j_->contains(key);
  }
  Node at(const std::string& key) const {
    expect_object();
    auto it = j_->find(key);
    if (it == j_->end()) throw ConfigError(child(key), "missing required field");
    seen_.insert(key);
    return Node(*it, child(key));
  }
  std::optional<Node> get(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return at(key);
  }
  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(child(it.key()), "unknown field");
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  Node operator[](std::size_t i) const {
    return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double nonneg() const {
    const double v = number();
    if (v < 0.0) fail("must be nonnegative");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }
  std::size_t count(std::size_t min = 1) const {
    if (!j_->is_number_integer() && !(j_->is_number() && std::floor(number()) == number()))
      fail("expected an integer");
    const double v = number();
    if (v < static_cast<double>(min)) fail("must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }
  std::uint64_t uint64() const {
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<std::int64_t>() >= 0))
      fail("expected a nonnegative integer");
    return j_->get<std::uint64_t>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  RowVector row_vector() const {
    const std::size_t n = size();
    if (n == 0) fail("expected a nonempty array");
    RowVector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = (*this)[i].number();
    return v;
  }
  Matrix matrix() const {
    const std::size_t n = size();
    if (n == 0) fail("expected a nonempty array of rows");
    const std::size_t m = (*this)[0].size();
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
      const Node row = (*this)[i];
      if (row.size() != m) row.fail("row length differs from row 0");
      for (std::size_t j = 0; j < m; ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].number();
    }
    return out;
  }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

GridSpec parse_grid(const Node& n) {
  GridSpec g;
  g.start = n.at("start").number();
  g.stop = n.at("stop").number();
  g.count = n.at("count").count(1);
  n.finish();
  if (g.count == 1 && g.start != g.stop) n.fail("a one-point grid needs start == stop");
  return g;
}

ScalarOrGrid parse_scalar_or_grid(const Node& n) {
  ScalarOrGrid out;
  if (n.raw().is_object())
    out.grid = parse_grid(n);
  else
    out.value = n.number();
  return out;
}

PhSpec parse_ph(const Node& n) {
  PhSpec ph;
  ph.kind = n.at("kind").string();
  if (ph.kind == "exp") {
    ph.rate = n.at("rate").positive();
  } else if (ph.kind == "erlang") {
    ph.stages = static_cast<int>(n.at("stages").count(1));
    ph.rate = n.at("rate").positive();
  } else if (ph.kind == "matrix") {
    ph.alpha = n.at("alpha").row_vector();
    ph.A = n.at("A").matrix();
  } else {
    throw ConfigError(n.path() + ".kind", "expected exp, erlang or matrix");
  }
  n.finish();
  wrap(n.path(), [&] { return ph.build(); });
  return ph;
}

SequenceSpec parse_sequence(const Node& n) {
  SequenceSpec s;
  if (n.raw().is_number()) {
    s.form = SequenceSpec::Form::constant;
    s.base = n.number();
  } else if (n.raw().is_array()) {
    s.form = SequenceSpec::Form::list;
    const RowVector v = n.row_vector();
    s.values.assign(v.data(), v.data() + v.size());
  } else if (n.raw().is_object()) {
    s.form = SequenceSpec::Form::hyperbolic;
    s.base = n.at("base").number();
    s.slope = n.at("slope").number();
    n.finish();
  } else {
    n.fail("expected a number, an array or {base, slope}");
  }
  return s;
}

ModelSpec parse_model(const Node& n) {
  ModelSpec m;
  m.kind = n.at("kind").string();
  if (m.kind == "independent") {
    if (n.has("claims") == n.has("marginals_of")) n.fail("give exactly one of claims or marginals_of");
    if (auto c = n.get("claims")) {
      if (c->size() == 0) c->fail("expected a nonempty array");
      for (std::size_t i = 0; i < c->size(); ++i) m.claims.push_back(parse_ph((*c)[i]));
    } else {
      m.marginals_of = std::make_shared<ModelSpec>(parse_model(n.at("marginals_of")));
      m.count = n.at("count").count(1);
    }
  } else if (m.kind == "two-regime") {
    m.regular = parse_ph(n.at("regular"));
    m.severe = parse_ph(n.at("severe"));
    m.r = n.at("r").number();
    m.r_k = parse_sequence(n.at("r_k"));
    m.p_k = parse_sequence(n.at("p_k"));
  } else if (m.kind == "stage-cascade") {
    m.m = static_cast<int>(n.at("m").count(2));
    m.mu_k = parse_sequence(n.at("mu_k"));
    m.p_k = parse_sequence(n.at("p_k"));
    if (auto p = n.get("P")) m.P = p->matrix();
    if (auto b = n.get("beta")) m.beta = b->row_vector();
    if (auto a = n.get("alpha")) m.alpha = a->row_vector();
  } else if (m.kind == "stationary") {
    m.alpha = n.at("alpha").row_vector();
    m.A = n.at("A").matrix();
    m.D = n.at("D").matrix();
  } else if (m.kind == "explicit") {
    m.alpha = n.at("alpha").row_vector();
    const Node list = n.at("blocks");
    if (list.size() == 0) list.fail("expected a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node b = list[i];
      MphBlock blk{b.at("A").matrix(), b.at("D").matrix()};
      b.finish();
      m.blocks.push_back(std::move(blk));
    }
  } else {
    throw ConfigError(n.path() + ".kind", "expected independent, two-regime, stage-cascade, stationary or explicit");
  }
  n.finish();
  return m;
}

ProcessSpec parse_process(const Node& n) {
  ProcessSpec p;
  const int forms = int(n.has("lambda")) + int(n.has("environment")) + int(n.has("arrival"));
  if (forms != 1) n.fail("give exactly one of lambda, environment or arrival");
  if (auto l = n.get("lambda")) {
    p.kind = ProcessSpec::Kind::poisson;
    p.lambda = l->positive();
    p.c = parse_scalar_or_grid(n.at("c"));
  } else if (auto e = n.get("environment")) {
    p.kind = ProcessSpec::Kind::environment;
    if (n.has("c")) throw ConfigError(n.path() + ".c", "premium rates belong to the environment");
    p.environment.generator = e->at("generator").matrix();
    p.environment.initial = e->at("initial").row_vector();
    p.environment.lambda = e->at("lambda").row_vector().transpose();
    p.environment.c = e->at("c").row_vector().transpose();
    e->finish();
  } else {
    p.kind = ProcessSpec::Kind::ph_arrival;
    p.arrival = parse_ph(n.at("arrival"));
    p.c = parse_scalar_or_grid(n.at("c"));
  }
  if (auto u = n.get("u")) p.u = parse_scalar_or_grid(*u);
  n.finish();
  for (double c : p.c.values())
    if (!(c > 0.0)) throw ConfigError(n.path() + ".c", "premium rates must be positive");
  for (double u : p.u.values())
    if (!(u >= 0.0)) throw ConfigError(n.path() + ".u", "reserves must be nonnegative");
  return p;
}

QuerySpec parse_query(const Node& n) {
  QuerySpec q;
  if (auto t = n.get("theta")) q.theta = t->nonneg();
  if (auto s = n.get("s")) {
    q.s = parse_scalar_or_grid(*s);
    for (double v : q.s.values())
      if (!(v >= 1.0) || std::floor(v) != v) throw ConfigError(s->path(), "claim caps must be integers >= 1");
  }
  if (auto y = n.get("y")) q.y = y->nonneg();
  if (auto t = n.get("tol")) q.tol = t->positive();
  if (auto m = n.get("method")) {
    q.method = m->string();
    if (q.method != "truncated" && q.method != "ultimate" && q.method != "stationary")
      m->fail("expected truncated, ultimate or stationary");
  }
  if (auto c = n.get("s_cap")) q.s_cap = c->count(1);
  n.finish();
  return q;
}

CommandSpec parse_command(const Node& n) {
  CommandSpec c;
  if (auto o = n.get("out")) c.out = o->string();
  if (auto s = n.get("seed")) c.seed = s->uint64();
  if (auto p = n.get("n_paths")) c.n_paths = p->count(1);
  if (auto d = n.get("depth")) c.depth = d->count(1);
  if (auto m = n.get("correlation_matrix")) c.correlation_matrix = m->boolean();
  if (auto k = n.get("k_max")) c.k_max = k->count(1);
  n.finish();
  return c;
}

json grid_json(const GridSpec& g) { return json{{"start", g.start}, {"stop", g.stop}, {"count", g.count}}; }

json scalar_or_grid_json(const ScalarOrGrid& s) { return s.grid ? grid_json(*s.grid) : json(s.value); }

json vector_json(const RowVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i)));
  return a;
}

json ph_json(const PhSpec& p) {
  json j{{"kind", p.kind}};
  if (p.kind == "exp") {
    j["rate"] = p.rate;
  } else if (p.kind == "erlang") {
    j["stages"] = p.stages;
    j["rate"] = p.rate;
  } else {
    j["alpha"] = vector_json(p.alpha);
    j["A"] = matrix_json(p.A);
  }
  return j;
}

json sequence_json(const SequenceSpec& s) {
  switch (s.form) {
    case SequenceSpec::Form::constant:
      return json(s.base);
    case SequenceSpec::Form::list: {
      json a = json::array();
      for (double v : s.values) a.push_back(v);
      return a;
    }
    case SequenceSpec::Form::hyperbolic:
      return json{{"base", s.base}, {"slope", s.slope}};
  }
  return json();
}

json model_json(const ModelSpec& m) {
  json j{{"kind", m.kind}};
  if (m.kind == "independent") {
    if (m.marginals_of) {
      j["marginals_of"] = model_json(*m.marginals_of);
      j["count"] = m.count;
    } else {
      json a = json::array();
      for (const auto& c : m.claims) a.push_back(ph_json(c));
      j["claims"] = a;
    }
  } else if (m.kind == "two-regime") {
    j["regular"] = ph_json(m.regular);
    j["severe"] = ph_json(m.severe);
    j["r"] = m.r;
    j["r_k"] = sequence_json(m.r_k);
    j["p_k"] = sequence_json(m.p_k);
  } else if (m.kind == "stage-cascade") {
    j["m"] = m.m;
    j["mu_k"] = sequence_json(m.mu_k);
    j["p_k"] = sequence_json(m.p_k);
    if (m.P) j["P"] = matrix_json(*m.P);
    if (m.beta) j["beta"] = vector_json(*m.beta);
    if (m.alpha) j["alpha"] = vector_json(*m.alpha);
  } else if (m.kind == "stationary") {
    j["alpha"] = vector_json(*m.alpha);
    j["A"] = matrix_json(m.A);
    j["D"] = matrix_json(m.D);
  } else {
    j["alpha"] = vector_json(*m.alpha);
    json a = json::array();
    for (const auto& b : m.blocks) a.push_back(json{{"A", matrix_json(b.A)}, {"D", matrix_json(b.D)}});
    j["blocks"] = a;
  }
  return j;
}

// Constant parameter sequences give identical blocks; the stationary kind
// lets the solver use the level-homogeneous results.
MphModel homogenize(const MphModel& model, bool constant) {
  if (!constant) return model;
  const MphBlock b = model.block(1);
  return MphModel::stationary(model.alpha(), b.A, b.D);
}

std::size_t validation_depth(const RunConfig& c) {
  std::size_t depth = std::max<std::size_t>(c.command.depth, 8);
  for (double s : c.query.s.values()) depth = std::max(depth, static_cast<std::size_t>(s));
  return std::min<std::size_t>(depth, 64);
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  if (count > 1) out.back() = stop;
  return out;
}

PhaseTypeRep PhSpec::build() const {
  if (kind == "exp") return exponential(rate);
  if (kind == "erlang") return erlang(stages, rate);
  return make_ph(alpha, A);
}

double SequenceSpec::at(std::size_t k) const {
  switch (form) {
    case Form::constant:
      return base;
    case Form::list:
      return values[std::min(k, values.size()) - 1];
    case Form::hyperbolic:
      return base + slope * static_cast<double>(k) / static_cast<double>(k + 1);
  }
  return base;
}

MphModel ModelSpec::build() const {
  if (kind == "independent") {
    std::vector<PhaseTypeRep> reps;
    if (marginals_of) {
      const MphModel inner = marginals_of->build();
      const auto gammas = marginal_vectors(inner, count);
      for (std::size_t k = 1; k <= count; ++k) reps.push_back(PhaseTypeRep{gammas[k - 1], inner.block(k).A});
    } else {
      for (const auto& c : claims) reps.push_back(c.build());
    }
    return build_independent(reps);
  }
  if (kind == "two-regime") {
    auto rk = r_k, pk = p_k;
    return homogenize(build_two_regime(regular.build(), severe.build(), r, [rk](std::size_t k) { return rk.at(k); },
                                       [pk](std::size_t k) { return pk.at(k); }),
                      rk.is_constant() && pk.is_constant());
  }
  if (kind == "stage-cascade") {
    const Matrix PP = P ? *P : upper_uniform_matrix(m);
    RowVector b = beta ? *beta : RowVector(RowVector::Unit(m - 1, 0));
    if (b.size() != m - 1) throw DimensionMismatch("beta must have m-1 entries");
    const RowVector a = alpha ? *alpha : RowVector(RowVector::Unit(m, 0));
    auto mk = mu_k, pk = p_k;
    return homogenize(build_stage_cascade(m, [mk](std::size_t k) { return mk.at(k); },
                                          [pk](std::size_t k) { return pk.at(k); }, PP, [b](std::size_t) { return b; }, a),
                      mk.is_constant() && pk.is_constant());
  }
  if (kind == "stationary") return MphModel::stationary(*alpha, A, D);
  return MphModel::explicit_list(*alpha, blocks);
}

FluidBlocks ProcessSpec::build(const MphModel& model, double c) const {
  switch (kind) {
    case Kind::poisson:
      return build_poisson(model, lambda, c);
    case Kind::environment:
      return build_environment(model, Environment{environment.generator, environment.initial, environment.lambda,
                                                  environment.c});
    case Kind::ph_arrival:
      break;
  }
  return build_ph_arrival(model, arrival.build(), c);
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", std::string("invalid JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.expect_object();
  RunConfig c;
  c.model = parse_model(root.at("model"));
  c.process = parse_process(root.at("process"));
  if (auto q = root.get("query")) c.query = parse_query(*q);
  if (auto m = root.get("command")) c.command = parse_command(*m);
  root.finish();

  const MphModel model = wrap("model", [&] { return c.model.build(); });
  wrap("model", [&] {
    model.validate(validation_depth(c));
    return 0;
  });
  wrap("process", [&] {
    for (double rate : c.process.c.values()) c.process.build(model, rate);
    return 0;
  });
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json j;
  j["model"] = model_json(c.model);

  json p;
  switch (c.process.kind) {
    case ProcessSpec::Kind::poisson:
      p["lambda"] = c.process.lambda;
      p["c"] = scalar_or_grid_json(c.process.c);
      break;
    case ProcessSpec::Kind::environment:
      p["environment"] = json{{"generator", matrix_json(c.process.environment.generator)},
                              {"initial", vector_json(c.process.environment.initial)},
                              {"lambda", vector_json(c.process.environment.lambda.transpose())},
                              {"c", vector_json(c.process.environment.c.transpose())}};
      break;
    case ProcessSpec::Kind::ph_arrival:
      p["arrival"] = ph_json(c.process.arrival);
      p["c"] = scalar_or_grid_json(c.process.c);
      break;
  }
  p["u"] = scalar_or_grid_json(c.process.u);
  j["process"] = p;

  j["query"] = json{{"theta", c.query.theta}, {"s", scalar_or_grid_json(c.query.s)}, {"y", c.query.y},
                    {"tol", c.query.tol}, {"method", c.query.method}, {"s_cap", c.query.s_cap}};

  json cmd{{"seed", c.command.seed},
           {"n_paths", c.command.n_paths},
           {"depth", c.command.depth},
           {"correlation_matrix", c.command.correlation_matrix},
           {"k_max", c.command.k_max}};
  if (c.command.out) cmd["out"] = *c.command.out;
  j["command"] = cmd;
  return j.dump(2);
}

}  // namespace ruinkit
