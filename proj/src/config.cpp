#include "plap/config.hpp"

#include "plap/io.hpp"
#include "plap/spectrum.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace plap {
namespace {

// 1-based line of the first `"key"` occurrence along `path`, 0 if not found.
int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = std::string::npos;
  std::size_t from = 0;
  for (const auto& key : path) {
    const std::size_t found = text.find('"' + key + '"', from);
    if (found == std::string::npos) break;
    pos = from = found;
  }
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// A JSON object whose keys must all be consumed before finish().
class Section {
 public:
  Section(const Json& value, std::vector<std::string> path, const std::string& text)
      : value_(value), path_(std::move(path)), text_(text) {
    if (!value_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const { return value_.contains(key); }

  Section child(const std::string& key) {
    seen_.insert(key);
    auto path = path_;
    path.push_back(key);
    return Section(value_.at(key), path, text_);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return required<T>(key);
  }

  template <class T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) fail("missing required field", key);
    try {
      return value_.at(key).get<T>();
    } catch (const Json::exception&) {
      fail("wrong type", key);
    }
  }

  /// A number or an array of numbers.
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const Json& v = value_.at(key);
    if (v.is_number()) return {v.get<double>()};
    return required<std::vector<double>>(key);
  }

  double positive(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!(v > 0.0)) fail("must be positive", key);
    return v;
  }

  int at_least(const std::string& key, int fallback, int minimum) {
    const int v = get<int>(key, fallback);
    if (v < minimum) fail("must be >= " + std::to_string(minimum), key);
    return v;
  }

  [[noreturn]] void fail(const std::string& message, const std::string& key = {}) const {
    auto path = path_;
    if (!key.empty()) path.push_back(key);
    std::string dotted;
    for (const auto& p : path) dotted += (dotted.empty() ? "" : ".") + p;
    throw ConfigError(message, dotted, locate(text_, path));
  }

  void finish() const {
    for (const auto& item : value_.items()) {
      if (!seen_.count(item.key())) fail("unknown key", item.key());
    }
  }

 private:
  const Json& value_;
  std::vector<std::string> path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

ExperimentKind parse_kind(Section& root) {
  const auto kind = root.required<std::string>("kind");
  if (kind == "eigen") return ExperimentKind::eigen;
  if (kind == "evolve") return ExperimentKind::evolve;
  if (kind == "equilibria") return ExperimentKind::equilibria;
  if (kind == "connect") return ExperimentKind::connect;
  if (kind == "verify") return ExperimentKind::verify;
  root.fail("unknown experiment kind '" + kind + "'", "kind");
}

ReactionSpec parse_reaction(Section s) {
  ReactionSpec r;
  r.form = s.required<std::string>("form");
  r.p = s.required<double>("p");
  if (!(r.p >= 2.0)) s.fail("p must be >= 2", "p");
  if (r.form == "homogeneous") {
    if (!s.has("g")) s.fail("missing required field", "g");
    r.g = s.numbers("g", {});
    if (r.g.empty()) s.fail("coefficient table is empty", "g");
  } else if (r.form == "interpolated") {
    r.a0 = s.required<double>("a0");
    r.a_inf = s.required<double>("a_inf");
    r.s = s.positive("s", 2.0);
  } else if (r.form != "zero") {
    s.fail("unknown reaction form '" + r.form + "'", "form");
  }
  s.finish();
  return r;
}

void parse_evolution(Section s, ExperimentConfig& cfg) {
  EvolutionConfig& e = cfg.evolution;
  e.dt = s.positive("dt", e.dt);
  e.t_end = s.positive("t_end", e.t_end);
  e.prox_tol = s.positive("prox_tol", e.prox_tol);
  e.max_newton = s.at_least("max_newton", e.max_newton, 1);
  e.blowup_threshold = s.get<double>("blowup_threshold", e.blowup_threshold);
  e.snapshot_every = s.at_least("snapshot_every", e.snapshot_every, 1);
  e.allow_halving = s.get<bool>("allow_halving", e.allow_halving);
  e.steady_udot_tol = s.get<double>("steady_udot_tol", e.steady_udot_tol);
  e.steady_window = s.at_least("steady_window", e.steady_window, 1);
  cfg.write_profiles = s.get<bool>("write_profiles", cfg.write_profiles);
  if (e.dt > e.t_end) s.fail("dt exceeds t_end", "dt");
  s.finish();
}

void parse_initial(Section s, InitialSpec& init) {
  init.kind = s.required<std::string>("kind");
  if (init.kind == "eigenfunction") {
    init.n = s.at_least("n", init.n, 1);
    init.amplitude = s.get<double>("amplitude", init.amplitude);
  } else if (init.kind == "random") {
    init.amplitude = s.get<double>("amplitude", init.amplitude);
  } else if (init.kind == "values") {
    init.values = s.required<std::vector<double>>("values");
  } else {
    s.fail("unknown initial kind '" + init.kind + "'", "kind");
  }
  s.finish();
}

void parse_eigen(Section s, EigenSpec& eig) {
  eig.p = s.numbers("p", eig.p);
  for (const double p : eig.p) {
    if (!(p >= 2.0)) s.fail("p must be >= 2", "p");
  }
  eig.n_max = s.at_least("n_max", eig.n_max, 1);
  eig.tol = s.positive("tol", eig.tol);
  s.finish();
}

void parse_probe(Section s, ProbeOptions& probe) {
  probe.epsilon = s.positive("epsilon", probe.epsilon);
  probe.t_probe = s.positive("t_probe", probe.t_probe);
  probe.dt = s.positive("dt", probe.dt);
  probe.prox_tol = s.positive("prox_tol", probe.prox_tol);
  s.finish();
}

void parse_equilibria(Section s, EquilibriumSearch& eq) {
  eq.n_samples = s.at_least("n_samples", eq.n_samples, 8);
  if (s.has("slope_range")) {
    const auto range = s.required<std::vector<double>>("slope_range");
    if (range.size() != 2 || !(range[0] < range[1])) s.fail("expected [min, max] with min < max", "slope_range");
    eq.slope_range = std::make_pair(range[0], range[1]);
  }
  eq.accept_tol = s.positive("accept_tol", eq.accept_tol);
  eq.residual_tol = s.positive("residual_tol", eq.residual_tol);
  eq.probe_stability = s.get<bool>("probe_stability", eq.probe_stability);
  if (s.has("probe")) parse_probe(s.child("probe"), eq.probe);
  s.finish();
}

void parse_connect(Section s, ConnectSpec& c) {
  if (s.has("from")) {
    if (s.has("from") && s.get<Json>("from", Json()).is_string()) {
      if (s.get<std::string>("from", "") != "trivial") s.fail("expected \"trivial\" or an index", "from");
    } else {
      c.from = s.get<int>("from", 0);
      if (*c.from < 0) s.fail("index must be >= 0", "from");
    }
  }
  c.epsilon = s.positive("epsilon", c.epsilon);
  c.directions = s.get<std::vector<int>>("directions", c.directions);
  for (const int d : c.directions) {
    if (d == 0) s.fail("direction indices are nonzero signed integers", "directions");
  }
  if (s.has("criteria")) {
    Section k = s.child("criteria");
    c.criteria.udot_tol = k.positive("udot_tol", c.criteria.udot_tol);
    c.criteria.distance_tol = k.positive("distance_tol", c.criteria.distance_tol);
    c.criteria.window = k.at_least("window", c.criteria.window, 1);
    k.finish();
  }
  s.finish();
}

void parse_verify(Section s, VerifySpec& v) {
  v.only = s.get<std::vector<std::string>>("only", v.only);
  v.tolerance_scale = s.positive("tolerance_scale", v.tolerance_scale);
  s.finish();
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string field, int line)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? message : field + ": " + message)),
      field_(std::move(field)),
      line_(line) {}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::eigen:
      return "eigen";
    case ExperimentKind::evolve:
      return "evolve";
    case ExperimentKind::equilibria:
      return "equilibria";
    case ExperimentKind::connect:
      return "connect";
    case ExperimentKind::verify:
      return "verify";
  }
  return "verify";
}

Reaction ReactionSpec::build(double l) const {
  if (form == "interpolated") return Reaction::interpolated(p, a0, a_inf, s);
  if (form == "homogeneous") {
    return Reaction::homogeneous(p, g.size() == 1 ? CoefficientProfile::constant(g[0])
                                                  : CoefficientProfile::table(l, g));
  }
  return Reaction::zero(p);
}

GridFunction InitialSpec::build(const Grid& grid, double p, std::uint64_t seed) const {
  if (kind == "eigenfunction") {
    GridFunction e = eigenfunction(n, p, grid).eigenfunction;
    e *= amplitude;
    return e;
  }
  if (kind == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GridFunction u(grid);
    for (int k = 0; k < u.size(); ++k) u[k] = amplitude * dist(rng);
    return u;
  }
  if (static_cast<int>(values.size()) != grid.n_interior()) {
    throw ConfigError("expected " + std::to_string(grid.n_interior()) + " interior values, got " +
                          std::to_string(values.size()),
                      "initial.values");
  }
  return GridFunction(grid, Eigen::Map<const GridFunction::Vector>(values.data(), grid.n_interior()));
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(source + ": malformed JSON (" + std::string(e.what()) + ")", {},
                      line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object", {}, 1);

  ExperimentConfig cfg;
  Section root(doc, {}, text);
  cfg.kind = parse_kind(root);
  cfg.output = root.get<std::string>("output", cfg.output);
  if (root.has("seed")) cfg.seed = root.get<std::uint64_t>("seed", 0);

  if (root.has("grid")) {
    Section g = root.child("grid");
    cfg.l = g.positive("l", cfg.l);
    cfg.n_cells = g.at_least("n_cells", cfg.n_cells, 2);
    g.finish();
  } else if (cfg.kind != ExperimentKind::verify && cfg.kind != ExperimentKind::eigen) {
    root.fail("missing required section", "grid");
  }

  if (root.has("reaction")) {
    cfg.reaction = parse_reaction(root.child("reaction"));
  } else if (cfg.kind == ExperimentKind::evolve || cfg.kind == ExperimentKind::equilibria ||
             cfg.kind == ExperimentKind::connect) {
    root.fail("missing required section", "reaction");
  }

  if (root.has("evolution")) {
    parse_evolution(root.child("evolution"), cfg);
  } else if (cfg.kind == ExperimentKind::evolve || cfg.kind == ExperimentKind::connect) {
    root.fail("missing required section", "evolution");
  }

  if (root.has("initial")) {
    parse_initial(root.child("initial"), cfg.initial);
  } else if (cfg.kind == ExperimentKind::evolve) {
    root.fail("missing required section", "initial");
  }

  if (root.has("eigen")) parse_eigen(root.child("eigen"), cfg.eigen);
  if (root.has("equilibria")) parse_equilibria(root.child("equilibria"), cfg.equilibria);
  if (root.has("connect")) parse_connect(root.child("connect"), cfg.connect);
  if (root.has("verify")) parse_verify(root.child("verify"), cfg.verify);
  root.finish();

  if (cfg.kind == ExperimentKind::evolve && cfg.initial.kind == "values" &&
      static_cast<int>(cfg.initial.values.size()) != cfg.n_cells - 1) {
    throw ConfigError("expected " + std::to_string(cfg.n_cells - 1) + " interior values", "initial.values",
                      locate(text, {"initial", "values"}));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace plap
