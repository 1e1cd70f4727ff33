#include "plap/runner.hpp"

#include "plap/io.hpp"
#include "plap/ode.hpp"
#include "plap/orbits.hpp"
#include "plap/spectrum.hpp"
#include "plap/verification.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef PLAP_VERSION
#define PLAP_VERSION "0.0.0"
#endif

namespace plap {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20240611;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string indexed(const std::string& stem, std::size_t i) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << i << ".csv";
  return os.str();
}

Json reaction_json(const ReactionSpec& spec) {
  Json j{{"form", spec.form}, {"p", spec.p}};
  if (spec.form == "homogeneous") j["g"] = spec.g;
  if (spec.form == "interpolated") {
    j["a0"] = spec.a0;
    j["a_inf"] = spec.a_inf;
    j["s"] = spec.s;
  }
  return j;
}

Json bracket_json(const Reaction& r, double l) {
  try {
    const IndexBracket b = index_bracket(r, l);
    return {{"k0", b.k0}, {"k_inf", b.k_inf}, {"existence_predicted", b.existence_predicted()}};
  } catch (const ResonanceError& e) {
    return {{"resonant", true}, {"message", e.what()}};
  }
}

struct Result {
  int code = exit_code::ok;
  Json summary = Json::object();
  std::vector<std::string> outputs;
};

Result run_eigen(const ExperimentConfig& cfg, const fs::path& out) {
  Result res;
  std::vector<EigenRow> rows;
  double worst = 0.0;
  for (const double p : cfg.eigen.p) {
    for (int n = 1; n <= cfg.eigen.n_max; ++n) {
      EigenRow row{n, p, cfg.l, eigenvalue(n, p, cfg.l), shooting_eigenvalue(n, p, cfg.l, cfg.eigen.tol)};
      row.gap = std::abs(row.lambda_closed - row.lambda_shooting) / row.lambda_closed;
      worst = std::max(worst, row.gap);
      rows.push_back(row);
      if (cfg.write_profiles) {
        write_grid_function_csv(out / indexed("eigenfunction", rows.size() - 1),
                                eigenfunction(n, p, cfg.grid()).eigenfunction);
        res.outputs.push_back(indexed("eigenfunction", rows.size() - 1));
      }
    }
  }
  write_eigen_csv(out / "eigen.csv", rows);
  res.outputs.insert(res.outputs.begin(), "eigen.csv");
  res.summary = {{"rows", rows.size()}, {"max_rel_gap", worst}};
  return res;
}

Result run_evolve(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& out) {
  Result res;
  const Reaction r = cfg.reaction->build(cfg.l);
  const Grid grid = cfg.grid();
  const GridFunction u0 = cfg.initial.build(grid, r.p(), seed);
  const Trajectory traj = evolve(u0, r, cfg.evolution);
  write_trajectory_csv(out / "trajectory.csv", traj);
  write_grid_function_csv(out / "final.csv", traj.final().u);
  res.outputs = {"trajectory.csv", "final.csv"};
  if (cfg.write_profiles) {
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      const std::string name = "profiles/" + indexed("u", k);
      write_grid_function_csv(out / name, traj.snapshots[k].u);
      res.outputs.push_back(name);
    }
  }
  res.summary = to_json(traj);
  res.summary["reaction"] = reaction_json(*cfg.reaction);
  if (traj.termination == Termination::blowup) res.code = exit_code::blowup;
  if (traj.termination == Termination::solver_failure) res.code = exit_code::solver_failure;
  return res;
}

Json scan_json(const EquilibriumScan& scan, const std::vector<std::string>& files) {
  Json records = Json::array();
  for (std::size_t i = 0; i < scan.records.size(); ++i) {
    Json j = to_json(scan.records[i]);
    j["index"] = i;
    j["profile"] = files[i];
    records.push_back(j);
  }
  return {{"coverage",
           {{"slope_min", scan.slope_min},
            {"slope_max", scan.slope_max},
            {"n_samples", scan.n_samples},
            {"brackets", scan.brackets},
            {"rejected", scan.rejected}}},
          {"records", records}};
}

std::vector<std::string> write_profiles(const std::vector<EquilibriumRecord>& recs, const fs::path& out) {
  std::vector<std::string> files;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    files.push_back(indexed("equilibrium", i));
    write_grid_function_csv(out / files.back(), recs[i].u);
  }
  return files;
}

Result run_equilibria(const ExperimentConfig& cfg, const fs::path& out) {
  Result res;
  const Reaction r = cfg.reaction->build(cfg.l);
  const EquilibriumScan scan = find_equilibria(r, cfg.grid(), cfg.equilibria);
  const auto files = write_profiles(scan.records, out);
  Json doc = scan_json(scan, files);
  doc["reaction"] = reaction_json(*cfg.reaction);
  doc["grid"] = {{"l", cfg.l}, {"n_cells", cfg.n_cells}};
  doc["index_bracket"] = bracket_json(r, cfg.l);
  write_json(out / "equilibria.json", doc);
  res.outputs = {"equilibria.json"};
  res.outputs.insert(res.outputs.end(), files.begin(), files.end());
  int nontrivial = 0;
  for (const auto& rec : scan.records) nontrivial += rec.trivial ? 0 : 1;
  res.summary = {{"records", scan.records.size()}, {"nontrivial", nontrivial}, {"brackets", scan.brackets}};
  return res;
}

Result run_connect(const ExperimentConfig& cfg, const fs::path& out) {
  Result res;
  const Reaction r = cfg.reaction->build(cfg.l);
  const Grid grid = cfg.grid();
  const EquilibriumScan scan = find_equilibria(r, grid, cfg.equilibria);
  const auto& eqs = scan.records;

  std::size_t from = 0;
  if (cfg.connect.from) {
    from = static_cast<std::size_t>(*cfg.connect.from);
    if (from >= eqs.size()) {
      throw ConfigError("index " + std::to_string(from) + " out of range (" + std::to_string(eqs.size()) +
                            " equilibria found)",
                        "connect.from");
    }
  } else {
    while (from < eqs.size() && !eqs[from].trivial) ++from;
  }

  std::vector<SignedDirection> dirs;
  if (cfg.connect.directions.empty()) {
    dirs = default_directions(r, grid);
  } else {
    for (const int d : cfg.connect.directions) {
      const int n = std::abs(d);
      const double sign = d > 0 ? 1.0 : -1.0;
      dirs.push_back({n, sign, sign * eigenfunction(n, r.p(), grid).eigenfunction});
    }
  }

  const ConnectionReport report = connect(r, eqs, from, dirs, cfg.connect.epsilon, cfg.evolution,
                                          cfg.connect.criteria);
  const ChainReport chain = heteroclinic_chain_report(eqs, report.orbits);

  const auto files = write_profiles(eqs, out);
  Json orbits = Json::array();
  for (std::size_t k = 0; k < report.orbits.size(); ++k) {
    Json j = to_json(report.orbits[k], eqs);
    j["trajectory_csv"] = indexed("orbit", k);
    write_trajectory_csv(out / indexed("orbit", k), report.orbits[k].trajectory);
    res.outputs.push_back(indexed("orbit", k));
    orbits.push_back(j);
  }
  Json directions = Json::array();
  for (const auto& d : report.directions) directions.push_back(to_json(d));

  Json doc{{"reaction", reaction_json(*cfg.reaction)},
           {"grid", {{"l", cfg.l}, {"n_cells", cfg.n_cells}}},
           {"index_bracket", bracket_json(r, cfg.l)},
           {"source", from},
           {"epsilon", cfg.connect.epsilon},
           {"equilibria", scan_json(scan, files)},
           {"graph", to_json(chain)},
           {"orbits", orbits},
           {"directions", directions}};
  write_json(out / "connections.json", doc);
  res.outputs.insert(res.outputs.begin(), "connections.json");
  res.outputs.insert(res.outputs.end(), files.begin(), files.end());
  res.summary = {{"equilibria", eqs.size()}, {"orbits", report.orbits.size()}, {"edges", chain.edges.size()}};
  return res;
}

Result run_verify(const ExperimentConfig& cfg, std::uint64_t seed, const RunOverrides& overrides,
                  const fs::path& out, std::ostream& log) {
  Result res;
  VerifyOptions opt;
  opt.only = overrides.only.empty() ? cfg.verify.only : overrides.only;
  opt.tolerance_scale = cfg.verify.tolerance_scale;
  opt.seed = seed;
  for (const auto& name : opt.only) {
    const auto& names = criterion_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ConfigError("unknown criterion '" + name + "'", "verify.only");
    }
  }
  const VerifyReport report = run_verification(opt);
  for (const auto& r : report.results) {
    log << (r.pass ? "PASS " : "FAIL ") << std::setw(2) << r.id << ' ' << r.name << ": " << r.summary << " ["
        << std::fixed << std::setprecision(2) << r.runtime_s << " s]" << std::defaultfloat << '\n';
  }
  Json doc = report.to_json();
  doc["seed"] = seed;
  doc["tolerance_scale"] = opt.tolerance_scale;
  write_json(out / "verify.json", doc);
  res.outputs = {"verify.json"};
  int passed = 0;
  for (const auto& r : report.results) passed += r.pass ? 1 : 0;
  res.summary = {{"criteria", report.results.size()}, {"passed", passed}};
  if (!report.all_pass()) res.code = exit_code::verification_failure;
  return res;
}

}  // namespace

int run_experiment(ExperimentConfig cfg, const std::string& config_text, const RunOverrides& overrides,
                   std::ostream& log) {
  if (overrides.output) cfg.output = *overrides.output;
  const std::uint64_t seed = overrides.seed ? *overrides.seed : cfg.seed.value_or(kDefaultSeed);
  const fs::path out(cfg.output);
  Result res;
  try {
    fs::create_directories(out);
    switch (cfg.kind) {
      case ExperimentKind::eigen:
        res = run_eigen(cfg, out);
        break;
      case ExperimentKind::evolve:
        res = run_evolve(cfg, seed, out);
        break;
      case ExperimentKind::equilibria:
        res = run_equilibria(cfg, out);
        break;
      case ExperimentKind::connect:
        res = run_connect(cfg, out);
        break;
      case ExperimentKind::verify:
        res = run_verify(cfg, seed, overrides, out, log);
        break;
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::exception& e) {
    log << "solver failure: " << e.what() << '\n';
    return exit_code::solver_failure;
  }

  Json manifest{{"version", PLAP_VERSION},
                {"kind", to_string(cfg.kind)},
                {"config_hash", hex64(fnv1a(config_text))},
                {"seed", seed},
                {"exit_code", res.code},
                {"summary", res.summary},
                {"outputs", res.outputs},
                {"timestamp", utc_timestamp()}};
  write_json(out / "manifest.json", manifest);
  log << to_string(cfg.kind) << ": exit " << res.code << ", outputs in " << out.string() << '\n';
  return res.code;
}

int run_config_file(const std::string& path, const std::string& expected_kind, const RunOverrides& overrides,
                    std::ostream& log) {
  std::string text;
  ExperimentConfig cfg;
  try {
    if (path.empty()) {
      if (expected_kind != "verify") throw ConfigError("--config is required for " + expected_kind);
      text = R"({"kind": "verify"})";
      cfg = parse_config(text, "defaults");
    } else {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot read config file " + path);
      std::ostringstream buffer;
      buffer << in.rdbuf();
      text = buffer.str();
      cfg = parse_config(text, path);
    }
    if (!expected_kind.empty() && to_string(cfg.kind) != expected_kind) {
      throw ConfigError("config kind is '" + to_string(cfg.kind) + "' but the command is '" + expected_kind + "'",
                        "kind");
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }
  return run_experiment(std::move(cfg), text, overrides, log);
}

}  // namespace plap
