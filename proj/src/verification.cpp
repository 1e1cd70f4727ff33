#include "plap/verification.hpp"

#include "plap/orbits.hpp"
#include "plap/semiflow.hpp"
#include "plap/spectrum.hpp"
#include "plap/stationary.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace plap {
namespace {

using Rng = std::mt19937_64;

GridFunction random_function(const Grid& grid, Rng& rng, double amplitude = 1.0) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  GridFunction u(grid);
  for (int k = 0; k < u.size(); ++k) u[k] = dist(rng);
  return u;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Outcome {
  bool pass = false;
  Json measured = Json::object();
  std::string summary;
};

using Check = std::function<Outcome(const VerifyOptions&)>;

// Criterion 1: classical limit p = 2, l = pi, lambda_n = n^2.
Outcome eigen_classical(const VerifyOptions& opt) {
  const double l = std::numbers::pi;
  double closed_err = 0.0, shoot_err = 0.0;
  Json rows = Json::array();
  for (int n = 1; n <= 4; ++n) {
    const double exact = n * n;
    const double closed = eigenvalue(n, 2.0, l);
    const double shot = shooting_eigenvalue(n, 2.0, l, 1e-10);
    closed_err = std::max(closed_err, std::abs(closed - exact) / exact);
    shoot_err = std::max(shoot_err, std::abs(shot - exact) / exact);
    rows.push_back({{"n", n}, {"closed", closed}, {"shooting", shot}});
  }
  const double tol_closed = 1e-8 * opt.tolerance_scale, tol_shoot = 1e-6 * opt.tolerance_scale;
  Outcome out;
  out.pass = closed_err <= tol_closed && shoot_err <= tol_shoot;
  out.measured = {{"rows", rows},
                  {"max_rel_error_closed", closed_err},
                  {"max_rel_error_shooting", shoot_err},
                  {"tol_closed", tol_closed},
                  {"tol_shooting", tol_shoot}};
  out.summary = "closed " + fmt(closed_err) + " <= " + fmt(tol_closed) + ", shooting " + fmt(shoot_err) +
                " <= " + fmt(tol_shoot);
  return out;
}

// Criterion 2: closed form against the shooting oracle.
Outcome eigen_oracle(const VerifyOptions& opt) {
  double worst = 0.0;
  Json rows = Json::array();
  for (const double p : {2.2, 2.5, 3.0, 4.0}) {
    for (int n = 1; n <= 3; ++n) {
      const double closed = eigenvalue(n, p, 1.0);
      const double shot = shooting_eigenvalue(n, p, 1.0, 1e-10);
      const double gap = std::abs(closed - shot) / closed;
      worst = std::max(worst, gap);
      rows.push_back({{"p", p}, {"n", n}, {"closed", closed}, {"shooting", shot}, {"gap", gap}});
    }
  }
  const double tol = 1e-6 * opt.tolerance_scale;
  Outcome out;
  out.pass = worst <= tol;
  out.measured = {{"rows", rows}, {"max_rel_gap", worst}, {"tol", tol}};
  out.summary = "max relative gap " + fmt(worst) + " <= " + fmt(tol);
  return out;
}

// Criterion 3: lambda_1^(3 + delta) -> lambda_1^(3).
Outcome eigen_continuity(const VerifyOptions& opt) {
  const std::vector<double> deltas{0.1, 0.01, 0.001};
  const auto rows = continuity_in_p(1, 3.0, deltas, 1.0);
  const double base = eigenvalue(1, 3.0, 1.0);
  const double base_shot = shooting_eigenvalue(1, 3.0, 1.0, 1e-11);
  std::vector<double> gaps, shot_gaps;
  Json table = Json::array();
  for (const auto& row : rows) {
    const double shot_gap = std::abs(shooting_eigenvalue(1, row.q, 1.0, 1e-11) - base_shot);
    gaps.push_back(row.gap);
    shot_gaps.push_back(shot_gap);
    table.push_back({{"q", row.q}, {"lambda", row.lambda}, {"gap", row.gap}, {"shooting_gap", shot_gap}});
  }
  const double tol = 1e-2 * base * opt.tolerance_scale;
  Outcome out;
  out.pass = strictly_decreasing(gaps) && strictly_decreasing(shot_gaps) && gaps.back() <= tol &&
             shot_gaps.back() <= tol;
  out.measured = {{"rows", table}, {"lambda_1_p3", base}, {"final_gap", gaps.back()}, {"tol", tol}};
  out.summary = "gaps " + fmt(gaps[0]) + " > " + fmt(gaps[1]) + " > " + fmt(gaps[2]) + ", final <= " + fmt(tol);
  return out;
}

// Criterion 4: <A u - A v, u - v> >= 2^{2-p} |u - v|^p_{W^{1,p}} on random pairs.
Outcome monotonicity(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  std::uniform_int_distribution<int> cells(2, 32);
  const double slack = 1e-12 * opt.tolerance_scale;
  double worst = std::numeric_limits<double>::infinity();
  int failures = 0, pairs = 0;
  for (const double p : {2.0, 2.5, 3.0, 4.0}) {
    for (int i = 0; i < 1000; ++i) {
      const Grid grid(1.0, cells(rng));
      const GridFunction u = random_function(grid, rng), v = random_function(grid, rng);
      const MonotonicityResult m = monotonicity_check(u, v, p);
      const double margin = m.margin;
      worst = std::min(worst, margin);
      if (margin < -slack) ++failures;
      ++pairs;
    }
  }
  Outcome out;
  out.pass = failures == 0;
  out.measured = {{"pairs", pairs}, {"failures", failures}, {"min_margin", worst}, {"slack", slack}};
  out.summary = std::to_string(pairs - failures) + "/" + std::to_string(pairs) + " pairs, min lhs - rhs " +
                fmt(worst);
  return out;
}

// Criterion 5: t ||u_dot(t)|| <= sqrt(2) ||u0|| for the pure p-Laplacian flow.
Outcome smoothing(const VerifyOptions& opt) {
  Rng rng(opt.seed + 5);
  const Grid grid(1.0, 32);
  const double slack = 0.05 * opt.tolerance_scale;
  double worst_ratio = 0.0;
  int failures = 0, runs = 0;
  for (const double p : {2.0, 3.0}) {
    for (int i = 0; i < 20; ++i) {
      const GridFunction u0 = random_function(grid, rng);
      for (const double t : {0.1, 1.0}) {
        const SmoothingResult s = smoothing_diagnostic(u0, p, t, 1000, 1e-12, slack);
        worst_ratio = std::max(worst_ratio, s.lhs / s.rhs);
        if (!(s.lhs <= s.rhs * (1.0 + slack))) ++failures;
        ++runs;
      }
    }
  }
  Outcome out;
  out.pass = failures == 0;
  out.measured = {{"runs", runs}, {"failures", failures}, {"max_lhs_over_rhs", worst_ratio}, {"slack", slack}};
  out.summary = std::to_string(runs - failures) + "/" + std::to_string(runs) + " runs, max lhs/rhs " +
                fmt(worst_ratio) + " <= " + fmt(1.0 + slack);
  return out;
}

Trajectory heat_run(const GridFunction& u0, double p, double dt, double t_end, double prox_tol = 1e-12) {
  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.prox_tol = prox_tol;
  return evolve(u0, Reaction::zero(p), cfg);
}

// Criterion 6: phi(t_b) - phi(t_a) + int ||u_dot||^2 = 0 up to O(dt).
Outcome energy_identity(const VerifyOptions& opt) {
  Outcome out;
  const Grid grid_pi(std::numbers::pi, 64);
  const Trajectory t2 = heat_run(eigenfunction(1, 2.0, grid_pi).eigenfunction, 2.0, 1e-3, 1.0);
  const double drop = t2.snapshots.front().energy - t2.final().energy;
  const double res2 = energy_identity_residual(t2, 0.0, 1.0);
  const double rel2 = res2 / std::abs(drop);
  const double tol2 = 0.05 * opt.tolerance_scale;

  const Grid grid(1.0, 64);
  const GridFunction e1 = eigenfunction(1, 3.0, grid).eigenfunction;
  const double coarse = energy_identity_residual(heat_run(e1, 3.0, 2e-3, 1.0), 0.0, 1.0);
  const double fine = energy_identity_residual(heat_run(e1, 3.0, 1e-3, 1.0), 0.0, 1.0);
  const double ratio = coarse / fine;
  const double band = 0.3 * opt.tolerance_scale;

  out.pass = rel2 <= tol2 && std::abs(ratio - 2.0) <= 2.0 * band;
  out.measured = {{"p2_residual", res2},          {"p2_energy_drop", drop},  {"p2_relative", rel2},
                  {"p2_tol", tol2},               {"p3_residual_dt2e-3", coarse}, {"p3_residual_dt1e-3", fine},
                  {"p3_ratio", ratio},            {"p3_ratio_band", {2.0 * (1.0 - band), 2.0 * (1.0 + band)}}};
  out.summary = "p=2 residual/drop " + fmt(rel2) + " <= " + fmt(tol2) + ", p=3 halving ratio " + fmt(ratio);
  return out;
}

// Criterion 7: phi_p^h nonincreasing step to step for f = 0, zero tolerance.
Outcome energy_descent(const VerifyOptions& opt) {
  Rng rng(opt.seed + 7);
  int runs = 0, violations = 0;
  long steps = 0;
  double worst_increase = 0.0;
  for (const double p : {2.0, 2.5, 3.0, 4.0}) {
    for (const int n_cells : {16, 64}) {
      const Grid grid(1.0, n_cells);
      std::vector<GridFunction> starts;
      for (int n = 1; n <= 3; ++n) starts.push_back(eigenfunction(n, p, grid).eigenfunction);
      for (int i = 0; i < 3; ++i) starts.push_back(random_function(grid, rng));
      for (const auto& u0 : starts) {
        for (const double dt : {1e-3, 1e-2}) {
          const Trajectory traj = heat_run(u0, p, dt, 0.5, 1e-10);
          ++runs;
          for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
            const double inc = traj.snapshots[k].energy - traj.snapshots[k - 1].energy;
            ++steps;
            if (inc > 0.0) {
              ++violations;
              worst_increase = std::max(worst_increase, inc);
            }
          }
        }
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.measured = {{"runs", runs}, {"steps", steps}, {"violations", violations}, {"max_increase", worst_increase}};
  out.summary = std::to_string(runs) + " runs, " + std::to_string(steps) + " steps, " + std::to_string(violations) +
                " increases";
  return out;
}

// Criterion 8: ||S(t)u - S(t)v||_{l2} nonincreasing up to 2 prox_tol per step.
Outcome contraction(const VerifyOptions& opt) {
  Rng rng(opt.seed + 8);
  const double prox_tol = 1e-10;
  const double slack = 2.0 * prox_tol * opt.tolerance_scale;
  int pairs = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const double p : {2.0, 2.5, 3.0, 4.0}) {
    const Grid grid(1.0, 32);
    for (int i = 0; i < 5; ++i) {
      const GridFunction u0 = random_function(grid, rng), v0 = random_function(grid, rng);
      const Trajectory a = heat_run(u0, p, 1e-3, 0.2, prox_tol), b = heat_run(v0, p, 1e-3, 0.2, prox_tol);
      ++pairs;
      for (std::size_t k = 1; k < std::min(a.snapshots.size(), b.snapshots.size()); ++k) {
        const double before = l2_norm(a.snapshots[k - 1].u - b.snapshots[k - 1].u);
        const double after = l2_norm(a.snapshots[k].u - b.snapshots[k].u);
        worst = std::max(worst, after - before);
        if (after - before > slack) ++violations;
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.measured = {{"pairs", pairs}, {"violations", violations}, {"max_gap_increase", worst}, {"slack", slack}};
  out.summary = std::to_string(pairs) + " pairs, max per-step gap change " + fmt(worst) + " <= " + fmt(slack);
  return out;
}

// Criterion 9: (I + lambda A_{p_n})^{-1} g -> (I + lambda A_3)^{-1} g.
Outcome resolvent(const VerifyOptions& opt) {
  const Grid grid(1.0, 64);
  const GridFunction g = eigenfunction(1, 3.0, grid).eigenfunction;
  const std::vector<double> ps{3.1, 3.01, 3.001};
  const auto rows = resolvent_convergence(g, ps, 3.0, 0.01, 1e-12);
  std::vector<double> gaps;
  Json table = Json::array();
  for (const auto& row : rows) {
    gaps.push_back(row.gap);
    table.push_back({{"p", row.p}, {"gap", row.gap}});
  }
  const double tol = 1e-3 * opt.tolerance_scale;
  Outcome out;
  out.pass = strictly_decreasing(gaps) && gaps.back() <= tol;
  out.measured = {{"rows", table}, {"final_gap", gaps.back()}, {"tol", tol}};
  out.summary = "gaps " + fmt(gaps[0]) + " > " + fmt(gaps[1]) + " > " + fmt(gaps[2]) + ", final <= " + fmt(tol);
  return out;
}

// Criterion 10: the k0 != k_inf existence experiment and its k0 = k_inf control.
Outcome existence(const VerifyOptions& opt) {
  const double p = 3.0, l = 1.0;
  const Grid grid(l, 128);
  const double residual_tol = 1e-6 * opt.tolerance_scale;
  Outcome out;

  // (a) nontrivial equilibria
  const Reaction r = Reaction::interpolated(p, 100.0, 10.0, 2.0);
  const IndexBracket bracket = index_bracket(r, l);
  const EquilibriumScan scan = find_equilibria(r, grid);
  std::vector<EquilibriumRecord> eqs = scan.records;
  int nontrivial = 0;
  double worst_residual = 0.0;
  Json records = Json::array();
  for (const auto& rec : eqs) {
    records.push_back(to_json(rec));
    if (rec.trivial) continue;
    ++nontrivial;
    worst_residual = std::max(worst_residual, rec.elliptic_residual);
  }
  const bool part_a = nontrivial >= 1 && worst_residual <= residual_tol;

  // (b) connecting orbits from 0 along +-e_1
  const auto trivial_it = std::find_if(eqs.begin(), eqs.end(), [](const auto& e) { return e.trivial; });
  const std::size_t from = static_cast<std::size_t>(trivial_it - eqs.begin());
  const GridFunction e1 = eigenfunction(1, p, grid).eigenfunction;
  const std::vector<SignedDirection> dirs{{1, 1.0, e1}, {1, -1.0, -e1}};
  EvolutionConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 60.0;
  cfg.prox_tol = 1e-11;
  cfg.snapshot_every = 10;
  cfg.steady_udot_tol = 1e-8;
  cfg.steady_window = 20;
  const ConnectionReport conn = connect(r, eqs, from, dirs, 1e-3, cfg);
  bool drops_positive = true;
  int to_nontrivial = 0;
  Json orbits = Json::array();
  for (const auto& orbit : conn.orbits) {
    drops_positive = drops_positive && orbit.lyapunov_drop > 0.0;
    if (!eqs[orbit.target].trivial) ++to_nontrivial;
    orbits.push_back(to_json(orbit, eqs));
  }
  Json outcomes = Json::array();
  for (const auto& d : conn.directions) outcomes.push_back(to_json(d));
  const bool part_b = to_nontrivial >= 1 && drops_positive;

  // (c) control: a0 = a_inf = 10 < lambda_1
  const Reaction control = Reaction::interpolated(p, 10.0, 10.0, 2.0);
  const EquilibriumScan control_scan = find_equilibria(control, grid);
  int control_nontrivial = 0;
  for (const auto& rec : control_scan.records) control_nontrivial += rec.trivial ? 0 : 1;
  const ProbeOptions probe{1e-3, 200.0, 0.05, 1e-10};
  const StabilityHint hint = stability_probe(trivial_record(control, grid), control, probe);
  const bool part_c = control_nontrivial == 0 && hint == StabilityHint::attracting;

  out.pass = part_a && part_b && part_c;
  out.measured = {
      {"lambda_1", eigenvalue(1, p, l)},
      {"lambda_2", eigenvalue(2, p, l)},
      {"k0", bracket.k0},
      {"k_inf", bracket.k_inf},
      {"slope_range", {scan.slope_min, scan.slope_max}},
      {"records", records},
      {"nontrivial", nontrivial},
      {"max_nontrivial_residual", worst_residual},
      {"residual_tol", residual_tol},
      {"orbits", orbits},
      {"directions", outcomes},
      {"control_nontrivial", control_nontrivial},
      {"control_slope_range", {control_scan.slope_min, control_scan.slope_max}},
      {"control_probe", to_string(hint)},
      {"parts", {{"a", part_a}, {"b", part_b}, {"c", part_c}}},
  };
  out.summary = std::to_string(nontrivial) + " nontrivial (residual " + fmt(worst_residual) + "), " +
                std::to_string(to_nontrivial) + " orbits 0 -> u, control " + std::to_string(control_nontrivial) +
                " nontrivial / probe " + to_string(hint);
  return out;
}

// Criterion 11: fitted Holder exponent of eps -> S(t)(u0 + eps d).
Outcome holder(const VerifyOptions& opt) {
  const Grid grid(1.0, 64);
  std::vector<double> eps;
  for (int j = 3; j <= 10; ++j) eps.push_back(std::ldexp(1.0, -j));
  const double band = 0.1 * opt.tolerance_scale;
  Outcome out;
  out.pass = true;
  Json rows = Json::array();
  std::string summary;
  for (const double p : {2.0, 3.0}) {
    const GridFunction u0 = eigenfunction(1, p, grid).eigenfunction;
    const GridFunction d = eigenfunction(2, p, grid).eigenfunction;
    const HolderResult h = holder_diagnostic(u0, d, eps, p, 0.1, 1e-3, 1e-12);
    bool ok = !h.inconclusive && h.slope >= 1.0 / p - band;
    if (p == 2.0) ok = ok && std::abs(h.slope - 1.0) <= band;
    out.pass = out.pass && ok;
    rows.push_back({{"p", p}, {"slope", h.slope}, {"inconclusive", h.inconclusive}, {"gaps", h.gaps}});
    summary += (summary.empty() ? "" : ", ") + std::string("p=") + fmt(p) + " slope " + fmt(h.slope);
  }
  out.measured = {{"epsilons", eps}, {"rows", rows}, {"band", band}};
  out.summary = summary;
  return out;
}

struct Entry {
  const char* name;
  Check check;
  double limit_s;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"eigen_classical", eigen_classical, 1.0}, {"eigen_oracle", eigen_oracle, 10.0},
      {"eigen_continuity", eigen_continuity, 5.0}, {"monotonicity", monotonicity, 5.0},
      {"smoothing", smoothing, 30.0},            {"energy_identity", energy_identity, 60.0},
      {"energy_descent", energy_descent, 0.0},   {"contraction", contraction, 10.0},
      {"resolvent", resolvent, 10.0},            {"existence", existence, 300.0},
      {"holder", holder, 60.0},                  {"determinism", nullptr, 0.0},
  };
  return entries;
}

bool selected(const VerifyOptions& opt, const std::string& name) {
  return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), name) != opt.only.end();
}

}  // namespace

const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

CriterionResult run_criterion(const std::string& name, const VerifyOptions& options) {
  const auto& entries = registry();
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return name == e.name; });
  if (it == entries.end()) throw std::invalid_argument("unknown criterion '" + name + "'");
  if (!it->check) {
    VerifyOptions only_this = options;
    only_this.only = {name};
    auto report = run_verification(only_this);
    return report.results.back();
  }
  CriterionResult result;
  result.id = static_cast<int>(it - entries.begin()) + 1;
  result.name = name;
  result.runtime_limit_s = it->limit_s;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o = it->check(options);
    result.pass = o.pass;
    result.measured = std::move(o.measured);
    result.summary = std::move(o.summary);
  } catch (const std::exception& e) {
    result.pass = false;
    result.measured = {{"error", e.what()}};
    result.summary = std::string("error: ") + e.what();
  }
  result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.runtime_ok = result.runtime_limit_s <= 0.0 || result.runtime_s < result.runtime_limit_s;
  result.pass = result.pass && result.runtime_ok;
  return result;
}

VerifyReport run_verification(const VerifyOptions& options) {
  VerifyReport report;
  std::vector<std::string> numeric;
  for (const auto& e : registry()) {
    if (e.check && selected(options, e.name)) {
      report.results.push_back(run_criterion(e.name, options));
      numeric.emplace_back(e.name);
    }
  }
  if (!selected(options, "determinism")) return report;

  // Rerun and compare measured values. Alone, determinism covers every other criterion.
  std::vector<CriterionResult> first = report.results;
  if (numeric.empty()) {
    for (const auto& e : registry()) {
      if (!e.check) continue;
      numeric.emplace_back(e.name);
      first.push_back(run_criterion(e.name, options));
    }
  }
  CriterionResult det;
  det.id = static_cast<int>(registry().size());
  det.name = "determinism";
  const auto start = std::chrono::steady_clock::now();
  Json mismatched = Json::array();
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const CriterionResult again = run_criterion(numeric[i], options);
    if (again.measured != first[i].measured) mismatched.push_back(numeric[i]);
  }
  det.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  det.pass = mismatched.empty();
  det.measured = {{"compared", numeric}, {"mismatched", mismatched}};
  det.summary = std::to_string(numeric.size() - mismatched.size()) + "/" + std::to_string(numeric.size()) +
                " criteria reproduced identical measured values";
  report.results.push_back(std::move(det));
  return report;
}

bool VerifyReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

Json VerifyReport::to_json() const {
  Json criteria = Json::array();
  for (const auto& r : results) {
    criteria.push_back({{"id", r.id},
                        {"name", r.name},
                        {"pass", r.pass},
                        {"summary", r.summary},
                        {"runtime_s", r.runtime_s},
                        {"runtime_limit_s", r.runtime_limit_s},
                        {"measured", r.measured}});
  }
  return {{"all_pass", all_pass()}, {"criteria", criteria}};
}

}  // namespace plap
