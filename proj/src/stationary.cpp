#include "plap/stationary.hpp"

#include "plap/ode.hpp"
#include "plap/parallel.hpp"
#include "plap/spectrum.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace plap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Accepted if |mismatch| <= accept_tol after bisection on [lo, hi].
std::optional<std::pair<double, double>> bisect_slope(const std::function<double(double)>& mismatch,
                                                      double lo, double m_lo, double hi, double m_hi,
                                                      double accept_tol) {
  double best_s = std::abs(m_lo) <= std::abs(m_hi) ? lo : hi;
  double best_m = std::min(std::abs(m_lo), std::abs(m_hi)) == std::abs(m_lo) ? m_lo : m_hi;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo))) break;
    const double mid = 0.5 * (lo + hi);
    const double m_mid = mismatch(mid);
    if (std::abs(m_mid) < std::abs(best_m)) {
      best_s = mid;
      best_m = m_mid;
    }
    if (m_mid == 0.0 || std::abs(m_mid) <= 1e-3 * accept_tol) break;
    if ((m_mid > 0.0) == (m_lo > 0.0)) {
      lo = mid;
      m_lo = m_mid;
    } else {
      hi = mid;
      m_hi = m_mid;
    }
  }
  if (std::abs(best_m) <= accept_tol) return std::make_pair(best_s, best_m);
  return std::nullopt;
}

bool opposite_signs(double a, double b) { return a != 0.0 && b != 0.0 && ((a > 0.0) != (b > 0.0)); }

// Builds a record from an accepted slope; nullopt if trivial or not refinable.
std::optional<EquilibriumRecord> build_record(const Reaction& r, const Grid& grid, double slope, double mismatch,
                                              const ShootingOptions& shooting, double residual_tol,
                                              int polish_max_iter) {
  const ShotResult shot = shoot(r, grid.length(), slope, shooting, &grid);
  const GridFunction& sampled = *shot.profile;
  const double scale = sup_norm(sampled);
  if (!(scale > 1e-8)) return std::nullopt;
  PolishResult polished = polish_equilibrium(sampled, r, residual_tol, polish_max_iter);
  if (!polished.converged) return std::nullopt;
  if (sup_norm(polished.u) < 1e-3 * scale || sup_distance(polished.u, sampled) > 0.5 * scale) {
    return std::nullopt;  // Newton slid onto another solution
  }
  EquilibriumRecord rec{std::move(polished.u)};
  rec.shooting_slope = slope;
  rec.boundary_mismatch = mismatch;
  rec.elliptic_residual = polished.residual;
  rec.sampled_residual = elliptic_residual(sampled, r);
  rec.lyapunov_value = lyapunov(rec.u, r);
  rec.n_sign_changes = count_sign_changes(rec.u, 1e-12 * sup_norm(rec.u));
  return rec;
}

EquilibriumRecord negated(const EquilibriumRecord& rec, const Reaction& r) {
  EquilibriumRecord out = rec;
  out.u *= -1.0;
  out.shooting_slope = -rec.shooting_slope;
  out.boundary_mismatch = -rec.boundary_mismatch;
  out.lyapunov_value = lyapunov(out.u, r);
  out.elliptic_residual = elliptic_residual(out.u, r);
  return out;
}

bool contains(const std::vector<EquilibriumRecord>& records, const GridFunction& u, double tol) {
  return std::any_of(records.begin(), records.end(),
                     [&](const EquilibriumRecord& e) { return sup_distance(e.u, u) <= tol; });
}

// Root of the boundary mismatch nearest to `s_prev`; nullopt on fold.
std::optional<std::pair<double, double>> track_slope(const Reaction& r, double l, double s_prev,
                                                     const ContinuationOptions& options) {
  auto mismatch = [&](double s) { return shoot(r, l, s, options.shooting).endpoint; };
  const double m0 = mismatch(s_prev);
  if (std::abs(m0) <= options.accept_tol) return std::make_pair(s_prev, m0);
  const double base = std::max(1.0, std::abs(s_prev));
  double delta = 1e-4 * base;
  for (int k = 0; k < options.max_expansions && delta <= base; ++k, delta *= 1.5) {
    for (const double sign : {1.0, -1.0}) {
      const double s = s_prev + sign * delta;
      const double m = mismatch(s);
      if (m == 0.0) return std::make_pair(s, m);
      if (opposite_signs(m0, m) && std::isfinite(m)) {
        const double lo = std::min(s_prev, s), hi = std::max(s_prev, s);
        const double m_lo = lo == s_prev ? m0 : m, m_hi = lo == s_prev ? m : m0;
        auto root = bisect_slope(mismatch, lo, m_lo, hi, m_hi, options.accept_tol);
        if (root) return root;
      }
    }
  }
  return std::nullopt;
}

ContinuationPath track(const std::function<Reaction(double)>& family, const EquilibriumRecord& seed,
                       std::span<const double> grid_values, const ContinuationOptions& options) {
  ContinuationPath path;
  if (grid_values.empty()) return path;
  const Grid& grid = seed.u.grid();
  path.points.push_back({grid_values[0], seed});
  for (std::size_t i = 1; i < grid_values.size(); ++i) {
    const double param = grid_values[i];
    const Reaction r = family(param);
    const EquilibriumRecord& prev = path.points.back().record;
    if (prev.trivial) {
      EquilibriumRecord rec = trivial_record(r, grid);
      if (options.probe_stability) rec.stability_hint = stability_probe(rec, r, options.probe);
      path.points.push_back({param, std::move(rec)});
      continue;
    }
    auto root = track_slope(r, grid.length(), prev.shooting_slope, options);
    std::optional<EquilibriumRecord> rec;
    if (root) {
      rec = build_record(r, grid, root->first, root->second, options.shooting, options.residual_tol, 60);
    }
    if (!rec) {
      path.fold_detected = true;
      path.fold_parameter = param;
      path.diagnostic = "branch lost at parameter " + std::to_string(param) + " (no nearby slope root)";
      break;
    }
    if (options.probe_stability) rec->stability_hint = stability_probe(*rec, r, options.probe);
    path.points.push_back({param, std::move(*rec)});
  }
  return path;
}

}  // namespace

std::string to_string(StabilityHint hint) {
  switch (hint) {
    case StabilityHint::attracting:
      return "attracting";
    case StabilityHint::repelling:
      return "repelling";
    case StabilityHint::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

ShotResult shoot(const Reaction& r, double l, double slope, const ShootingOptions& options,
                 const Grid* sample_grid) {
  if (!std::isfinite(slope)) throw std::invalid_argument("shooting slope must be finite");
  if (!(l > 0.0)) throw std::invalid_argument("interval length must be positive");
  if (sample_grid && std::abs(sample_grid->length() - l) > 1e-12 * l) {
    throw std::invalid_argument("sample grid length differs from shooting interval");
  }
  const double p = r.p();
  const double inv = 1.0 / (p - 1.0);
  const double pc = p / (p - 1.0);

  ShotResult result;
  std::optional<GridFunction> profile;
  if (sample_grid) profile.emplace(*sample_grid);

  if (slope == 0.0) {
    // f(x, 0) = 0 makes the zero state the unique solution of the IVP.
    result.profile = std::move(profile);
    return result;
  }

  OdeOptions ode_options;
  ode_options.rel_tol = options.rel_tol;
  ode_options.abs_tol = options.abs_tol;
  ode_options.initial_step = 1e-4 * l;
  DormandPrince ode(
      [&r, inv](double x, const DormandPrince::State& y) {
        const double w = y[1];
        return DormandPrince::State(std::copysign(std::pow(std::abs(w), inv), w), -r.evaluate(x, y[0]));
      },
      ode_options);
  ode.initialize(0.0, DormandPrince::State(0.0, flux(slope, p)));

  auto first_integral = [&](const DormandPrince::State& y) {
    return std::pow(std::abs(y[1]), pc) / pc + r.primitive(0.0, y[0]);
  };
  const double e0 = options.track_first_integral ? first_integral(ode.y()) : 0.0;

  int k = 0;
  const int n_nodes = sample_grid ? sample_grid->n_interior() : 0;
  while (ode.step(l)) {
    const auto& y = ode.y();
    if (std::abs(y[0]) > options.escape_bound || std::abs(y[1]) > options.escape_bound) {
      result.escaped = true;
      result.endpoint = y[0] >= 0.0 ? kInf : -kInf;
      return result;
    }
    if (options.track_first_integral) {
      result.first_integral_drift = std::max(result.first_integral_drift, std::abs(first_integral(y) - e0));
    }
    while (k < n_nodes && sample_grid->interior_node(k) <= ode.x()) {
      (*profile)[k] = ode.dense(sample_grid->interior_node(k))[0];
      ++k;
    }
  }
  result.endpoint = ode.y()[0];
  result.profile = std::move(profile);
  return result;
}

double elliptic_residual(const GridFunction& u, const Reaction& r) {
  return l2_norm(p_laplacian(u, r.p()) - nemytskii(r, u));
}

PolishResult polish_equilibrium(const GridFunction& guess, const Reaction& r, double tol, int max_iter) {
  const double p = r.p();
  const Grid& grid = guess.grid();
  const int n = guess.size();
  PolishResult out{guess, 0.0, 0, false};
  auto residual_of = [&](const GridFunction& u) { return p_laplacian(u, p) - nemytskii(r, u); };
  GridFunction g = residual_of(out.u);
  double res = l2_norm(g);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < max_iter && res > tol; ++it) {
    out.iterations = it + 1;
    const auto jac = p_laplacian_jacobian(out.u, p);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * n);
    for (int k = 0; k < n; ++k) {
      entries.emplace_back(k, k, jac.diagonal[k] - r.derivative(grid.interior_node(k), out.u[k]));
      if (k + 1 < n) {
        entries.emplace_back(k, k + 1, jac.off_diagonal[k]);
        entries.emplace_back(k + 1, k, jac.off_diagonal[k]);
      }
    }
    Eigen::SparseMatrix<double> J(n, n);
    J.setFromTriplets(entries.begin(), entries.end());
    lu.compute(J);
    if (lu.info() != Eigen::Success) break;
    const GridFunction::Vector step = lu.solve(-g.values());
    if (!step.allFinite()) break;

    bool accepted = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      GridFunction trial(grid, out.u.values() + t * step);
      GridFunction trial_g = residual_of(trial);
      const double trial_res = l2_norm(trial_g);
      if (trial_res < (1.0 - 1e-4 * t) * res || (t == 1.0 && trial_res < res)) {
        out.u = std::move(trial);
        g = std::move(trial_g);
        res = trial_res;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.residual = res;
  out.converged = res <= tol;
  return out;
}

EquilibriumRecord trivial_record(const Reaction& r, const Grid& grid) {
  EquilibriumRecord rec{GridFunction(grid)};
  rec.elliptic_residual = elliptic_residual(rec.u, r);
  rec.lyapunov_value = lyapunov(rec.u, r);
  rec.trivial = true;
  return rec;
}

StabilityHint stability_probe(const EquilibriumRecord& eq, const Reaction& r, const ProbeOptions& options) {
  const Grid& grid = eq.u.grid();
  const GridFunction e1 = eigenfunction(1, r.p(), grid).eigenfunction;
  const double eps = eq.trivial ? options.epsilon : options.epsilon * std::max(1e-12, sup_norm(eq.u));

  EvolutionConfig cfg;
  cfg.dt = std::min(options.dt, options.t_probe);
  cfg.t_end = options.t_probe;
  cfg.prox_tol = options.prox_tol;
  const long steps = static_cast<long>(std::ceil(options.t_probe / cfg.dt));
  cfg.snapshot_every = static_cast<int>(std::max(1L, steps / 2000));

  bool all_returned = true;
  for (const double sign : {1.0, -1.0}) {
    const Trajectory traj = evolve(eq.u + (sign * eps) * e1, r, cfg);
    if (traj.termination == Termination::blowup) return StabilityHint::repelling;
    if (traj.termination == Termination::solver_failure) return StabilityHint::undetermined;
    for (const auto& snap : traj.snapshots) {
      if (sup_distance(snap.u, eq.u) > 10.0 * eps) return StabilityHint::repelling;
    }
    // For p > 2 the decay toward a degenerate state is algebraic, so "returned"
    // means visibly closer rather than a fixed fraction.
    if (sup_distance(traj.final().u, eq.u) > 0.9 * eps) all_returned = false;
  }
  return all_returned ? StabilityHint::attracting : StabilityHint::undetermined;
}

double default_slope_bound(const Reaction& r, double l) {
  (void)l;
  const double m = std::max({r.growth_bound(), std::abs(r.slope_at_zero().max()), std::abs(r.slope_at_zero().min()),
                             std::abs(r.slope_at_infinity().max()), std::abs(r.slope_at_infinity().min()), 1.0});
  return 100.0 * std::pow(m / (r.p() - 1.0), 1.0 / r.p());
}

EquilibriumScan find_equilibria(const Reaction& r, const Grid& grid, const EquilibriumSearch& search) {
  if (search.n_samples < 8) throw std::invalid_argument("slope scan needs at least 8 samples");
  const double l = grid.length();
  EquilibriumScan scan;
  if (search.slope_range) {
    scan.slope_min = search.slope_range->first;
    scan.slope_max = search.slope_range->second;
  } else {
    const double bound = default_slope_bound(r, l);
    scan.slope_min = -bound;
    scan.slope_max = bound;
  }
  if (!(scan.slope_min < scan.slope_max)) throw std::invalid_argument("slope range must be increasing");
  scan.n_samples = search.n_samples;

  auto mismatch = [&](double s) { return shoot(r, l, s, search.shooting).endpoint; };
  std::vector<double> slopes(search.n_samples), values(search.n_samples);
  parallel_for(slopes.size(), [&](std::size_t j) {
    slopes[j] = scan.slope_min + (scan.slope_max - scan.slope_min) * static_cast<double>(j) / (search.n_samples - 1);
    values[j] = mismatch(slopes[j]);
  });

  std::vector<std::pair<double, double>> roots;
  for (int j = 0; j < search.n_samples; ++j) {
    if (values[j] == 0.0 && slopes[j] != 0.0) roots.emplace_back(slopes[j], 0.0);
    if (j + 1 < search.n_samples && opposite_signs(values[j], values[j + 1])) {
      ++scan.brackets;
      auto root = bisect_slope(mismatch, slopes[j], values[j], slopes[j + 1], values[j + 1], search.accept_tol);
      if (root) {
        roots.push_back(*root);
      } else {
        ++scan.rejected;
      }
    }
  }

  const double dedupe = 100.0 * search.accept_tol;
  std::vector<EquilibriumRecord> records;
  records.push_back(trivial_record(r, grid));
  for (const auto& [slope, m] : roots) {
    auto rec = build_record(r, grid, slope, m, search.shooting, search.residual_tol, search.polish_max_iter);
    if (!rec) continue;  // collapsed onto the trivial state or failed to refine
    if (!contains(records, rec->u, dedupe)) records.push_back(std::move(*rec));
  }
  if (r.is_odd()) {
    const std::size_t n = records.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (records[i].trivial) continue;
      EquilibriumRecord neg = negated(records[i], r);
      if (!contains(records, neg.u, dedupe)) records.push_back(std::move(neg));
    }
  }
  if (search.probe_stability) {
    for (auto& rec : records) rec.stability_hint = stability_probe(rec, r, search.probe);
  }
  std::stable_sort(records.begin(), records.end(), [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
    if (a.lyapunov_value != b.lyapunov_value) return a.lyapunov_value < b.lyapunov_value;
    return a.shooting_slope < b.shooting_slope;
  });
  scan.records = std::move(records);
  return scan;
}

ContinuationPath continue_in_mu(const Reaction& r0, const Reaction& r1, const EquilibriumRecord& seed,
                                std::span<const double> mu_grid, const ContinuationOptions& options) {
  return track([&](double mu) { return Reaction::blend(mu, r1, r0); }, seed, mu_grid, options);
}

ContinuationPath continue_in_p(const std::function<Reaction(double)>& family, const EquilibriumRecord& seed,
                               std::span<const double> p_grid, const ContinuationOptions& options) {
  return track(family, seed, p_grid, options);
}

}  // namespace plap
