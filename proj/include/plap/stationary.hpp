#pragma once

// Stationary solutions of -(|u'|^{p-2} u')' = f(x, u), u(0) = u(l) = 0.
//
// Shooting runs in the variables (u, w) with w = |u'|^{p-2} u', so the right-hand
// side u' = sign(w) |w|^{1/(p-1)}, w' = -f(x, u) stays continuous where u' = 0.
// Accepted shots are refined on the grid by Newton on A_p^h u = F(u), which is
// exactly the fixed-point equation of the discrete semiflow.

#include "plap/grid.hpp"
#include "plap/reaction.hpp"
#include "plap/semiflow.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace plap {

enum class StabilityHint { attracting, repelling, undetermined };

std::string to_string(StabilityHint hint);

struct ShootingOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-13;
  /// |u| or |w| beyond this counts as escape (endpoint reported as +-inf).
  double escape_bound = 1e10;
  /// Track |w|^{p'}/p' + F(u) along the shot (meaningful for x-independent f).
  bool track_first_integral = false;
};

struct ShotResult {
  double endpoint = 0.0;  // u(l); +-inf on escape
  bool escaped = false;
  std::optional<GridFunction> profile;
  double first_integral_drift = 0.0;
};

/// Integrates u(0) = 0, u'(0) = slope to x = l; samples onto `sample_grid` if given.
ShotResult shoot(const Reaction& r, double l, double slope, const ShootingOptions& options = {},
                 const Grid* sample_grid = nullptr);

struct EquilibriumRecord {
  GridFunction u;
  double shooting_slope = 0.0;
  double boundary_mismatch = 0.0;
  /// ||A_p^h u - F(u)||_{l2} of the accepted grid solution.
  double elliptic_residual = 0.0;
  /// Same residual for the raw shooting profile sampled on the grid.
  double sampled_residual = 0.0;
  double lyapunov_value = 0.0;
  int n_sign_changes = 0;
  StabilityHint stability_hint = StabilityHint::undetermined;
  bool trivial = false;
};

double elliptic_residual(const GridFunction& u, const Reaction& r);

struct PolishResult {
  GridFunction u;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton on A_p^h u - F(u) = 0 from `guess`, with backtracking on the residual.
PolishResult polish_equilibrium(const GridFunction& guess, const Reaction& r, double tol = 1e-9,
                                int max_iter = 60);

EquilibriumRecord trivial_record(const Reaction& r, const Grid& grid);

struct ProbeOptions {
  double epsilon = 1e-2;
  double t_probe = 5.0;
  double dt = 1e-3;
  double prox_tol = 1e-10;
};

/// Flows eq +- eps e_1: attracting if both end within 0.9 eps, repelling if
/// either leaves the 10 eps tube (or blows up), undetermined otherwise.
StabilityHint stability_probe(const EquilibriumRecord& eq, const Reaction& r, const ProbeOptions& options = {});

struct EquilibriumSearch {
  std::optional<std::pair<double, double>> slope_range;
  int n_samples = 400;
  double accept_tol = 1e-8;
  double residual_tol = 1e-9;
  int polish_max_iter = 60;
  ShootingOptions shooting;
  bool probe_stability = false;
  ProbeOptions probe;
};

struct EquilibriumScan {
  std::vector<EquilibriumRecord> records;  // sorted by lyapunov_value, trivial included
  double slope_min = 0.0;
  double slope_max = 0.0;
  int n_samples = 0;
  int brackets = 0;  // sign changes of the boundary mismatch
  int rejected = 0;  // brackets that did not yield an accepted record
};

/// Heuristic scan half-width R* (M / (p - 1))^{1/p} with R* = 100: the initial
/// slope of a p-sine of amplitude R* under the largest slope M of f.
double default_slope_bound(const Reaction& r, double l);

EquilibriumScan find_equilibria(const Reaction& r, const Grid& grid, const EquilibriumSearch& search = {});

struct ContinuationOptions {
  double accept_tol = 1e-8;
  double residual_tol = 1e-9;
  int max_expansions = 40;
  ShootingOptions shooting;
  bool probe_stability = false;
  ProbeOptions probe;
};

struct ContinuationPoint {
  double parameter = 0.0;
  EquilibriumRecord record;
};

struct ContinuationPath {
  std::vector<ContinuationPoint> points;
  bool fold_detected = false;
  double fold_parameter = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostic;
};

/// Tracks `seed` (a solution for r0) along mu f_1 + (1 - mu) f_0 over `mu_grid`.
ContinuationPath continue_in_mu(const Reaction& r0, const Reaction& r1, const EquilibriumRecord& seed,
                                std::span<const double> mu_grid, const ContinuationOptions& options = {});

/// Tracks `seed` (a solution for family(p_grid[0])) over `p_grid`.
ContinuationPath continue_in_p(const std::function<Reaction(double)>& family, const EquilibriumRecord& seed,
                               std::span<const double> p_grid, const ContinuationOptions& options = {});

}  // namespace plap
