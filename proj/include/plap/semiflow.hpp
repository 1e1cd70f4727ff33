#pragma once

// Discrete gradient flow for u_t = (|u_x|^{p-2} u_x)_x + f(x, u) with Dirichlet data:
// Lie splitting of an explicit reaction step and a resolvent (proximal) step
//   u_{k+1} = (I + dt A_p^h)^{-1} (u_k + dt F(u_k)).

#include "plap/grid.hpp"
#include "plap/reaction.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace plap {

struct ProxOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

struct ProxResult {
  GridFunction v;
  /// ||v - u + h A_p^h(v)||_{l2}
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

class InnerSolveFailure : public std::runtime_error {
 public:
  InnerSolveFailure(GridFunction last_iterate, double residual);
  const GridFunction& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  GridFunction last_;
  double residual_;
};

/// Minimizes (1/2)||v - u||^2_h + h phi_p^h(v) by damped Newton (gradient fallback).
/// Converged means residual <= tol * max(1, ||u||_{l2}). Never throws on
/// non-convergence; see `converged`.
ProxResult prox_solve(const GridFunction& u, double h, double p, const ProxOptions& options = {});

/// As prox_solve, but throws InnerSolveFailure when the residual stays above tol.
GridFunction prox_step(const GridFunction& u, double h, double p, double tol = 1e-10, int max_iter = 100);

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double prox_tol = 1e-10;
  int max_newton = 100;
  /// Sup-norm trigger for blow-up; <= 0 selects 1e6 (1 + ||u0||_sup).
  double blowup_threshold = 0.0;
  int snapshot_every = 1;
  /// Retry a failed step as two half steps (up to 4 levels).
  bool allow_halving = false;
  /// Stop early once ||u_dot||_{l2} <= steady_udot_tol on `steady_window`
  /// consecutive snapshots; 0 disables.
  double steady_udot_tol = 0.0;
  int steady_window = 10;

  void validate() const;
};

struct TrajectorySnapshot {
  double t = 0.0;
  GridFunction u;
  double energy = 0.0;    // phi_p^h(u)
  double lyapunov = 0.0;  // phi_p^h(u) - sum F(x_i, u_i) dx
  double udot_l2 = 0.0;   // backward difference over the last step
  double sup = 0.0;
  double l2 = 0.0;
  /// Cumulative sum over all steps so far of dt ||u_dot||^2_{l2}.
  double dissipation = 0.0;
};

enum class Termination { completed, blowup, solver_failure };

std::string to_string(Termination t);

struct Trajectory {
  EvolutionConfig config;
  double p = 2.0;
  std::vector<TrajectorySnapshot> snapshots;
  Termination termination = Termination::completed;
  /// Time of blow-up or solver failure; final time otherwise.
  double termination_time = 0.0;
  bool reached_steady_state = false;
  long steps = 0;
  double max_prox_residual = 0.0;

  const TrajectorySnapshot& final() const { return snapshots.back(); }
};

/// phi_{p,f}^h(u) = phi_p^h(u) - sum_i F(x_i, u_i) dx.
double lyapunov(const GridFunction& u, const Reaction& r);

Trajectory evolve(const GridFunction& u0, const Reaction& r, const EvolutionConfig& cfg);

/// |phi(u(t_b)) - phi(u(t_a)) + sum_{t_a < t_k <= t_b} dt ||u_dot_k||^2|.
double energy_identity_residual(const Trajectory& traj, double t_a, double t_b);

struct SmoothingResult {
  double lhs = 0.0;  // t ||u_dot(t)||_{l2}
  double rhs = 0.0;  // sqrt(2) ||u0||_{l2}
  bool pass = false;
};

/// Pure p-Laplacian flow (f = 0) from u0 to t_check in `steps` implicit steps.
SmoothingResult smoothing_diagnostic(const GridFunction& u0, double p, double t_check,
                                     int steps = 1000, double prox_tol = 1e-12, double slack = 0.05);

struct HolderResult {
  std::vector<double> epsilons;
  std::vector<double> gaps;  // W^{1,p} seminorm of S(t)(u0 + eps d) - S(t)u0
  double slope = 0.0;
  bool inconclusive = false;
  bool pass = false;
};

/// Least-squares slope of log gap against log eps for the pure p-Laplacian flow.
/// Passes when slope >= 1/p - 0.1.
HolderResult holder_diagnostic(const GridFunction& u0, const GridFunction& direction,
                               std::span<const double> epsilons, double p, double t, double dt = 1e-3,
                               double prox_tol = 1e-12);

struct ResolventGap {
  double p = 0.0;
  double gap = 0.0;  // sup-norm distance of the two resolvents
};

/// Sup-norm gaps || (I + lambda A_{p_n})^{-1} g - (I + lambda A_{p0})^{-1} g ||.
std::vector<ResolventGap> resolvent_convergence(const GridFunction& g, std::span<const double> p_seq,
                                                double p0, double lambda, double prox_tol = 1e-12);

struct MonotonicityResult {
  double lhs = 0.0;  // <A u - A v, u - v>_h
  double rhs = 0.0;  // 2^{2-p} |u - v|_{W^{1,p}}^p
  double margin = 0.0;  // lhs - rhs, accumulated per cell
  bool pass = false;
};

MonotonicityResult monotonicity_check(const GridFunction& u, const GridFunction& v, double p);

}  // namespace plap
