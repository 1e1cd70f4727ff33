#pragma once

// Dirichlet spectrum of the one-dimensional p-Laplacian on (0, l).
//
// The closed form lambda_n = (p - 1) (n pi_p / l)^p with
// pi_p = 2 pi / (p sin(pi / p)) is trusted only because it is checked against
// an independent shooting computation on the first-order system
//   u' = sign(w) |w|^{1/(p-1)},   w' = -lambda |u|^{p-2} u,   u(0) = 0, w(0) = 1.

#include "plap/grid.hpp"
#include "plap/ode.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace plap {

class BracketNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Eigenpair {
  int n = 1;
  double p = 2.0;
  double l = 1.0;
  double lambda = 0.0;
  GridFunction eigenfunction;
  /// ||A_p^h e - lambda |e|^{p-2} e||_{l2} on the grid.
  double residual = 0.0;
};

double pi_p(double p);

/// lambda_n^(p) on (0, l), n >= 1.
double eigenvalue(int n, double p, double l);

/// Integration tolerances used by the eigenvalue shooting oracle.
OdeOptions eigen_ode_options();

/// Bisects lambda until the n-th zero of the IVP lands on x = l; relative tolerance `tol`.
double shooting_eigenvalue(int n, double p, double l, double tol,
                           const OdeOptions& ode = eigen_ode_options());

/// |w|^{p'} / p' + lambda |u|^p / p with p' = p / (p - 1); constant along the eigen IVP.
double eigen_first_integral(double u, double w, double lambda, double p);

struct EigenIvpTrace {
  std::vector<double> zeros;       // interior zeros of u in (0, x_end]
  double first_integral_drift = 0; // max |E(x) - E(0)| over accepted steps
  double x_end = 0.0;
  long steps = 0;
};

/// Integrates the eigen IVP on [0, x_end], stopping early after `max_zeros` zeros.
EigenIvpTrace trace_eigen_ivp(double p, double lambda, double x_end, int max_zeros,
                              const OdeOptions& ode = eigen_ode_options());

/// Eigenpair sampled on `grid` (whose length is l): sup-normalized, first lobe positive.
Eigenpair eigenfunction(int n, double p, const Grid& grid);

struct ContinuityRow {
  double q = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
};

/// (q, lambda_n^(q), |lambda_n^(q) - lambda_n^(p0)|) for q = p0 + delta.
std::vector<ContinuityRow> continuity_in_p(int n, double p0, std::span<const double> deltas,
                                           double l = 1.0);

}  // namespace plap
