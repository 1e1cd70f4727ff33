#include "plap/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace plap {
namespace {

void require_index(int n) {
  if (n < 1) throw std::invalid_argument("eigenvalue index must be >= 1");
}

void require_length(double l) {
  if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("interval length must be positive");
}

DormandPrince::Rhs eigen_rhs(double p, double lambda) {
  const double inv = 1.0 / (p - 1.0);
  return [p, lambda, inv](double, const DormandPrince::State& y) {
    const double w = y[1];
    const double du = std::copysign(std::pow(std::abs(w), inv), w);
    const double dw = -lambda * flux(y[0], p);
    return DormandPrince::State(du, dw);
  };
}

// Locates the zero of u inside the last accepted step by bisection on the dense output.
double refine_zero(const DormandPrince& ode) {
  double a = ode.x_previous();
  double b = ode.x();
  double ua = ode.y_previous()[0];
  for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, b); ++it) {
    const double m = 0.5 * (a + b);
    const double um = ode.dense(m)[0];
    if (um == 0.0) return m;
    if ((um > 0.0) == (ua > 0.0)) {
      a = m;
      ua = um;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double pi_p(double p) {
  require_p(p);
  return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
}

double eigenvalue(int n, double p, double l) {
  require_index(n);
  require_length(l);
  return (p - 1.0) * std::pow(n * pi_p(p) / l, p);
}

OdeOptions eigen_ode_options() {
  OdeOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-14;
  o.initial_step = 1e-4;
  return o;
}

double eigen_first_integral(double u, double w, double lambda, double p) {
  const double pc = p / (p - 1.0);
  return std::pow(std::abs(w), pc) / pc + lambda * std::pow(std::abs(u), p) / p;
}

EigenIvpTrace trace_eigen_ivp(double p, double lambda, double x_end, int max_zeros,
                              const OdeOptions& ode_options) {
  require_p(p);
  EigenIvpTrace trace;
  DormandPrince ode(eigen_rhs(p, lambda), ode_options);
  ode.initialize(0.0, DormandPrince::State(0.0, 1.0));
  const double e0 = eigen_first_integral(0.0, 1.0, lambda, p);
  while (ode.step(x_end)) {
    const auto& y = ode.y();
    trace.first_integral_drift =
        std::max(trace.first_integral_drift, std::abs(eigen_first_integral(y[0], y[1], lambda, p) - e0));
    const double u0 = ode.y_previous()[0];
    const double u1 = y[0];
    if (ode.x_previous() > 0.0 && u0 != 0.0 && (u1 == 0.0 || (u1 > 0.0) != (u0 > 0.0))) {
      trace.zeros.push_back(u1 == 0.0 ? ode.x() : refine_zero(ode));
      if (static_cast<int>(trace.zeros.size()) >= max_zeros) break;
    }
  }
  trace.x_end = ode.x();
  trace.steps = ode.steps_taken();
  return trace;
}

double shooting_eigenvalue(int n, double p, double l, double tol, const OdeOptions& ode) {
  require_index(n);
  require_p(p);
  require_length(l);
  if (!(tol > 0.0)) throw std::invalid_argument("shooting tolerance must be positive");

  // True when the n-th zero of the IVP lies in (0, l], i.e. lambda is at least lambda_n.
  auto too_large = [&](double lambda) {
    return static_cast<int>(trace_eigen_ivp(p, lambda, l, n, ode).zeros.size()) >= n;
  };

  double lo = 1.0, hi = 1.0;
  if (too_large(1.0)) {
    int it = 0;
    while (too_large(lo)) {
      hi = lo;
      lo *= 0.5;
      if (++it > 2000) throw BracketNotFound("no lower bracket for eigenvalue " + std::to_string(n));
    }
  } else {
    int it = 0;
    while (!too_large(hi)) {
      lo = hi;
      hi *= 2.0;
      if (++it > 2000 || !std::isfinite(hi)) {
        throw BracketNotFound("no upper bracket for eigenvalue " + std::to_string(n));
      }
    }
  }
  for (int it = 0; it < 400 && hi - lo > 0.25 * tol * lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (too_large(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Eigenpair eigenfunction(int n, double p, const Grid& grid) {
  require_index(n);
  require_p(p);
  const double l = grid.length();
  const double lambda = eigenvalue(n, p, l);

  GridFunction e(grid);
  DormandPrince ode(eigen_rhs(p, lambda), eigen_ode_options());
  ode.initialize(0.0, DormandPrince::State(0.0, 1.0));
  int k = 0;
  while (k < grid.n_interior() && ode.step(l)) {
    while (k < grid.n_interior() && grid.interior_node(k) <= ode.x()) {
      e[k] = ode.dense(grid.interior_node(k))[0];
      ++k;
    }
  }

  const double peak = sup_norm(e);
  if (!(peak > 0.0)) throw std::runtime_error("degenerate eigenfunction sample");
  e *= 1.0 / peak;
  for (int j = 0; j < e.size(); ++j) {
    if (e[j] != 0.0) {
      if (e[j] < 0.0) e *= -1.0;
      break;
    }
  }

  GridFunction rhs(grid);
  for (int j = 0; j < e.size(); ++j) rhs[j] = lambda * flux(e[j], p);
  const double residual = l2_norm(p_laplacian(e, p) - rhs);
  return Eigenpair{n, p, l, lambda, std::move(e), residual};
}

std::vector<ContinuityRow> continuity_in_p(int n, double p0, std::span<const double> deltas,
                                           double l) {
  const double base = eigenvalue(n, p0, l);
  std::vector<ContinuityRow> rows;
  rows.reserve(deltas.size());
  for (const double delta : deltas) {
    const double q = p0 + delta;
    const double lam = eigenvalue(n, q, l);
    rows.push_back({q, lam, std::abs(lam - base)});
  }
  return rows;
}

}  // namespace plap
