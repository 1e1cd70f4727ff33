#pragma once

#include <functional>

namespace plap {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature of f on [a, b] with bisection of
/// the worst subinterval until the summed error estimate drops below
/// max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-13,
                                    int max_subintervals = 500);

}  // namespace plap
