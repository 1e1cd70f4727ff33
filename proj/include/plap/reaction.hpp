#pragma once

// Nonlinearities f(x, u) with f(x, 0) = 0 and p-homogeneous asymptotic slopes
//   f'_0(x)   = lim_{u -> 0}   f(x, u) / (|u|^{p-2} u),
//   f'_inf(x) = lim_{|u|->inf} f(x, u) / (|u|^{p-2} u).

#include "plap/grid.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plap {

/// Bounded coefficient on [0, l]: a constant, or a table at uniform nodes,
/// piecewise linear in between.
class CoefficientProfile {
 public:
  CoefficientProfile() = default;
  static CoefficientProfile constant(double c);
  static CoefficientProfile table(double length, std::vector<double> values);

  double operator()(double x) const;
  double min() const;
  double max() const;
  bool is_constant() const { return values_.size() == 1; }
  double length() const { return length_; }
  const std::vector<double>& values() const { return values_; }

  /// alpha * a + beta * b; tables must share length and size.
  static CoefficientProfile combine(double alpha, const CoefficientProfile& a, double beta,
                                    const CoefficientProfile& b);

 private:
  double length_ = 0.0;
  std::vector<double> values_{0.0};
};

enum class ReactionForm { homogeneous, interpolated, custom };

std::string to_string(ReactionForm form);

class ResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Reaction {
 public:
  using Function = std::function<double(double x, double u)>;

  struct CustomSpec {
    Function f;
    Function primitive;   // optional; adaptive quadrature of f otherwise
    Function derivative;  // optional; central differences of f otherwise
    CoefficientProfile slope_at_zero;
    CoefficientProfile slope_at_infinity;
    std::function<double(double)> lipschitz;  // optional; sampled estimate otherwise
    double growth_bound = 0.0;                // M in |f(x,u)| <= M |u|^{p-1}; 0 = unknown
  };

  /// f(x, u) = g(x) |u|^{p-2} u.
  static Reaction homogeneous(double p, CoefficientProfile g);
  /// f(x, u) = a(|u|) |u|^{p-2} u with a(r) = a0 + (a_inf - a0) r^s / (1 + r^s).
  static Reaction interpolated(double p, double a0, double a_inf, double s);
  static Reaction custom(double p, CustomSpec spec);
  /// f = 0.
  static Reaction zero(double p) { return homogeneous(p, CoefficientProfile::constant(0.0)); }
  /// mu * a + (1 - mu) * b; both must share p.
  static Reaction blend(double mu, const Reaction& a, const Reaction& b);

  double p() const { return p_; }
  ReactionForm form() const { return form_; }

  double evaluate(double x, double u) const { return f_(x, u); }
  double operator()(double x, double u) const { return f_(x, u); }
  /// F(x, u) = int_0^u f(x, t) dt.
  double primitive(double x, double u) const;
  /// d f / d u.
  double derivative(double x, double u) const;

  const CoefficientProfile& slope_at_zero() const { return slope0_; }
  const CoefficientProfile& slope_at_infinity() const { return slope_inf_; }

  /// Lipschitz constant of u -> f(x, u) on |u| <= radius, uniformly in x.
  double lipschitz(double radius) const;
  /// M with |f(x, u)| <= M |u|^{p-1}.
  double growth_bound() const { return growth_bound_; }
  /// f(x, -u) = -f(x, u).
  bool is_odd() const { return odd_; }
  /// f depends on x.
  bool depends_on_x() const { return x_dependent_; }

  /// Constructor parameters, for config echo: {a0, a_inf, s} or the g profile.
  const std::vector<double>& parameters() const { return parameters_; }
  const CoefficientProfile& coefficient() const { return coefficient_; }

 private:
  Reaction() = default;

  double p_ = 2.0;
  ReactionForm form_ = ReactionForm::homogeneous;
  Function f_;
  Function primitive_;
  Function derivative_;
  std::function<double(double)> lipschitz_;
  CoefficientProfile slope0_;
  CoefficientProfile slope_inf_;
  CoefficientProfile coefficient_;
  std::vector<double> parameters_;
  double growth_bound_ = 0.0;
  bool odd_ = true;
  bool x_dependent_ = false;
};

/// Nodewise F(u)(x_i) = f(x_i, u_i).
GridFunction nemytskii(const Reaction& r, const GridFunction& u);

/// rho^{1-p} F(rho u).  Throws std::overflow_error if the result is not finite.
GridFunction rescaled_nemytskii(const Reaction& r, const GridFunction& u, double rho);

/// x -> slope(x) |u(x)|^{p-2} u(x), the limit of rescaled_nemytskii.
GridFunction homogeneous_limit(const CoefficientProfile& slope, double p, const GridFunction& u);

struct IndexBracket {
  int k0 = 0;
  int k_inf = 0;
  /// min f'_0 - lambda_{k0}, lambda_{k0+1} - max f'_0 (and likewise at infinity);
  /// +inf when k = 0 on the lower side.
  double margin0_lower = 0.0;
  double margin0_upper = 0.0;
  double margin_inf_lower = 0.0;
  double margin_inf_upper = 0.0;

  bool existence_predicted() const { return k0 != k_inf; }
};

/// Index k with lambda_k <= min slope, max slope <= lambda_{k+1}; lambda_0 = -inf.
/// Throws ResonanceError when an eigenvalue lies strictly inside [min, max] or the
/// slope is identically an eigenvalue.
int bracket_index(double slope_min, double slope_max, double p, double l);

IndexBracket index_bracket(const Reaction& r, double l);

}  // namespace plap
