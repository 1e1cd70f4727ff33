#include "plap/reaction.hpp"

#include "plap/quadrature.hpp"
#include "plap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plap {

// ---------------------------------------------------------------- profiles

CoefficientProfile CoefficientProfile::constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("coefficient must be finite");
  CoefficientProfile profile;
  profile.values_ = {c};
  return profile;
}

CoefficientProfile CoefficientProfile::table(double length, std::vector<double> values) {
  if (!(length > 0.0)) throw std::invalid_argument("coefficient table needs a positive length");
  if (values.size() < 2) throw std::invalid_argument("coefficient table needs at least 2 values");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("coefficient table values must be finite");
  }
  CoefficientProfile profile;
  profile.length_ = length;
  profile.values_ = std::move(values);
  return profile;
}

double CoefficientProfile::operator()(double x) const {
  if (is_constant()) return values_[0];
  const double last = static_cast<double>(values_.size() - 1);
  const double t = std::clamp(x / length_ * last, 0.0, last);
  const auto i = std::min(static_cast<std::size_t>(t), values_.size() - 2);
  const double frac = t - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double CoefficientProfile::min() const { return *std::min_element(values_.begin(), values_.end()); }
double CoefficientProfile::max() const { return *std::max_element(values_.begin(), values_.end()); }

CoefficientProfile CoefficientProfile::combine(double alpha, const CoefficientProfile& a,
                                               double beta, const CoefficientProfile& b) {
  if (a.is_constant() && b.is_constant()) return constant(alpha * a.values_[0] + beta * b.values_[0]);
  if (!a.is_constant() && !b.is_constant() &&
      (a.length_ != b.length_ || a.values_.size() != b.values_.size())) {
    throw std::invalid_argument("cannot combine coefficient tables of different shape");
  }
  const CoefficientProfile& shape = a.is_constant() ? b : a;
  std::vector<double> values(shape.values_.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double va = a.is_constant() ? a.values_[0] : a.values_[i];
    const double vb = b.is_constant() ? b.values_[0] : b.values_[i];
    values[i] = alpha * va + beta * vb;
  }
  return table(shape.length_, std::move(values));
}

std::string to_string(ReactionForm form) {
  switch (form) {
    case ReactionForm::homogeneous:
      return "homogeneous";
    case ReactionForm::interpolated:
      return "interpolated";
    case ReactionForm::custom:
      return "custom";
  }
  return "unknown";
}

// ---------------------------------------------------------------- reactions

Reaction Reaction::homogeneous(double p, CoefficientProfile g) {
  require_p(p);
  Reaction r;
  r.p_ = p;
  r.form_ = ReactionForm::homogeneous;
  r.coefficient_ = g;
  r.slope0_ = g;
  r.slope_inf_ = g;
  r.f_ = [p, g](double x, double u) { return g(x) * flux(u, p); };
  r.primitive_ = [p, g](double x, double u) { return g(x) * std::pow(std::abs(u), p) / p; };
  r.derivative_ = [p, g](double x, double u) { return g(x) * flux_derivative(u, p); };
  const double gmax = std::max(std::abs(g.min()), std::abs(g.max()));
  r.lipschitz_ = [p, gmax](double radius) { return gmax * (p - 1.0) * std::pow(radius, p - 2.0); };
  r.growth_bound_ = gmax;
  r.odd_ = true;
  r.x_dependent_ = !g.is_constant();
  return r;
}

Reaction Reaction::interpolated(double p, double a0, double a_inf, double s) {
  require_p(p);
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("interpolation exponent s must be > 0");
  if (!std::isfinite(a0) || !std::isfinite(a_inf)) throw std::invalid_argument("slopes must be finite");
  Reaction r;
  r.p_ = p;
  r.form_ = ReactionForm::interpolated;
  r.parameters_ = {a0, a_inf, s};
  r.slope0_ = CoefficientProfile::constant(a0);
  r.slope_inf_ = CoefficientProfile::constant(a_inf);
  r.coefficient_ = r.slope0_;
  const double delta = a_inf - a0;
  auto a = [a0, delta, s](double radius) {
    const double rs = std::pow(radius, s);
    return std::isinf(rs) ? a0 + delta : a0 + delta * rs / (1.0 + rs);
  };
  r.f_ = [a, p](double, double u) { return a(std::abs(u)) * flux(u, p); };
  r.primitive_ = [p, a_inf, delta, s](double, double u) {
    const double radius = std::abs(u);
    if (radius == 0.0) return 0.0;
    // F = a_inf |u|^p / p + (a0 - a_inf) int_0^{|u|} t^{p-1} / (1 + t^s) dt
    const auto tail = integrate_adaptive(
        [p, s](double t) { return std::pow(t, p - 1.0) / (1.0 + std::pow(t, s)); }, 0.0, radius,
        0.0, 1e-14);
    return a_inf * std::pow(radius, p) / p - delta * tail.value;
  };
  r.derivative_ = [a, p, delta, s](double, double u) {
    const double radius = std::abs(u);
    const double rs = std::pow(radius, s);
    const double slope_term =
        radius == 0.0 ? 0.0 : delta * s * std::pow(radius, s + p - 2.0) / ((1.0 + rs) * (1.0 + rs));
    return slope_term + a(radius) * flux_derivative(u, p);
  };
  const double amax = std::max(std::abs(a0), std::abs(a_inf));
  r.lipschitz_ = [p, amax, delta, s](double radius) {
    return (amax * (p - 1.0) + std::abs(delta) * s / 4.0) * std::pow(radius, p - 2.0);
  };
  r.growth_bound_ = amax;
  r.odd_ = true;
  r.x_dependent_ = false;
  return r;
}

Reaction Reaction::custom(double p, CustomSpec spec) {
  require_p(p);
  if (!spec.f) throw std::invalid_argument("custom reaction needs f");
  Reaction r;
  r.p_ = p;
  r.form_ = ReactionForm::custom;
  r.f_ = spec.f;
  r.slope0_ = spec.slope_at_zero;
  r.slope_inf_ = spec.slope_at_infinity;
  r.coefficient_ = spec.slope_at_zero;
  const Function f = spec.f;
  r.primitive_ = spec.primitive ? spec.primitive : Function([f](double x, double u) {
    if (u == 0.0) return 0.0;
    const auto q = integrate_adaptive([&](double t) { return f(x, t); }, 0.0, u, 1e-10, 1e-13);
    return q.value;
  });
  r.derivative_ = spec.derivative ? spec.derivative : Function([f](double x, double u) {
    const double h = 1e-6 * std::max(1.0, std::abs(u));
    return (f(x, u + h) - f(x, u - h)) / (2.0 * h);
  });
  // Sampling grid for the properties not supplied by the caller.
  const double span = std::max({r.slope0_.length(), r.slope_inf_.length(), 1.0});
  if (spec.lipschitz) {
    r.lipschitz_ = spec.lipschitz;
  } else {
    const Function df = r.derivative_;
    r.lipschitz_ = [df, span](double radius) {
      double best = 0.0;
      for (int i = 0; i <= 32; ++i) {
        const double x = span * i / 32.0;
        for (int j = -200; j <= 200; ++j) best = std::max(best, std::abs(df(x, radius * j / 200.0)));
      }
      return 1.1 * best;
    };
  }
  r.growth_bound_ = spec.growth_bound;
  bool odd = true;
  bool x_dependent = false;
  for (int i = 0; i <= 8 && (odd || !x_dependent); ++i) {
    const double x = span * i / 8.0;
    for (double u : {1e-3, 0.1, 0.7, 1.0, 3.0, 10.0}) {
      const double fp = f(x, u);
      if (std::abs(fp + f(x, -u)) > 1e-12 * std::max(1.0, std::abs(fp))) odd = false;
      if (std::abs(fp - f(0.0, u)) > 1e-12 * std::max(1.0, std::abs(fp))) x_dependent = true;
    }
  }
  r.odd_ = odd;
  r.x_dependent_ = x_dependent;
  return r;
}

Reaction Reaction::blend(double mu, const Reaction& a, const Reaction& b) {
  if (a.p_ != b.p_) throw std::invalid_argument("cannot blend reactions with different p");
  CustomSpec spec;
  const double nu = 1.0 - mu;
  spec.f = [mu, nu, a, b](double x, double u) { return mu * a.evaluate(x, u) + nu * b.evaluate(x, u); };
  spec.primitive = [mu, nu, a, b](double x, double u) {
    return mu * a.primitive(x, u) + nu * b.primitive(x, u);
  };
  spec.derivative = [mu, nu, a, b](double x, double u) {
    return mu * a.derivative(x, u) + nu * b.derivative(x, u);
  };
  spec.slope_at_zero = CoefficientProfile::combine(mu, a.slope0_, nu, b.slope0_);
  spec.slope_at_infinity = CoefficientProfile::combine(mu, a.slope_inf_, nu, b.slope_inf_);
  spec.lipschitz = [mu, nu, a, b](double radius) {
    return std::abs(mu) * a.lipschitz(radius) + std::abs(nu) * b.lipschitz(radius);
  };
  spec.growth_bound = std::abs(mu) * a.growth_bound_ + std::abs(nu) * b.growth_bound_;
  Reaction r = custom(a.p_, std::move(spec));
  r.odd_ = a.odd_ && b.odd_;
  r.x_dependent_ = a.x_dependent_ || b.x_dependent_;
  return r;
}

double Reaction::primitive(double x, double u) const { return primitive_(x, u); }
double Reaction::derivative(double x, double u) const { return derivative_(x, u); }

double Reaction::lipschitz(double radius) const {
  if (!(radius >= 0.0)) throw std::invalid_argument("Lipschitz radius must be non-negative");
  return lipschitz_(radius);
}

// ---------------------------------------------------------------- operators

GridFunction nemytskii(const Reaction& r, const GridFunction& u) {
  GridFunction out(u.grid());
  for (int k = 0; k < u.size(); ++k) out[k] = r.evaluate(u.grid().interior_node(k), u[k]);
  return out;
}

GridFunction rescaled_nemytskii(const Reaction& r, const GridFunction& u, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("scale must be positive");
  const double factor = std::pow(rho, 1.0 - r.p());
  GridFunction out(u.grid());
  for (int k = 0; k < u.size(); ++k) {
    const double scaled = rho * u[k];
    const double value = factor * r.evaluate(u.grid().interior_node(k), scaled);
    if (!std::isfinite(scaled) || !std::isfinite(value)) {
      throw std::overflow_error("rescaled Nemytskii operator overflowed at scale " + std::to_string(rho));
    }
    out[k] = value;
  }
  return out;
}

GridFunction homogeneous_limit(const CoefficientProfile& slope, double p, const GridFunction& u) {
  GridFunction out(u.grid());
  for (int k = 0; k < u.size(); ++k) out[k] = slope(u.grid().interior_node(k)) * flux(u[k], p);
  return out;
}

int bracket_index(double slope_min, double slope_max, double p, double l) {
  if (slope_min > slope_max) std::swap(slope_min, slope_max);
  constexpr double kTouch = 1e-12;
  auto touches = [](double a, double b) { return std::abs(a - b) <= kTouch * std::max(std::abs(a), std::abs(b)); };

  int k = 0;
  while (eigenvalue(k + 1, p, l) <= slope_min) {
    if (++k > 1'000'000) throw std::invalid_argument("slope too large to bracket");
  }
  const double upper = eigenvalue(k + 1, p, l);
  if (slope_max > upper && !touches(slope_max, upper)) {
    throw ResonanceError("slope range [" + std::to_string(slope_min) + ", " + std::to_string(slope_max) +
                         "] contains eigenvalue lambda_" + std::to_string(k + 1));
  }
  const bool flat = touches(slope_min, slope_max);
  if (flat && ((k >= 1 && touches(slope_min, eigenvalue(k, p, l))) || touches(slope_max, upper))) {
    throw ResonanceError("slope is identically an eigenvalue (resonant)");
  }
  return k;
}

IndexBracket index_bracket(const Reaction& r, double l) {
  const double p = r.p();
  const auto& s0 = r.slope_at_zero();
  const auto& si = r.slope_at_infinity();
  IndexBracket b;
  b.k0 = bracket_index(s0.min(), s0.max(), p, l);
  b.k_inf = bracket_index(si.min(), si.max(), p, l);
  constexpr double inf = std::numeric_limits<double>::infinity();
  b.margin0_lower = b.k0 == 0 ? inf : s0.min() - eigenvalue(b.k0, p, l);
  b.margin0_upper = eigenvalue(b.k0 + 1, p, l) - s0.max();
  b.margin_inf_lower = b.k_inf == 0 ? inf : si.min() - eigenvalue(b.k_inf, p, l);
  b.margin_inf_upper = eigenvalue(b.k_inf + 1, p, l) - si.max();
  return b;
}

}  // namespace plap
