#include "oracles.hpp"
#include "plap/reaction.hpp"
#include "plap/spectrum.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace plap;

TEST(Coefficient, ConstantAndTable) {
  const auto c = CoefficientProfile::constant(2.5);
  EXPECT_TRUE(c.is_constant());
  EXPECT_EQ(c(0.3), 2.5);
  const auto t = CoefficientProfile::table(2.0, {0.0, 4.0, 2.0});
  EXPECT_DOUBLE_EQ(t(0.5), 2.0);
  EXPECT_DOUBLE_EQ(t(1.5), 3.0);
  EXPECT_DOUBLE_EQ(t(5.0), 2.0);
  EXPECT_EQ(t.min(), 0.0);
  EXPECT_EQ(t.max(), 4.0);
  const auto mix = CoefficientProfile::combine(0.5, t, 2.0, c);
  EXPECT_DOUBLE_EQ(mix(1.0), 0.5 * 4.0 + 5.0);
  EXPECT_THROW(CoefficientProfile::table(1.0, {1.0}), std::invalid_argument);
  EXPECT_THROW(CoefficientProfile::constant(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Reaction, HomogeneousClosedForms) {
  const Reaction r = Reaction::homogeneous(3.0, CoefficientProfile::constant(2.0));
  EXPECT_EQ(r.form(), ReactionForm::homogeneous);
  EXPECT_DOUBLE_EQ(r(0.0, -2.0), -8.0);
  EXPECT_DOUBLE_EQ(r.primitive(0.0, -2.0), 2.0 * 8.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.derivative(0.0, -2.0), 2.0 * 2.0 * 2.0);
  EXPECT_TRUE(r.is_odd());
  EXPECT_FALSE(r.depends_on_x());
  EXPECT_DOUBLE_EQ(r.lipschitz(2.0), 2.0 * 2.0 * 2.0);
  EXPECT_EQ(r.growth_bound(), 2.0);
}

TEST(Reaction, TableCoefficientDependsOnX) {
  const Reaction r = Reaction::homogeneous(2.0, CoefficientProfile::table(1.0, {1.0, 3.0}));
  EXPECT_TRUE(r.depends_on_x());
  EXPECT_DOUBLE_EQ(r(0.5, 2.0), 4.0);
  EXPECT_EQ(r.slope_at_zero().max(), 3.0);
}

TEST(Reaction, InterpolatedLimitsAndPrimitive) {
  const double p = 3.0, a0 = 100.0, a_inf = 10.0, s = 2.0;
  const Reaction r = Reaction::interpolated(p, a0, a_inf, s);
  EXPECT_EQ(r.parameters(), (std::vector<double>{a0, a_inf, s}));
  // Asymptotic slopes are the limits of f(u) / (|u|^{p-2} u).
  EXPECT_NEAR(r(0.0, 1e-6) / flux(1e-6, p), a0, 1e-6);
  EXPECT_NEAR(r(0.0, 1e6) / flux(1e6, p), a_inf, 1e-6);
  // Closed form primitive for p = 3, s = 2: a0 u^3 / 3 + (a_inf - a0)(u^3 / 3 - u + atan u).
  for (double u : {0.1, 0.7, 2.0, 15.0, -3.0}) {
    const double v = std::abs(u);
    const double expected = a0 * v * v * v / 3 + (a_inf - a0) * (v * v * v / 3 - v + std::atan(v));
    EXPECT_NEAR(r.primitive(0.0, u), expected, 1e-11 * std::max(1.0, std::abs(expected))) << u;
  }
  for (double u : {0.05, 0.8, 3.0, -1.7}) {
    const double h = 1e-6;
    EXPECT_NEAR(r.derivative(0.0, u), (r(0.0, u + h) - r(0.0, u - h)) / (2 * h), 1e-5 * (1 + std::abs(r.derivative(0.0, u))));
    EXPECT_NEAR(r(0.0, -u), -r(0.0, u), 1e-15 * std::abs(r(0.0, u)));
  }
  EXPECT_THROW(Reaction::interpolated(3.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Reaction, LipschitzBoundDominatesSampledSlopes) {
  const Reaction r = Reaction::interpolated(3.0, 100.0, 10.0, 2.0);
  for (double radius : {0.5, 1.0, 4.0}) {
    double worst = 0.0;
    for (int i = -400; i < 400; ++i) {
      const double a = radius * i / 400.0, b = radius * (i + 1) / 400.0;
      worst = std::max(worst, std::abs(r(0.0, b) - r(0.0, a)) / (b - a));
    }
    EXPECT_GE(r.lipschitz(radius), worst) << radius;
  }
  EXPECT_THROW(r.lipschitz(-1.0), std::invalid_argument);
}

TEST(Reaction, CustomDefaultsUseQuadratureAndSampling) {
  Reaction::CustomSpec spec;
  spec.f = [](double x, double u) { return (1.0 + x) * u * std::abs(u) - u * u * u / (1 + u * u); };
  spec.slope_at_zero = CoefficientProfile::table(1.0, {1.0, 2.0});
  spec.slope_at_infinity = CoefficientProfile::table(1.0, {1.0, 2.0});
  const Reaction r = Reaction::custom(3.0, spec);
  EXPECT_TRUE(r.is_odd());
  EXPECT_TRUE(r.depends_on_x());
  const double x = 0.3, u = 1.4;
  const double expected = oracle::simpson([&](double t) { return spec.f(x, t); }, 0.0, u, 4000);
  EXPECT_NEAR(r.primitive(x, u), expected, 1e-9);
  EXPECT_NEAR(r.derivative(x, u), 2 * (1 + x) * u - (3 * u * u * (1 + u * u) - 2 * u * u * u * u) / std::pow(1 + u * u, 2),
              1e-6);
  EXPECT_GE(r.lipschitz(1.0), 3.0);  // max |f_u| on |u| <= 1 is 4 - 1 at x = 1, u = 1

  Reaction::CustomSpec even;
  even.f = [](double, double u) { return u * u; };
  EXPECT_FALSE(Reaction::custom(3.0, even).is_odd());
}

TEST(Reaction, BlendIsConvexCombination) {
  const Reaction a = Reaction::interpolated(3.0, 100.0, 10.0, 2.0);
  const Reaction b = Reaction::homogeneous(3.0, CoefficientProfile::constant(5.0));
  const Reaction m = Reaction::blend(0.25, a, b);
  for (double u : {-2.0, 0.3, 4.0}) {
    EXPECT_NEAR(m(0.0, u), 0.25 * a(0.0, u) + 0.75 * b(0.0, u), 1e-12 * std::abs(a(0.0, u)));
    EXPECT_NEAR(m.primitive(0.0, u), 0.25 * a.primitive(0.0, u) + 0.75 * b.primitive(0.0, u), 1e-10);
  }
  EXPECT_DOUBLE_EQ(m.slope_at_zero().max(), 0.25 * 100 + 0.75 * 5);
  EXPECT_DOUBLE_EQ(m.slope_at_infinity().max(), 0.25 * 10 + 0.75 * 5);
  EXPECT_TRUE(m.is_odd());
  EXPECT_THROW(Reaction::blend(0.5, a, Reaction::zero(2.0)), std::invalid_argument);
}

TEST(Nemytskii, NodewiseAndRescaled) {
  const Grid g(1.0, 8);
  oracle::Rng rng(4);
  const GridFunction u = oracle::random_function(g, rng, 2.0);
  const Reaction r = Reaction::interpolated(3.0, 100.0, 10.0, 2.0);
  const GridFunction f = nemytskii(r, u);
  for (int k = 0; k < u.size(); ++k) EXPECT_EQ(f[k], r(g.interior_node(k), u[k]));

  // rho^{1-p} F(rho u) -> f'_inf |u|^{p-2} u as rho -> inf, and -> f'_0 ... as rho -> 0.
  const GridFunction lim_inf = homogeneous_limit(r.slope_at_infinity(), 3.0, u);
  const GridFunction lim_0 = homogeneous_limit(r.slope_at_zero(), 3.0, u);
  double previous = 1e300;
  for (double rho : {1e2, 1e4, 1e6}) {
    const double gap = sup_distance(rescaled_nemytskii(r, u, rho), lim_inf);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-8);
  EXPECT_LT(sup_distance(rescaled_nemytskii(r, u, 1e-6), lim_0), 1e-6);
  EXPECT_THROW(rescaled_nemytskii(r, u, 1e300), std::overflow_error);
}

TEST(IndexBracket, CountsEigenvaluesBelowSlopes) {
  const double l1 = eigenvalue(1, 3.0, 1.0), l2 = eigenvalue(2, 3.0, 1.0);
  EXPECT_EQ(bracket_index(0.5 * l1, 0.9 * l1, 3.0, 1.0), 0);
  EXPECT_EQ(bracket_index(-100.0, 0.5 * l1, 3.0, 1.0), 0);
  EXPECT_EQ(bracket_index(1.1 * l1, 0.9 * l2, 3.0, 1.0), 1);
  // Touching an eigenvalue at one end of a nondegenerate range is allowed.
  EXPECT_EQ(bracket_index(l1, 0.5 * l2, 3.0, 1.0), 1);
  EXPECT_EQ(bracket_index(0.5 * l1, l1, 3.0, 1.0), 0);
  EXPECT_THROW(bracket_index(0.5 * l1, 1.5 * l1, 3.0, 1.0), ResonanceError);
  EXPECT_THROW(bracket_index(l1, l1, 3.0, 1.0), ResonanceError);

  const IndexBracket b = index_bracket(Reaction::interpolated(3.0, 100.0, 10.0, 2.0), 1.0);
  EXPECT_EQ(b.k0, 1);
  EXPECT_EQ(b.k_inf, 0);
  EXPECT_TRUE(b.existence_predicted());
  EXPECT_NEAR(b.margin0_lower, 100.0 - l1, 1e-9);
  EXPECT_NEAR(b.margin0_upper, l2 - 100.0, 1e-9);
  EXPECT_TRUE(std::isinf(b.margin_inf_lower));
  EXPECT_FALSE(index_bracket(Reaction::interpolated(3.0, 10.0, 10.0, 2.0), 1.0).existence_predicted());
}

TEST(IndexBracket, ClassicalSlopes) {
  // p = 2 on (0, pi): eigenvalues n^2.
  EXPECT_EQ(bracket_index(2.5, 2.5, 2.0, std::numbers::pi), 1);
  EXPECT_EQ(bracket_index(5.0, 8.0, 2.0, std::numbers::pi), 2);
  EXPECT_THROW(bracket_index(4.0, 4.0, 2.0, std::numbers::pi), ResonanceError);
}
