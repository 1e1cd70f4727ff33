#include "oracles.hpp"
#include "plap/semiflow.hpp"
#include "plap/spectrum.hpp"
#include "plap/stationary.hpp"

#include <gtest/gtest.h>

using namespace plap;

namespace {

Reaction existence_reaction() { return Reaction::interpolated(3.0, 100.0, 10.0, 2.0); }

// Closed-form primitive of the p = 3, s = 2 interpolated nonlinearity for u >= 0.
double existence_primitive(double u) {
  return 100.0 * u * u * u / 3.0 + (10.0 - 100.0) * (u * u * u / 3.0 - u + std::atan(u));
}

// Amplitude of the positive solution on (0, 1): half the interval is the time map.
double oracle_amplitude() {
  double lo = 1e-3, hi = 100.0;
  auto g = [](double a) { return oracle::time_map(a, 3.0, existence_primitive) - 0.5; };
  EXPECT_LT(g(lo) * g(hi), 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

const EquilibriumRecord* positive_record(const EquilibriumScan& scan) {
  for (const auto& rec : scan.records) {
    if (!rec.trivial && rec.u.values().minCoeff() >= 0.0) return &rec;
  }
  return nullptr;
}

}  // namespace

TEST(Shoot, ZeroSlopeGivesZero) {
  const Grid g(1.0, 8);
  const ShotResult s = shoot(existence_reaction(), 1.0, 0.0, {}, &g);
  EXPECT_EQ(s.endpoint, 0.0);
  ASSERT_TRUE(s.profile);
  EXPECT_EQ(sup_norm(*s.profile), 0.0);
}

TEST(Shoot, LinearSineOnPi) {
  const Grid g(std::numbers::pi, 50);
  const Reaction r = Reaction::homogeneous(2.0, CoefficientProfile::constant(1.0));
  const ShotResult s = shoot(r, std::numbers::pi, 2.5, {}, &g);
  EXPECT_NEAR(s.endpoint, 0.0, 1e-9);
  ASSERT_TRUE(s.profile);
  for (int k = 0; k < g.n_interior(); ++k) EXPECT_NEAR((*s.profile)[k], 2.5 * std::sin(g.interior_node(k)), 1e-9);
}

TEST(Shoot, FirstEigenvalueHitsZeroForAnySlope) {
  const double p = 3.0;
  const Reaction r = Reaction::homogeneous(p, CoefficientProfile::constant(oracle::eigenvalue(1, p, 1.0)));
  ShootingOptions opt;
  opt.track_first_integral = true;
  for (double slope : {0.1, 1.0, 10.0}) {
    const ShotResult s = shoot(r, 1.0, slope, opt);
    EXPECT_NEAR(s.endpoint / slope, 0.0, 1e-8);
    EXPECT_LE(s.first_integral_drift, 1e-8 * std::pow(slope, p));
  }
}

TEST(Shoot, EscapeReportsInfinity) {
  const Reaction r = Reaction::homogeneous(3.0, CoefficientProfile::constant(-1000.0));
  const ShotResult up = shoot(r, 1.0, 100.0);
  EXPECT_TRUE(up.escaped);
  EXPECT_EQ(up.endpoint, std::numeric_limits<double>::infinity());
  EXPECT_EQ(shoot(r, 1.0, -100.0).endpoint, -std::numeric_limits<double>::infinity());
}

TEST(Equilibria, ExistenceCaseMatchesTimeMap) {
  const Reaction r = existence_reaction();
  const Grid g(1.0, 128);
  const EquilibriumScan scan = find_equilibria(r, g);
  ASSERT_EQ(scan.records.size(), 3u);
  const EquilibriumRecord* pos = positive_record(scan);
  ASSERT_NE(pos, nullptr);
  EXPECT_EQ(pos->n_sign_changes, 0);
  EXPECT_LE(pos->elliptic_residual, 1e-9);

  // The shooting slope is exact for the ODE: |u'(0)|^p / p' = F(alpha).
  const double alpha = oracle_amplitude();
  const double slope = std::pow(1.5 * existence_primitive(alpha), 1.0 / 3.0);
  EXPECT_NEAR(pos->shooting_slope, slope, 1e-6 * slope);
  EXPECT_NEAR(sup_norm(pos->u), alpha, 1e-3 * alpha);

  // Odd reaction: the set is closed under negation; the trivial state is highest.
  for (const auto& rec : scan.records) {
    const bool mirrored = std::any_of(scan.records.begin(), scan.records.end(), [&](const EquilibriumRecord& o) {
      return sup_distance(o.u, -rec.u) < 1e-9;
    });
    EXPECT_TRUE(mirrored);
  }
  EXPECT_TRUE(scan.records.back().trivial);
  EXPECT_LT(scan.records.front().lyapunov_value, 0.0);
}

TEST(Equilibria, SampledResidualShrinksUnderRefinement) {
  const Reaction r = existence_reaction();
  double last = std::numeric_limits<double>::infinity();
  for (int n : {32, 64, 128}) {
    const EquilibriumScan scan = find_equilibria(r, Grid(1.0, n));
    const EquilibriumRecord* pos = positive_record(scan);
    ASSERT_NE(pos, nullptr);
    EXPECT_LT(pos->sampled_residual, last);
    last = pos->sampled_residual;
  }
}

TEST(Equilibria, ControlHasOnlyTrivialState) {
  const Reaction r = Reaction::interpolated(3.0, 10.0, 10.0, 2.0);
  const Grid g(1.0, 64);
  const EquilibriumScan scan = find_equilibria(r, g);
  ASSERT_EQ(scan.records.size(), 1u);
  EXPECT_TRUE(scan.records[0].trivial);
  // Exhaustive: u(l) keeps the sign of the slope everywhere in the scanned range.
  for (int i = 1; i <= 10000; ++i) {
    const double s = scan.slope_max * i / 10000.0;
    ASSERT_GT(shoot(r, 1.0, s).endpoint, 0.0) << s;
    ASSERT_LT(shoot(r, 1.0, -s).endpoint, 0.0) << s;
  }
}

TEST(Equilibria, PolishRecoversPerturbedState) {
  const Reaction r = existence_reaction();
  const Grid g(1.0, 64);
  const EquilibriumScan scan = find_equilibria(r, g);
  const EquilibriumRecord* pos = positive_record(scan);
  ASSERT_NE(pos, nullptr);
  const GridFunction bump = GridFunction::sample(g, [](double x) { return 1e-2 * std::sin(3 * std::numbers::pi * x); });
  const PolishResult pr = polish_equilibrium(pos->u + bump, r);
  ASSERT_TRUE(pr.converged);
  EXPECT_LE(pr.residual, 1e-9);
  EXPECT_LT(sup_distance(pr.u, pos->u), 1e-8);
}

TEST(Equilibria, RecordsAreFixedByTheFlow) {
  const Reaction r = existence_reaction();
  const Grid g(1.0, 64);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.prox_tol = 1e-12;
  for (const auto& rec : find_equilibria(r, g).records) {
    const Trajectory traj = evolve(rec.u, r, cfg);
    EXPECT_LT(sup_distance(traj.final().u, rec.u), 1e-6);
  }
}

TEST(Stability, TrivialStateFollowsBracketIndex) {
  const Grid g(1.0, 32);
  const Reaction sub = Reaction::interpolated(3.0, 10.0, 10.0, 2.0);
  const Reaction super = existence_reaction();
  EXPECT_EQ(index_bracket(sub, 1.0).k0, 0);
  EXPECT_EQ(index_bracket(super, 1.0).k0, 1);
  EXPECT_EQ(stability_probe(trivial_record(sub, g), sub), StabilityHint::attracting);
  EXPECT_EQ(stability_probe(trivial_record(super, g), super), StabilityHint::repelling);
}

TEST(Continuation, ConstantFamilyGivesConstantPath) {
  const Reaction r = existence_reaction();
  const Grid g(1.0, 64);
  const EquilibriumRecord seed = *positive_record(find_equilibria(r, g));
  const std::vector<double> mu{0.0, 0.25, 0.5, 0.75, 1.0};
  const ContinuationPath path = continue_in_mu(r, r, seed, mu);
  ASSERT_EQ(path.points.size(), mu.size());
  EXPECT_FALSE(path.fold_detected);
  for (const auto& pt : path.points) EXPECT_LT(sup_distance(pt.record.u, seed.u), 1e-9);
}

TEST(Continuation, BranchLostWhenSlopeDropsBelowFirstEigenvalue) {
  const Reaction r0 = existence_reaction();
  const Reaction r1 = Reaction::interpolated(3.0, 10.0, 10.0, 2.0);
  const Grid g(1.0, 64);
  const EquilibriumRecord seed = *positive_record(find_equilibria(r0, g));
  std::vector<double> mu;
  for (int i = 0; i <= 20; ++i) mu.push_back(i / 20.0);
  const ContinuationPath path = continue_in_mu(r0, r1, seed, mu);
  EXPECT_TRUE(path.fold_detected);
  EXPECT_LT(path.points.size(), mu.size());
  EXPECT_EQ(path.fold_parameter, mu[path.points.size()]);
  EXPECT_FALSE(path.diagnostic.empty());
  // Amplitude shrinks toward the bifurcation from zero.
  for (std::size_t k = 1; k < path.points.size(); ++k) {
    EXPECT_LT(sup_norm(path.points[k].record.u), sup_norm(path.points[k - 1].record.u));
  }
}

TEST(Continuation, InPMatchesDirectSolve) {
  const Grid g(1.0, 64);
  auto family = [](double p) {
    const double l1 = eigenvalue(1, p, 1.0);
    return Reaction::interpolated(p, 2.0 * l1, 0.5 * l1, 2.0);
  };
  const EquilibriumRecord seed = *positive_record(find_equilibria(family(2.0), g));

  const std::vector<double> single{2.0};
  const ContinuationPath one = continue_in_p(family, seed, single);
  ASSERT_EQ(one.points.size(), 1u);
  EXPECT_EQ(one.points[0].record.u.values(), seed.u.values());

  std::vector<double> ps;
  for (int i = 0; i <= 20; ++i) ps.push_back(2.0 + i / 20.0);
  const ContinuationPath path = continue_in_p(family, seed, ps);
  ASSERT_EQ(path.points.size(), ps.size()) << path.diagnostic;
  const EquilibriumRecord* direct = positive_record(find_equilibria(family(3.0), g));
  ASSERT_NE(direct, nullptr);
  EXPECT_LT(sup_distance(path.points.back().record.u, direct->u), 1e-4);
}
