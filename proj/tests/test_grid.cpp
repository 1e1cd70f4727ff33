#include "oracles.hpp"
#include "plap/grid.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

using namespace plap;

TEST(Grid, NodesAndSpacing) {
  const Grid g(std::numbers::pi, 7);
  EXPECT_EQ(g.n_interior(), 6);
  EXPECT_DOUBLE_EQ(g.spacing(), std::numbers::pi / 7);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_EQ(g.node(7), std::numbers::pi);
  EXPECT_DOUBLE_EQ(g.interior_node(0), g.spacing());
  EXPECT_THROW(Grid(0.0, 4), std::invalid_argument);
  EXPECT_THROW(Grid(1.0, 1), std::invalid_argument);
  EXPECT_TRUE(Grid(1.0, 4) == Grid(1.0, 4));
  EXPECT_FALSE(Grid(1.0, 4) == Grid(1.0, 5));
}

TEST(GridFunction, BoundaryValuesAndSampling) {
  const Grid g(1.0, 4);
  const auto u = GridFunction::sample(g, [](double x) { return x * (1 - x); });
  EXPECT_EQ(u.size(), 3);
  EXPECT_EQ(u.node_value(0), 0.0);
  EXPECT_EQ(u.node_value(4), 0.0);
  EXPECT_DOUBLE_EQ(u.node_value(2), 0.25);
  EXPECT_THROW(GridFunction(g, GridFunction::Vector::Zero(4)), std::invalid_argument);
}

TEST(GridFunction, MismatchedGridsAreRejected) {
  const GridFunction a(Grid(1.0, 4)), b(Grid(1.0, 8)), c(Grid(2.0, 4));
  EXPECT_THROW(a + b, GridMismatch);
  EXPECT_THROW(inner_product(a, c), GridMismatch);
  EXPECT_THROW(sup_distance(a, b), GridMismatch);
}

TEST(GridFunction, Arithmetic) {
  const Grid g(1.0, 4);
  GridFunction u(g, GridFunction::Vector::Constant(3, 1.0));
  const GridFunction v = 2.0 * u - u + (-u);
  EXPECT_EQ(sup_norm(v), 0.0);
  u *= 3.0;
  EXPECT_EQ(u[1], 3.0);
}

class EnergyOracle : public ::testing::TestWithParam<double> {};

TEST_P(EnergyOracle, MatchesDirectSumAndGradient) {
  const double p = GetParam();
  oracle::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g(0.5 + trial * 0.1, 5 + trial);
    const GridFunction u = oracle::random_function(g, rng);
    EXPECT_NEAR(p_dirichlet_energy(u, p), oracle::energy(u, p), 1e-12 * oracle::energy(u, p));
    // A_p^h is the gradient of the energy with respect to the weighted pairing.
    const auto grad = oracle::energy_gradient(u, p);
    const GridFunction a = p_laplacian(u, p);
    // Finite-difference rounding scales with the largest component, not each one.
    double scale = 1.0;
    for (double gk : grad) scale = std::max(scale, std::abs(gk));
    for (int k = 0; k < u.size(); ++k) EXPECT_NEAR(a[k], grad[k], 1e-5 * scale);
  }
}

TEST_P(EnergyOracle, PairingIsEnergyScaled) {
  // <A u, u>_h = p phi(u) by p-homogeneity.
  const double p = GetParam();
  oracle::Rng rng(12);
  const Grid g(1.0, 16);
  const GridFunction u = oracle::random_function(g, rng);
  EXPECT_NEAR(inner_product(p_laplacian(u, p), u), p * p_dirichlet_energy(u, p), 1e-9 * p_dirichlet_energy(u, p));
}

TEST_P(EnergyOracle, JacobianMatchesFiniteDifferences) {
  const double p = GetParam();
  oracle::Rng rng(13);
  const Grid g(1.0, 9);
  const GridFunction u = oracle::random_function(g, rng);
  const auto jac = p_laplacian_jacobian(u, p);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(u.size(), u.size());
  for (int k = 0; k < u.size(); ++k) {
    dense(k, k) = jac.diagonal[k];
    if (k + 1 < u.size()) dense(k, k + 1) = dense(k + 1, k) = jac.off_diagonal[k];
  }
  for (int j = 0; j < u.size(); ++j) {
    GridFunction a = u, b = u;
    const double h = 1e-6;
    a[j] += h;
    b[j] -= h;
    const GridFunction col = p_laplacian(a, p) - p_laplacian(b, p);
    for (int k = 0; k < u.size(); ++k) EXPECT_NEAR(dense(k, j), col[k] / (2 * h), 1e-4 * (1 + std::abs(dense(k, j))));
  }
}

INSTANTIATE_TEST_SUITE_P(Exponents, EnergyOracle, ::testing::Values(2.0, 2.5, 3.0, 4.0, 6.0));

TEST(Operator, ClassicalSecondDifferenceAtP2) {
  const Grid g(1.0, 10);
  oracle::Rng rng(3);
  const GridFunction u = oracle::random_function(g, rng);
  const GridFunction a = p_laplacian(u, 2.0);
  const double h2 = g.spacing() * g.spacing();
  for (int k = 0; k < u.size(); ++k) {
    const double expected = -(u.node_value(k + 2) - 2 * u.node_value(k + 1) + u.node_value(k)) / h2;
    EXPECT_NEAR(a[k], expected, 1e-10 * (1 + std::abs(expected)));
  }
}

TEST(Operator, SineEnergyConvergesToContinuum) {
  // phi_2(sin) on (0, pi) = (1/2) int cos^2 = pi / 4, second order in dx.
  double previous = 1.0;
  for (int n : {16, 32, 64}) {
    const auto u = GridFunction::sample(Grid(std::numbers::pi, n), [](double x) { return std::sin(x); });
    const double err = std::abs(p_dirichlet_energy(u, 2.0) - std::numbers::pi / 4);
    EXPECT_LT(err, previous / 3.5);
    previous = err;
  }
}

TEST(Operator, RejectsSubquadraticExponent) {
  const GridFunction u(Grid(1.0, 4));
  EXPECT_THROW(p_dirichlet_energy(u, 1.5), std::invalid_argument);
  EXPECT_THROW(p_laplacian(u, std::nan("")), std::invalid_argument);
}

TEST(Norms, Definitions) {
  const Grid g(2.0, 4);  // dx = 0.5, interior nodes 0.5, 1, 1.5
  const GridFunction u(g, (GridFunction::Vector(3) << 1.0, -2.0, 0.5).finished());
  EXPECT_EQ(sup_norm(u), 2.0);
  EXPECT_DOUBLE_EQ(l2_norm(u), std::sqrt((1 + 4 + 0.25) * 0.5));
  // differences: 2, -6, 5, -1
  EXPECT_DOUBLE_EQ(w1p_seminorm(u, 2.0), std::sqrt((4 + 36 + 25 + 1) * 0.5));
  EXPECT_DOUBLE_EQ(norm(u, NormKind::sup()), 2.0);
  EXPECT_DOUBLE_EQ(norm(u, NormKind::w1p(3.0)), std::cbrt((8 + 216 + 125 + 1) * 0.5));
  EXPECT_DOUBLE_EQ(inner_product(u, u), l2_norm(u) * l2_norm(u));
}

TEST(Norms, SignChanges) {
  const Grid g(1.0, 7);
  const GridFunction u(g, (GridFunction::Vector(6) << 1.0, 0.0, -1.0, -2.0, 1e-14, 3.0).finished());
  EXPECT_EQ(count_sign_changes(u), 2);
  EXPECT_EQ(count_sign_changes(u, 1e-12), 2);
  EXPECT_EQ(count_sign_changes(GridFunction(g)), 0);
}

TEST(Tridiagonal, ThomasMatchesDenseSolve) {
  oracle::Rng rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 12;
  SymmetricTridiagonal<double> t;
  t.diagonal = Eigen::VectorXd::Constant(n, 4.0) + Eigen::VectorXd::NullaryExpr(n, [&] { return dist(rng); });
  t.off_diagonal = Eigen::VectorXd::NullaryExpr(n - 1, [&] { return dist(rng); });
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    dense(k, k) = t.diagonal[k];
    if (k + 1 < n) dense(k, k + 1) = dense(k + 1, k) = t.off_diagonal[k];
  }
  const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return dist(rng); });
  const Eigen::VectorXd x = t.solve(b);
  EXPECT_LT((dense.partialPivLu().solve(b) - x).norm(), 1e-12);
  EXPECT_LT((t.multiply(x) - b).norm(), 1e-12);
}

TEST(Scalar, LongDoubleInstantiation) {
  using G = BasicGrid<long double>;
  using F = BasicGridFunction<long double>;
  const F u = F::sample(G(1.0L, 64), [](long double x) { return x * (1 - x); });
  // phi_2 of x(1-x): int (1-2x)^2 / 2 = 1/6, exact for the midpoint differences up to dx^2/...
  EXPECT_NEAR(static_cast<double>(p_dirichlet_energy(u, 2.0L)), 1.0 / 6.0, 1e-4);
  EXPECT_EQ(p_laplacian(u, 2.0L).size(), 63);
}
