#include "cssa/prox.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"

namespace cssa {
namespace {

using testing::numeric_prox;
using testing::Penalty;
using testing::prox_objective;
using testing::to_eigen;

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

TEST(Shrink, Scalar) {
  EXPECT_DOUBLE_EQ(shrink(1.2, 0.5), 0.7);
  EXPECT_EQ(shrink(-0.3, 0.5), 0.0);
  EXPECT_EQ(shrink(-2.5, 0.0), -2.5);
  EXPECT_DOUBLE_EQ(shrink(-2.5, 1.0), -1.5);
}

TEST(ProxL2, GroupShrinkExample) {
  const auto x = prox_l2(std::vector<double>{3.0, 4.0}, 1.0);
  EXPECT_NEAR(x[0], 2.4, 1e-15);
  EXPECT_NEAR(x[1], 3.2, 1e-15);
  const auto oracle = numeric_prox(to_eigen(std::vector<double>{3.0, 4.0}), Penalty{0, 1, 0});
  EXPECT_NEAR(oracle(0), 2.4, 1e-6);
  EXPECT_NEAR(oracle(1), 3.2, 1e-6);
}

TEST(ProxL2, InsideBallAndIdentity) {
  EXPECT_EQ(prox_l2(std::vector<double>{0.3, -0.4}, 0.5), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(prox_l2(std::vector<double>{0.3, -0.4}, 0.0), (std::vector<double>{0.3, -0.4}));
  EXPECT_EQ(prox_l2(std::vector<double>{0.0, 0.0, 0.0}, 1.0), (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(ProxL2, ScalarReducesToShrink) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_vector(rng, 1);
    const double tau = std::abs(random_vector(rng, 1)[0]);
    EXPECT_NEAR(prox_l2(a, tau)[0], shrink(a[0], tau), 1e-15);
  }
}

TEST(ProjectL1Ball, Examples) {
  EXPECT_EQ(project_l1_ball(std::vector<double>{0.2, -0.1}, 1.0), (std::vector<double>{0.2, -0.1}));
  const auto axis = project_l1_ball(std::vector<double>{2.0, 0.0}, 1.0);
  EXPECT_NEAR(axis[0], 1.0, 1e-15);
  EXPECT_NEAR(axis[1], 0.0, 1e-15);
  const auto diag = project_l1_ball(std::vector<double>{1.0, 1.0}, 1.0);
  EXPECT_NEAR(diag[0], 0.5, 1e-15);
  EXPECT_NEAR(diag[1], 0.5, 1e-15);
}

TEST(ProjectL1Ball, DiagonalAgreesWithBoundaryGridSearch) {
  // Boundary of the unit l1 ball parameterised by angle-like t in [0, 4).
  const std::vector<double> a{1.0, 1.0};
  double best = 1e300, bx = 0, by = 0;
  for (int i = 0; i < 400000; ++i) {
    const double t = 4.0 * i / 400000.0;
    const int seg = static_cast<int>(t);
    const double f = t - seg;
    const double sx[4] = {1 - f, -f, -(1 - f), f}, sy[4] = {f, 1 - f, -f, -(1 - f)};
    const double d = (sx[seg] - a[0]) * (sx[seg] - a[0]) + (sy[seg] - a[1]) * (sy[seg] - a[1]);
    if (d < best) best = d, bx = sx[seg], by = sy[seg];
  }
  const auto x = project_l1_ball(a, 1.0);
  EXPECT_NEAR(x[0], bx, 1e-4);
  EXPECT_NEAR(x[1], by, 1e-4);
}

TEST(ProjectL1Ball, FeasibleAndNearestAgainstBruteForce) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto a = random_vector(rng, n, 3.0);
    const double radius = 0.2 + 2.0 * u(rng);
    const auto x = project_l1_ball(a, radius);
    double l1 = 0.0;
    for (double v : x) l1 += std::abs(v);
    EXPECT_LE(l1, radius + 1e-12);
    // Random feasible points are never closer.
    const double d = dist(x, a);
    for (int s = 0; s < 2000; ++s) {
      std::vector<double> y = random_vector(rng, n, radius);
      double yl1 = 0.0;
      for (double v : y) yl1 += std::abs(v);
      if (yl1 > radius) for (double& v : y) v *= radius / yl1;
      EXPECT_GE(dist(y, a), d - 1e-12);
    }
  }
}

TEST(ProxLinf, Examples) {
  EXPECT_EQ(prox_linf(std::vector<double>{0.3, -0.2}, 1.0), (std::vector<double>{0.0, 0.0}));
  const auto x = prox_linf(std::vector<double>{3.0, 1.0}, 1.0);
  EXPECT_NEAR(x[0], 2.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  const auto oracle = numeric_prox(to_eigen(std::vector<double>{3.0, 1.0}), Penalty{0, 0, 1});
  EXPECT_NEAR(oracle(0), 2.0, 1e-5);
  EXPECT_NEAR(oracle(1), 1.0, 1e-5);

  // Rows inside the dual l1 ball come out as exact zeros, not rounding residue.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> row{u(rng), u(rng), u(rng)};
    double l1 = 0.0;
    for (double v : row) l1 += std::abs(v);
    EXPECT_EQ(prox_linf(row, l1 * 1.0000001), std::vector<double>(3, 0.0));
  }

  const std::vector<double> a{0.7, -1.3, 2.2};
  const auto tiny = prox_linf(a, 1e-12);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(tiny[i], a[i], 1e-10);
}

TEST(ProxLinf, MoreauIdentity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_vector(rng, 1 + trial % 5);
    const double tau = 0.05 + std::abs(random_vector(rng, 1)[0]);
    const auto p = prox_linf(a, tau);
    std::vector<double> scaled(a);
    for (double& v : scaled) v /= tau;
    const auto proj = project_l1_ball(scaled, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(p[i] + tau * proj[i], a[i], 1e-12);
  }
}

TEST(ProxL1L2, CompositionExample) {
  const auto x = prox_l1_l2(std::vector<double>{3.0, 4.0}, {1.0, 1.0});
  const double f = 1.0 - 1.0 / std::sqrt(13.0);
  EXPECT_NEAR(x[0], 2.0 * f, 1e-15);
  EXPECT_NEAR(x[1], 3.0 * f, 1e-15);
  EXPECT_NEAR(x[0], 1.4453, 1e-4);
  EXPECT_NEAR(x[1], 2.1680, 1e-4);
  const auto oracle = numeric_prox(to_eigen(std::vector<double>{3.0, 4.0}), Penalty{1, 1, 0});
  EXPECT_NEAR(oracle(0), x[0], 1e-5);
  EXPECT_NEAR(oracle(1), x[1], 1e-5);
}

TEST(ProxL1L2, Reductions) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_vector(rng, 1 + trial % 5);
    const double w = std::abs(random_vector(rng, 1)[0]);
    EXPECT_EQ(prox_l1_l2(a, {0.0, w}), prox_l2(a, w));
    EXPECT_EQ(prox_l1_l2(a, {w, 0.0}), shrink(a, w));
  }
}

// Every operator is the prox of a convex function, hence nonexpansive.
TEST(Prox, Nonexpansive) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto a = random_vector(rng, n), b = random_vector(rng, n);
    const double tau = 0.01 + std::abs(random_vector(rng, 1)[0]);
    const double d = dist(a, b) + 1e-12;
    EXPECT_LE(dist(shrink(a, tau), shrink(b, tau)), d);
    EXPECT_LE(dist(prox_l2(a, tau), prox_l2(b, tau)), d);
    EXPECT_LE(dist(prox_linf(a, tau), prox_linf(b, tau)), d);
    EXPECT_LE(dist(prox_l1_l2(a, {tau, 0.5 * tau}), prox_l1_l2(b, {tau, 0.5 * tau})), d);
    EXPECT_LE(dist(project_l1_ball(a, tau), project_l1_ball(b, tau)), d);
  }
}

// No point of a dense random search beats the prox output on its objective.
TEST(Prox, BeatsRandomSearch) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto a = random_vector(rng, n);
    const double tau = 0.05 + std::abs(random_vector(rng, 1)[0]);
    const double kappa = 0.05 + std::abs(random_vector(rng, 1)[0]);
    const Eigen::VectorXd av = to_eigen(a);
    const std::pair<Penalty, std::vector<double>> cases[] = {
        {Penalty{tau, 0, 0}, shrink(a, tau)},
        {Penalty{0, tau, 0}, prox_l2(a, tau)},
        {Penalty{0, 0, tau}, prox_linf(a, tau)},
        {Penalty{tau, kappa, 0}, prox_l1_l2(a, {tau, kappa})},
    };
    for (const auto& [pen, out] : cases) {
      const double f = prox_objective(to_eigen(out), av, pen);
      double best = prox_objective(av, av, pen);
      best = std::min(best, prox_objective(Eigen::VectorXd::Zero(n), av, pen));
      for (int s = 0; s < 50; ++s) {
        Eigen::VectorXd y = to_eigen(random_vector(rng, n, 2.0));
        best = std::min(best, prox_objective(y, av, pen));
        // local perturbations of the candidate
        Eigen::VectorXd z = to_eigen(out) + 1e-3 * to_eigen(random_vector(rng, n, 1.0));
        best = std::min(best, prox_objective(z, av, pen));
      }
      EXPECT_LE(f, best + 1e-6);
    }
  }
}

}  // namespace
}  // namespace cssa
