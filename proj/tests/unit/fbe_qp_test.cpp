#include <gtest/gtest.h>

#include <cmath>

#include "nmsub/fbe_qp.hpp"
#include "nmsub/random.hpp"
#include "test_oracles.hpp"

namespace nmsub::qp {
namespace {

Point vec(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return x;
}

// n = 1, Q = 2, b = 0, lambda = 0.4, r = 0.3.
QPProblem scalar_problem() {
  return make_problem(Matrix::Constant(1, 1, 2.0), Point::Zero(1), 0.3, 0.4);
}

Point random_point(Rng& rng, Eigen::Index n, double lo, double hi) {
  Point x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

TEST(NearestCenter, Examples) {
  EXPECT_EQ(nearest_center(vec({2.4}), 4), vec({2}));
  EXPECT_EQ(nearest_center(vec({2.5}), 4), vec({2}));
  EXPECT_EQ(nearest_center(vec({-2.5}), 4), vec({-3}));
  EXPECT_EQ(nearest_center(vec({6.0, -7.2}), 4), vec({4, -4}));
}

TEST(ProjectOntoC, Examples) {
  const auto prob1 = make_problem(Matrix::Identity(1, 1), Point::Zero(1), 0.3);
  EXPECT_EQ(project_onto_C(vec({2.1}), prob1), vec({2.1}));
  EXPECT_DOUBLE_EQ(project_onto_C(vec({6.0}), prob1)[0], 4.3);

  const auto prob2 = make_problem(Matrix::Identity(2, 2), Point::Zero(2), 0.3);
  const auto z = project_onto_C(vec({0.5, 0.5}), prob2);
  EXPECT_NEAR(z[0], 0.3 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(z[1], 0.3 / std::sqrt(2.0), 1e-15);
}

// Per-center projection over all 81 centers, independent of the rounding rule.
TEST(ProjectOntoC, MatchesExhaustiveProjectionInTwoDimensions) {
  Rng rng(11);
  const auto prob = make_problem(Matrix::Identity(2, 2), Point::Zero(2), 0.2);
  for (int trial = 0; trial < 10000; ++trial) {
    const Point y = random_point(rng, 2, -6, 6);
    const auto z = project_onto_C(y, prob);
    EXPECT_TRUE(in_C(z, prob, 1e-12));
    const double best = testing::union_of_balls_distance(y, prob.radius, prob.grid_bound);
    EXPECT_NEAR((z - y).norm(), best, 1e-12);
  }
}

TEST(ProjectOntoC, NoSampledPointOfCIsCloser) {
  Rng rng(12);
  for (Eigen::Index n = 1; n <= 3; ++n) {
    const auto prob = make_problem(Matrix::Identity(n, n), Point::Zero(n),
                                   0.1 * std::sqrt(static_cast<double>(n)));
    // Sample C: a random center plus a random offset inside the ball.
    std::vector<Point> samples;
    while (samples.size() < 10000) {
      Point c(n), off(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        c[i] = static_cast<double>(static_cast<int>(rng.next() % 9) - 4);
        off[i] = rng.uniform(-prob.radius, prob.radius);
      }
      if (off.norm() <= prob.radius) samples.push_back(c + off);
    }
    for (int trial = 0; trial < 3000; ++trial) {
      const Point y = random_point(rng, n, -5, 5);
      const double d = (project_onto_C(y, prob) - y).norm();
      for (const auto& s : samples) ASSERT_LE(d, (s - y).norm() + 1e-12);
    }
  }
}

TEST(FbeValue, ScalarExamples) {
  const auto prob = scalar_problem();
  EXPECT_EQ(fbe_value(prob, vec({0.0})), 0.0);
  EXPECT_NEAR(fbe_value(prob, vec({0.5})), 0.05, 1e-15);
}

TEST(FbeValue, MatchesGridInfimum) {
  Rng rng(13);
  for (std::size_t n : {1u, 2u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto prob = generate_problem(n, 2, rng.next());
      const Point x = random_point(rng, static_cast<Eigen::Index>(n), -4, 4);
      const double ref = testing::fbe_grid_infimum(prob.Q, prob.b, prob.lambda, prob.radius,
                                                   prob.grid_bound, x);
      EXPECT_NEAR(fbe_value(prob, x), ref, 1e-5);
      // The exact infimum is never above a feasible sample.
      EXPECT_LE(fbe_value(prob, x), ref + 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(FbeValue, BoundedByObjectiveOnC) {
  Rng rng(14);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.next() % 3);
    const auto prob = generate_problem(n, 3, rng.next());
    Point x = nearest_center(random_point(rng, static_cast<Eigen::Index>(n), -4, 4), 4);
    Point off = random_point(rng, static_cast<Eigen::Index>(n), -1, 1);
    if (off.norm() > 0) off *= rng.uniform(0, prob.radius) / off.norm();
    x += off;
    ASSERT_TRUE(in_C(x, prob, 1e-12));
    const double f = quadratic_value(prob, x);
    EXPECT_LE(fbe_value(prob, x), f + 1e-12 * std::max(1.0, std::abs(f)));
  }
}

TEST(FbeSubgradient, ScalarExamples) {
  const auto prob = scalar_problem();
  const auto g = fbe_subgradient(prob, vec({0.5}));
  EXPECT_NEAR(g.w[0], 0.2, 1e-15);
  EXPECT_EQ(g.value, fbe_value(prob, vec({0.5})));
  EXPECT_EQ(fbe_subgradient(prob, vec({0.0})).w[0], 0.0);
  // Local closed form 0.2 x^2 near 0.5.
  const auto fd = testing::central_difference(
      [&](const Point& y) { return fbe_value(prob, y); }, vec({0.5}), 1e-6);
  EXPECT_NEAR(fd[0], 0.2, 1e-9);
}

bool near_projection_tie(const QPProblem& prob, const Point& x, double eps) {
  const Point y = x - prob.lambda * (prob.Q * x + prob.b);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double frac = y[i] - std::floor(y[i]);
    if (std::abs(frac - 0.5) < eps) return true;
    if (std::abs(std::abs(y[i]) - prob.grid_bound - 0.5) < eps) return true;
  }
  return false;
}

TEST(FbeSubgradient, MatchesFiniteDifferences) {
  Rng rng(15);
  int checked = 0;
  for (std::size_t n : {1u, 2u, 3u}) {
    for (int trial = 0; trial < 300; ++trial) {
      const auto prob = generate_problem(n, 1 + static_cast<int>(rng.next() % 9), rng.next());
      const Point x = random_point(rng, static_cast<Eigen::Index>(n), -4, 4);
      if (near_projection_tie(prob, x, 1e-6 * (1 + prob.lambda * prob.q_norm) * 100)) continue;
      const auto g = fbe_subgradient(prob, x);
      const auto fd = testing::central_difference(
          [&](const Point& y) { return fbe_value(prob, y); }, x, 1e-6);
      EXPECT_LE((fd - g.w).norm(), 1e-5 * g.w.norm()) << "n=" << n << " trial=" << trial;
      ++checked;
    }
  }
  EXPECT_GT(checked, 800);
}

TEST(FbeValue, PureProjectionMatchesDistanceForms) {
  Rng rng(16);
  for (Eigen::Index n = 1; n <= 3; ++n) {
    const double lambda = 0.7;
    const auto prob = make_problem(Matrix::Zero(n, n), Point::Zero(n), 0.25, lambda);
    for (int trial = 0; trial < 2000; ++trial) {
      const Point x = random_point(rng, n, -6, 6);
      const double dist = testing::union_of_balls_distance(x, prob.radius, prob.grid_bound);
      const double moreau = dist * dist / (2.0 * lambda);
      const double asplund = (x.squaredNorm() - dist * dist) / (2.0 * lambda);
      const double v = fbe_value(prob, x);
      EXPECT_NEAR(v, moreau, 1e-12 * std::max(1.0, moreau));
      EXPECT_NEAR(v, x.squaredNorm() / (2.0 * lambda) - asplund,
                  1e-12 * std::max(1.0, x.squaredNorm()));
    }
  }
}

TEST(QpDirection, ScalarExample) {
  const auto prob = scalar_problem();
  EXPECT_NEAR(qp_direction(prob, vec({0.2}))[0], -0.2 / 4.5, 1e-16);
}

TEST(QpDirection, EigenvectorIsScaled) {
  Matrix Q(2, 2);
  Q << 3, 1, 1, 3;  // eigenpairs (4, (1,1)), (2, (1,-1))
  const auto prob = make_problem(Q, Point::Zero(2), 0.1);
  const Point w = vec({1, 1});
  const auto d = qp_direction(prob, w);
  const double expect = -1.0 / (4.0 + 1.0 / prob.lambda);
  EXPECT_NEAR(d[0], expect, 1e-14);
  EXPECT_NEAR(d[1], expect, 1e-14);
}

TEST(QpDirection, ResidualAndSpectralBounds) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.next() % 6);
    const auto prob = generate_problem(n, 2, rng.next());
    NewtonDirection dir(prob);
    const Point w = random_point(rng, static_cast<Eigen::Index>(n), -10, 10);
    const auto d = dir.solve(w);
    const Matrix B = prob.Q + Matrix::Identity(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n)) / prob.lambda;
    EXPECT_LE((B * d + w).norm(), 1e-10 * std::max(1.0, w.norm()));
    const double a = *dir.declared_a();
    const double b = *dir.declared_b();
    EXPECT_LE(w.dot(d), -a * d.squaredNorm());
    EXPECT_LE(w.norm(), b * d.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(B);
    EXPECT_LE(a, es.eigenvalues().minCoeff());
    EXPECT_GE(b, es.eigenvalues().maxCoeff());
    EXPECT_GE(a, 0.25 * prob.q_norm * (1 - 1e-9));
    EXPECT_LE(b, 2.25 * prob.q_norm * (1 + 1e-9));
  }
}

TEST(SpectralNorm, MatchesEigensolver) {
  Rng rng(18);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.next() % 8);
    Matrix A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) A(i, j) = rng.uniform(-5, 5);
    const Matrix Q = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
    const double ref = es.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_NEAR(spectral_norm(Q), ref, 1e-9 * ref);
  }
  EXPECT_EQ(spectral_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(RoundAndScore, Examples) {
  Matrix Q(2, 2);
  Q << 1, 0.5, 0.5, -2;
  const Point b = vec({1, -3});
  const auto prob = make_problem(Q, b, 0.1);
  const auto r = round_and_score(prob, vec({3.7, -4.6}));
  EXPECT_EQ(r.z, vec({4, -4}));
  EXPECT_DOUBLE_EQ(r.value, 0.5 * (16 - 16 - 32) + 4 + 12);
  EXPECT_EQ(round_and_score(prob, vec({1, -2})).z, vec({1, -2}));
}

TEST(RoundAndScore, MatchesDenseEvaluation) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const auto prob = generate_problem(2, 2, rng.next());
    const auto r = round_and_score(prob, random_point(rng, 2, -5, 5));
    double v = 0.0;
    for (int i = 0; i < 2; ++i) {
      v += prob.b[i] * r.z[i];
      for (int j = 0; j < 2; ++j) v += 0.5 * r.z[i] * prob.Q(i, j) * r.z[j];
    }
    EXPECT_NEAR(r.value, v, 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST(GenerateProblem, RadiusDeterminismSymmetry) {
  const auto a = generate_problem(2, 2, 42);
  EXPECT_DOUBLE_EQ(a.radius, 0.1 * std::sqrt(2.0));
  const auto b = generate_problem(2, 2, 42);
  EXPECT_EQ(a.Q, b.Q);
  EXPECT_EQ(a.b, b.b);
  EXPECT_NE(a.Q, generate_problem(2, 2, 43).Q);
  for (std::size_t n : {1u, 3u, 7u}) {
    const auto p = generate_problem(n, 5, n);
    EXPECT_EQ(p.Q, p.Q.transpose().eval());
    EXPECT_LE(p.Q.cwiseAbs().maxCoeff(), 5.0);
    EXPECT_LE(p.b.cwiseAbs().maxCoeff(), 5.0);
    EXPECT_NEAR(p.lambda * p.q_norm, 0.8, 1e-15);
  }
}

TEST(RandomStart, InsideGridBox) {
  const auto prob = generate_problem(3, 2, 1);
  const auto x = random_start(prob, 5);
  EXPECT_EQ(x, random_start(prob, 5));
  EXPECT_LE(x.cwiseAbs().maxCoeff(), 4.0);
}

TEST(ExhaustiveGridOptimum, BeatsEveryGridPoint) {
  const auto prob = generate_problem(2, 2, 3);
  const auto best = exhaustive_grid_optimum(prob);
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) {
      EXPECT_LE(best.value, quadratic_value(prob, vec({double(i), double(j)})));
    }
  EXPECT_THROW(exhaustive_grid_optimum(generate_problem(8, 2, 3), 1000), std::invalid_argument);
}

TEST(ProblemJson, RoundTrip) {
  const auto prob = generate_problem(3, 4, 77);
  const auto j = to_json(prob);
  EXPECT_EQ(j.at("n"), 3);
  EXPECT_EQ(j.at("Q").size(), 9u);
  const auto back = problem_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.Q, prob.Q);
  EXPECT_EQ(back.b, prob.b);
  EXPECT_EQ(back.radius, prob.radius);
  EXPECT_EQ(back.lambda, prob.lambda);
  EXPECT_EQ(back.q_norm, prob.q_norm);
}

TEST(QPProblem, Validation) {
  Matrix Q(2, 2);
  Q << 1, 2, 3, 1;
  EXPECT_THROW(make_problem(Q, Point::Zero(2), 0.1), std::invalid_argument);
  EXPECT_THROW(make_problem(Matrix::Identity(2, 2), Point::Zero(3), 0.1), std::invalid_argument);
  EXPECT_THROW(make_problem(Matrix::Identity(2, 2), Point::Zero(2), 0.0), std::invalid_argument);
  EXPECT_THROW(make_problem(Matrix::Zero(2, 2), Point::Zero(2), 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace nmsub::qp
