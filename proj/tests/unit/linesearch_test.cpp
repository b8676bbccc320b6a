#include <gtest/gtest.h>

#include <cmath>

#include "nmsub/errors.hpp"
#include "nmsub/linesearch.hpp"
#include "nmsub/mssc.hpp"
#include "nmsub/random.hpp"
#include "test_oracles.hpp"

namespace nmsub {
namespace {

using testing::Square;

Point scalar(double v) { return Point::Constant(1, v); }

MemoryWindow window_of(std::initializer_list<double> values, int mem_max) {
  MemoryWindow w(mem_max);
  std::size_t k = 0;
  for (double v : values) w.push(k++, v);
  return w;
}

TEST(MemoryWindow, WindowMaxExamples) {
  const auto w = window_of({3, 1, 2}, 5);
  EXPECT_EQ(w.window_max(0, 2), 2.0);
  EXPECT_EQ(w.window_max(1, 2), 2.0);
  EXPECT_EQ(w.window_max(5, 2), 3.0);  // clipped at index 0
}

TEST(MemoryWindow, RingBufferDropsOldEntries) {
  MemoryWindow w(2);
  for (std::size_t k = 0; k < 10; ++k) w.push(k, static_cast<double>(10 - k));
  EXPECT_EQ(w.capacity(), 3u);
  EXPECT_EQ(w.at(9), 1.0);
  EXPECT_EQ(w.at(7), 3.0);
  EXPECT_EQ(w.window_max(2, 9), 3.0);
  EXPECT_THROW(w.at(6), InternalConsistencyError);
  EXPECT_THROW(w.window_max(3, 9), InternalConsistencyError);
}

TEST(MemoryWindow, OutOfOrderPushIsInternalError) {
  MemoryWindow w(1);
  w.push(0, 1.0);
  EXPECT_THROW(w.push(2, 1.0), InternalConsistencyError);
}

TEST(MemoryWindow, MatchesBruteForceOverRandomHistories) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int mem_max = static_cast<int>(rng.next() % 7);
    MemoryWindow w(mem_max);
    std::vector<double> history;
    for (std::size_t k = 0; k < 40; ++k) {
      history.push_back(rng.uniform(-5, 5));
      w.push(k, history.back());
      const int m = static_cast<int>(rng.next() % static_cast<unsigned>(mem_max + 1));
      double ref = history[k];
      for (std::size_t i = k >= static_cast<std::size_t>(m) ? k - m : 0; i <= k; ++i) {
        ref = std::max(ref, history[i]);
      }
      EXPECT_EQ(w.window_max(m, k), ref);
    }
  }
}

ArmijoOptions options(double ref, bool strict = false) {
  ArmijoOptions o;
  o.tau_init = 1.0;
  o.sigma = 0.2;
  o.beta = 0.2;
  o.ref_value = ref;
  o.strict = strict;
  return o;
}

TEST(NonmonotoneArmijo, MonotoneExampleBacktracksOnce) {
  Square sq;
  const auto r = nonmonotone_armijo(sq, scalar(1), 1.0, scalar(2), scalar(-2), options(1.0));
  EXPECT_EQ(r.tau, 0.2);
  EXPECT_DOUBLE_EQ(r.x_new[0], 0.6);
  EXPECT_DOUBLE_EQ(r.f_new, 0.36);
  EXPECT_EQ(r.backtracks, 1);
  EXPECT_EQ(r.evaluations, 2u);
  EXPECT_EQ(sq.calls, 2u);
}

TEST(NonmonotoneArmijo, LargerReferenceAcceptsFullStep) {
  Square sq;
  const auto r = nonmonotone_armijo(sq, scalar(1), 1.0, scalar(2), scalar(-2), options(5.0));
  EXPECT_EQ(r.tau, 1.0);
  EXPECT_EQ(r.x_new[0], -1.0);
  EXPECT_EQ(r.f_new, 1.0);
  EXPECT_EQ(r.backtracks, 0);
  EXPECT_EQ(sq.calls, 1u);
}

TEST(NonmonotoneArmijo, SecondIterationOfSquare) {
  Square sq;
  const auto r =
      nonmonotone_armijo(sq, scalar(0.6), 0.36, scalar(1.2), scalar(-1.2), options(0.36));
  EXPECT_EQ(r.tau, 0.2);
  EXPECT_DOUBLE_EQ(r.x_new[0], 0.36);
  EXPECT_DOUBLE_EQ(r.f_new, 0.1296);
  EXPECT_EQ(r.backtracks, 1);
}

// phi(x) = |x| near 0 would accept; this oracle never decreases.
class Flat final : public Objective {
 public:
  std::size_t dimension() const override { return 1; }
  double value(const Point&) const override { return 1.0; }
  Subgradient subgradient(const Point&) const override { return {1.0, scalar(1.0), {}}; }
};

TEST(NonmonotoneArmijo, StallsOnNonDescentObjective) {
  Flat flat;
  auto opts = options(1.0);
  opts.max_backtracks = 7;
  try {
    nonmonotone_armijo(flat, scalar(0), 1.0, scalar(1), scalar(-1), opts);
    FAIL() << "expected LinesearchStalled";
  } catch (const LinesearchStalled& e) {
    EXPECT_EQ(e.backtracks(), 7);
    EXPECT_DOUBLE_EQ(e.last_tau(), std::pow(0.2, 7));
  }
}

TEST(NonmonotoneArmijo, RejectsBadPreconditions) {
  Square sq;
  EXPECT_THROW(nonmonotone_armijo(sq, scalar(1), 1, scalar(2), scalar(2), options(1)),
               std::invalid_argument);
  EXPECT_THROW(nonmonotone_armijo(sq, scalar(1), 1, scalar(2), scalar(-2), options(0.5)),
               std::invalid_argument);
}

TEST(NonmonotoneArmijo, StrictFlagDiffersOnlyAtExactTies) {
  // phi(x) = x^2 from x = 1, d = -1, tau = 1: phi(0) = 0. With sigma = 0.5
  // the threshold is 1 + 0.5 * 1 * (-2) = 0: a tie.
  Square sq;
  ArmijoOptions o = options(1.0);
  o.sigma = 0.5;
  const auto loose = nonmonotone_armijo(sq, scalar(1), 1, scalar(2), scalar(-1), o);
  EXPECT_EQ(loose.backtracks, 0);
  o.strict = true;
  const auto strict = nonmonotone_armijo(sq, scalar(1), 1, scalar(2), scalar(-1), o);
  EXPECT_EQ(strict.backtracks, 1);
}

TEST(NonmonotoneArmijo, FirstProbeIsReused) {
  Square sq;
  const auto r =
      nonmonotone_armijo(sq, scalar(1), 1.0, scalar(2), scalar(-2), options(1.0), 1.0);
  EXPECT_EQ(r.backtracks, 1);
  EXPECT_EQ(r.evaluations, 1u);
  EXPECT_EQ(sq.calls, 1u);
}

// Properties on random 1-D quadratics phi(x) = c/2 x^2 + b x.
TEST(NonmonotoneArmijo, PropertiesOnRandomQuadratics) {
  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const double c = rng.uniform(-5.0, 50.0);
    const double b = rng.uniform(-5.0, 5.0);
    testing::Quadratic q(scalar(c), scalar(b));
    const Point x = scalar(rng.uniform(-3, 3));
    const auto g = q.subgradient(x);
    if (g.w[0] == 0.0) continue;
    const Point d = -rng.uniform(0.1, 3.0) * g.w;
    ArmijoOptions o;
    o.tau_init = std::pow(10.0, rng.uniform(-2, 2));
    o.sigma = rng.uniform(0.01, 0.9);
    o.beta = rng.uniform(0.1, 0.9);
    o.ref_value = g.value + rng.uniform(0.0, 2.0);
    o.strict = rng.next() % 2 == 1;
    o.max_backtracks = 200;
    const double inner = g.w.dot(d);

    const auto r = nonmonotone_armijo(q, x, g.value, g.w, d, o);
    // Acceptance inequality, re-evaluated independently.
    const double f_new = q.value(x + r.tau * d);
    EXPECT_EQ(f_new, r.f_new);
    const double rhs = o.ref_value + o.sigma * r.tau * inner;
    EXPECT_TRUE(o.strict ? f_new < rhs : f_new <= rhs);
    // tau = tau_init * beta^backtracks without drift.
    if (r.backtracks <= 30) {
      EXPECT_EQ(r.tau, o.tau_init * std::pow(o.beta, r.backtracks));
    }
    // A larger reference never shrinks the accepted step.
    ArmijoOptions wider = o;
    wider.ref_value = o.ref_value + rng.uniform(0.0, 5.0);
    const auto r2 = nonmonotone_armijo(q, x, g.value, g.w, d, wider);
    EXPECT_GE(r2.tau, r.tau);
    EXPECT_LE(r2.backtracks, r.backtracks);
  }
}

// On clustering objectives the descent constant is 1, so the search must
// terminate quickly from any point along the regularized Newton direction.
TEST(NonmonotoneArmijo, TerminatesUnderCapOnRandomClusteringInstances) {
  Rng rng(77);
  int worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = 1 + rng.next() % 20;
    const std::size_t s = 1 + rng.next() % 5;
    const std::size_t ell = 1 + rng.next() % 4;
    std::vector<double> values(p * s);
    for (auto& v : values) v = rng.uniform(-10, 10);
    mssc::ClusteringProblem prob{mssc::DataSet(p, s, values), ell, 1e-3};
    mssc::ClusteringObjective obj(prob);
    mssc::ClusteringDirection dir(p, mssc::AlphaSchedule::constant(1e-3));
    Point X(static_cast<Eigen::Index>(s * ell));
    for (Eigen::Index i = 0; i < X.size(); ++i) X[i] = rng.uniform(-10, 10);
    const auto g = obj.subgradient(X);
    if ((g.w.array() == 0.0).all()) continue;
    const Point d = dir.direction(0, X, g);
    ArmijoOptions o;
    o.ref_value = g.value;
    o.max_backtracks = 100;
    const auto r = nonmonotone_armijo(obj, X, g.value, g.w, d, o);
    worst = std::max(worst, r.backtracks);
  }
  // a = alpha / p >= 5e-5 with kappa = 1 and beta = 0.2 gives at most
  // ceil(log_5(p / alpha)) + 1 = 9 reductions.
  EXPECT_LE(worst, 9);
}

}  // namespace
}  // namespace nmsub
