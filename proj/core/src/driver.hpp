#pragma once

// Iteration loop shared by run_nsm and run_snsm. The two algorithms differ
// only in how the trial stepsize and memory are chosen before the
// linesearch and updated after it; those two points are delegated to a
// policy object with `search` and `after_step` members.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nmsub/core.hpp"
#include "nmsub/errors.hpp"
#include "nmsub/linesearch.hpp"

namespace nmsub::detail {

struct SearchOutcome {
  ArmijoResult ls;
  double tau_bar = 0.0;
  int mem = 0;
  double window_max = 0.0;
  std::size_t evaluations = 0;
};

inline bool is_zero(const Point& w) { return (w.array() == 0.0).all(); }

inline void check_declared_constants(const DirectionStrategy& strategy,
                                     const Point& w, const Point& d,
                                     double inner, std::size_t k) {
  constexpr double kRel = 1e-12;
  const double dd = d.squaredNorm();
  if (auto a = strategy.declared_a()) {
    const double rhs = -*a * dd;
    if (!(inner <= rhs + kRel * (std::abs(inner) + std::abs(rhs)))) {
      throw AssumptionViolation("iteration " + std::to_string(k) +
                                ": <w,d> > -a ||d||^2 for declared a");
    }
  }
  if (auto b = strategy.declared_b()) {
    const double lhs = w.norm();
    const double rhs = *b * std::sqrt(dd);
    if (!(lhs <= rhs * (1.0 + kRel))) {
      throw AssumptionViolation("iteration " + std::to_string(k) +
                                ": ||w|| > b ||d|| for declared b");
    }
  }
}

template <typename Policy>
RunResult run_driver(const Objective& oracle, const DirectionStrategy& strategy,
                     const SolverParams& params, const Point& x0, Policy& policy) {
  params.validate();
  if (static_cast<std::size_t>(x0.size()) != oracle.dimension()) {
    throw std::invalid_argument("initial point has dimension " +
                                std::to_string(x0.size()) + ", oracle expects " +
                                std::to_string(oracle.dimension()));
  }
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  MemoryWindow window(params.mem_max);
  Point x = x0;
  Subgradient g = oracle.subgradient(x);
  result.subgradient_evals = 1;
  window.push(0, g.value);

  const auto declared_a = strategy.declared_a();
  double prev_window_max = 0.0;
  TraceRecord pending;
  bool have_pending = false;

  std::size_t k = 0;
  for (;; ++k) {
    if (is_zero(g.w)) {
      result.termination = Termination::ZeroSubgradient;
      break;
    }
    if (k == params.max_iter) {
      result.termination = Termination::MaxIter;
      break;
    }

    const Point d = strategy.direction(k, x, g);
    const double inner = g.w.dot(d);
    if (!(inner < 0.0)) throw NonDescentDirection(inner, k);
    check_declared_constants(strategy, g.w, d, inner, k);

    SearchOutcome out;
    try {
      out = policy.search(k, x, g.value, g.w, d, inner, window);
    } catch (const LinesearchStalled& e) {
      throw LinesearchStalled(e.last_tau(), e.backtracks(), k);
    }
    result.value_evals += out.evaluations;

    const double step_norm = (out.ls.x_new - x).norm();
    if (k > 0 && out.window_max > prev_window_max) {
      throw InternalConsistencyError("window maximum increased at iteration " +
                                     std::to_string(k));
    }
    prev_window_max = out.window_max;
    if (declared_a) {
      const double bound = out.window_max -
                           params.sigma * *declared_a / out.ls.tau * step_norm * step_norm;
      const double slack = 1e-12 * std::max(1.0, std::abs(out.window_max));
      if (!(out.ls.f_new <= bound + slack)) {
        throw AssumptionViolation("sufficient decrease violated at iteration " +
                                  std::to_string(k));
      }
    }

    TraceRecord rec;
    rec.iter = k;
    rec.fval = out.ls.f_new;
    rec.window_max = out.window_max;
    rec.tau_bar = out.tau_bar;
    rec.tau = out.ls.tau;
    rec.mem = out.mem;
    rec.backtracks = out.ls.backtracks;
    rec.w_norm = g.w.norm();
    rec.d_norm = d.norm();
    rec.step_norm = step_norm;
    if (k % params.trace_stride == 0) {
      result.trace.push_back(rec);
      have_pending = false;
    } else {
      pending = rec;
      have_pending = true;
    }

    policy.after_step(k, out, inner, window);

    const bool stop = should_stop(x, out.ls.x_new, g.value, out.ls.f_new, params.tol);
    x = std::move(out.ls.x_new);
    g = oracle.subgradient(x);
    ++result.subgradient_evals;
    window.push(k + 1, out.ls.f_new);
    if (stop) {
      ++k;
      result.termination = Termination::StopCriterion;
      break;
    }
  }
  if (have_pending) result.trace.push_back(pending);

  result.iterations = k;
  result.final_value = g.value;
  result.final_w_norm = g.w.norm();
  result.final_point = std::move(x);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace nmsub::detail
