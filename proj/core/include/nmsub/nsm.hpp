#pragma once

#include <cstddef>
#include <functional>

#include "nmsub/core.hpp"

namespace nmsub {

/// What the schedules see about the iteration that just finished.
struct StepFeedback {
  std::size_t k = 0;
  double tau_bar = 0.0;  // trial stepsize of iteration k
  double tau = 0.0;      // accepted stepsize of iteration k
  int mem = 0;           // memory used at iteration k
  int backtracks = 0;
};

/// User-supplied stepsize and memory schedules for the generic driver.
/// Iteration 0 uses params.tau0 and params.mem0; each later iteration asks
/// the schedules with the feedback of the previous one. The driver rejects
/// a trial stepsize below tau_min and a memory sequence that violates
///   0 <= m_{k+1} <= min{m_k + 1, mem_max}.
/// Schedules may carry state, so build a fresh instance per run.
struct Schedules {
  std::function<double(const StepFeedback&)> next_tau_bar;
  std::function<int(const StepFeedback&)> next_mem;
};

/// tau_bar_k == tau_bar and m_k == mem for every k.
Schedules constant_schedules(double tau_bar, int mem);

/// Constant tau_bar; memory grows by one per iteration up to mem_max.
Schedules ramp_memory_schedules(double tau_bar, int mem_max);

/// The self-adaptive trial-stepsize rule of SNSM with memory pinned to 0:
/// grow by gamma (clamped at tau_max) after two consecutive iterations that
/// accepted their trial step, otherwise restart from max{tau_k, tau_min}.
Schedules self_adaptive_tau_schedules(const SolverParams& params);

/// Nonmonotone subgradient method with caller-chosen schedules.
///
/// Iterates x_{k+1} = x_k + tau_k d_k where tau_k comes from the non-strict
/// nonmonotone Armijo search against the window maximum. Stops on an exactly
/// zero subgradient, on should_stop over consecutive iterates, or at
/// params.max_iter.
///
/// Throws NonDescentDirection, LinesearchStalled (with iteration context) or
/// AssumptionViolation when a declared constant or the sufficient-decrease
/// law fails at run time.
RunResult run_nsm(const Objective& oracle, const DirectionStrategy& strategy,
                  const SolverParams& params, Schedules schedules, const Point& x0);

}  // namespace nmsub
