#pragma once

#include <cstddef>

#include "nmsub/core.hpp"
#include "nmsub/linesearch.hpp"

namespace nmsub {

/// Self-adaptive state carried between SNSM iterations.
struct AdaptiveState {
  double tau_bar = 1.0;
  int mem = 0;
  bool prev_accepted_at_init = true;  // tau_{k-1} == tau_bar_{k-1}
  bool cur_accepted_at_init = false;  // tau_k == tau_bar_k
};

/// Memory relaxation before the search: when the trial step fails the strict
/// test against the current window, widen the window by one (capped).
int pre_search_mem_bump(bool accepts_at_init, int mem, int mem_max);

struct AdaptiveUpdate {
  double tau_bar_next = 0.0;
  int mem_next = 0;
};

/// Trial stepsize and memory for iteration k+1.
///
/// Both of the last two iterations accepted their trial step:
///   tau_bar_{k+1} = min{gamma tau_k, tau_max},  m_{k+1} = 0.
/// Otherwise:
///   tau_bar_{k+1} = max{tau_k, tau_min},
///   m_{k+1} = min{ j <= min{m_k, k} : f_new < phi(x_{k-j}) + sigma tau_k inner }.
///
/// `history` must hold phi(x_i) for [k - m_k]^+ <= i <= k. Throws
/// InternalConsistencyError if no j qualifies.
AdaptiveUpdate post_step_update(const AdaptiveState& state, double tau_k,
                                double gamma, double tau_min, double tau_max,
                                const MemoryWindow& history, double f_new,
                                double sigma, double inner, std::size_t k);

/// Self-adaptive nonmonotone subgradient method. Same termination and error
/// contract as run_nsm; the linesearch uses the strict acceptance test and
/// the trial stepsize and memory follow pre_search_mem_bump and
/// post_step_update. The trial-step evaluation made for the memory bump is
/// reused as the first linesearch probe.
RunResult run_snsm(const Objective& oracle, const DirectionStrategy& strategy,
                   const SolverParams& params, const Point& x0);

}  // namespace nmsub
