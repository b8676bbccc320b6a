#include "nmsub/snsm.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "driver.hpp"
#include "nmsub/errors.hpp"

namespace nmsub {

int pre_search_mem_bump(bool accepts_at_init, int mem, int mem_max) {
  if (mem > mem_max) throw std::invalid_argument("pre_search_mem_bump: mem > mem_max");
  return accepts_at_init ? mem : std::min(mem + 1, mem_max);
}

AdaptiveUpdate post_step_update(const AdaptiveState& state, double tau_k,
                                double gamma, double tau_min, double tau_max,
                                const MemoryWindow& history, double f_new,
                                double sigma, double inner, std::size_t k) {
  if (state.prev_accepted_at_init && state.cur_accepted_at_init) {
    return {std::min(gamma * tau_k, tau_max), 0};
  }
  AdaptiveUpdate up;
  up.tau_bar_next = std::max(tau_k, tau_min);
  // Indices before 0 do not exist; the window maximum is attained inside
  // [k - m_k]^+ .. k, so the search stops there.
  const auto j_max = std::min<std::size_t>(static_cast<std::size_t>(state.mem), k);
  for (std::size_t j = 0; j <= j_max; ++j) {
    if (armijo_accepts(f_new, history.at(k - j), sigma, tau_k, inner, true)) {
      up.mem_next = static_cast<int>(j);
      return up;
    }
  }
  throw InternalConsistencyError("post_step_update: no memory index satisfies the decrease test at iteration " +
                                 std::to_string(k));
}

namespace {

class AdaptivePolicy {
 public:
  AdaptivePolicy(const Objective& oracle, const SolverParams& params)
      : oracle_(oracle), params_(params) {
    state_.tau_bar = params.tau0;
    state_.mem = params.mem0;
  }

  detail::SearchOutcome search(std::size_t k, const Point& x, double fx,
                               const Point& w, const Point& d, double inner,
                               const MemoryWindow& window) {
    detail::SearchOutcome out;
    out.tau_bar = state_.tau_bar;

    const Point trial = x + state_.tau_bar * d;
    const double f_trial = oracle_.value(trial);
    const bool passes = armijo_accepts(f_trial, window.window_max(state_.mem, k),
                                       params_.sigma, state_.tau_bar, inner, true);
    state_.mem = pre_search_mem_bump(passes, state_.mem, params_.mem_max);
    out.mem = state_.mem;
    out.window_max = window.window_max(state_.mem, k);

    ArmijoOptions opts;
    opts.tau_init = state_.tau_bar;
    opts.sigma = params_.sigma;
    opts.beta = params_.beta;
    opts.ref_value = out.window_max;
    opts.strict = true;
    opts.max_backtracks = params_.max_backtracks;
    out.ls = nonmonotone_armijo(oracle_, x, fx, w, d, opts, f_trial);
    out.evaluations = out.ls.evaluations + 1;
    return out;
  }

  void after_step(std::size_t k, const detail::SearchOutcome& out, double inner,
                  const MemoryWindow& window) {
    state_.cur_accepted_at_init = out.ls.backtracks == 0;
    const auto up = post_step_update(state_, out.ls.tau, params_.gamma, params_.tau_min,
                                     params_.tau_max, window, out.ls.f_new,
                                     params_.sigma, inner, k);
    state_.prev_accepted_at_init = state_.cur_accepted_at_init;
    state_.tau_bar = up.tau_bar_next;
    state_.mem = up.mem_next;
  }

 private:
  const Objective& oracle_;
  const SolverParams& params_;
  AdaptiveState state_;
};

}  // namespace

RunResult run_snsm(const Objective& oracle, const DirectionStrategy& strategy,
                   const SolverParams& params, const Point& x0) {
  AdaptivePolicy policy(oracle, params);
  return detail::run_driver(oracle, strategy, params, x0, policy);
}

}  // namespace nmsub
