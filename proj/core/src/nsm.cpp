#include "nmsub/nsm.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>

#include "driver.hpp"

namespace nmsub {

Schedules constant_schedules(double tau_bar, int mem) {
  return {[tau_bar](const StepFeedback&) { return tau_bar; },
          [mem](const StepFeedback&) { return mem; }};
}

Schedules ramp_memory_schedules(double tau_bar, int mem_max) {
  return {[tau_bar](const StepFeedback&) { return tau_bar; },
          [mem_max](const StepFeedback& f) { return std::min(f.mem + 1, mem_max); }};
}

Schedules self_adaptive_tau_schedules(const SolverParams& params) {
  // tau_{-1} == tau_bar_{-1}, so the first iteration counts as a previous
  // acceptance at the trial step.
  auto prev_accepted = std::make_shared<bool>(true);
  const double gamma = params.gamma;
  const double tau_min = params.tau_min;
  const double tau_max = params.tau_max;
  return {[=](const StepFeedback& f) {
            const bool cur = f.backtracks == 0;
            const bool both = *prev_accepted && cur;
            *prev_accepted = cur;
            return both ? std::min(gamma * f.tau, tau_max) : std::max(f.tau, tau_min);
          },
          [](const StepFeedback&) { return 0; }};
}

namespace {

class ScheduledPolicy {
 public:
  ScheduledPolicy(const Objective& oracle, const SolverParams& params,
                  Schedules schedules)
      : oracle_(oracle), params_(params), schedules_(std::move(schedules)) {
    if (!schedules_.next_tau_bar || !schedules_.next_mem) {
      throw std::invalid_argument("run_nsm: both schedules must be set");
    }
  }

  detail::SearchOutcome search(std::size_t k, const Point& x, double fx,
                               const Point& w, const Point& d, double,
                               const MemoryWindow& window) {
    double tau_bar = params_.tau0;
    int mem = params_.mem0;
    if (k > 0) {
      tau_bar = schedules_.next_tau_bar(last_);
      mem = schedules_.next_mem(last_);
      if (!(tau_bar >= params_.tau_min)) {
        throw std::invalid_argument("stepsize schedule returned tau_bar below tau_min at iteration " +
                                    std::to_string(k));
      }
      if (mem < 0 || mem > std::min(last_.mem + 1, params_.mem_max)) {
        throw std::invalid_argument("memory schedule violates 0 <= m_{k+1} <= min{m_k+1, m} at iteration " +
                                    std::to_string(k));
      }
    }
    detail::SearchOutcome out;
    out.tau_bar = tau_bar;
    out.mem = mem;
    out.window_max = window.window_max(mem, k);
    ArmijoOptions opts;
    opts.tau_init = tau_bar;
    opts.sigma = params_.sigma;
    opts.beta = params_.beta;
    opts.ref_value = out.window_max;
    opts.strict = false;
    opts.max_backtracks = params_.max_backtracks;
    out.ls = nonmonotone_armijo(oracle_, x, fx, w, d, opts);
    out.evaluations = out.ls.evaluations;
    return out;
  }

  void after_step(std::size_t k, const detail::SearchOutcome& out, double,
                  const MemoryWindow&) {
    last_ = StepFeedback{k, out.tau_bar, out.ls.tau, out.mem, out.ls.backtracks};
  }

 private:
  const Objective& oracle_;
  const SolverParams& params_;
  Schedules schedules_;
  StepFeedback last_;
};

}  // namespace

RunResult run_nsm(const Objective& oracle, const DirectionStrategy& strategy,
                  const SolverParams& params, Schedules schedules, const Point& x0) {
  ScheduledPolicy policy(oracle, params, std::move(schedules));
  return detail::run_driver(oracle, strategy, params, x0, policy);
}

}  // namespace nmsub
