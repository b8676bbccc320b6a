#include "nmsub/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nmsub {

Point steepest_direction(const Point& w) {
  if ((w.array() == 0.0).all()) {
    throw std::invalid_argument("steepest_direction: zero subgradient");
  }
  return -w;
}

Point SteepestDirection::direction(std::size_t, const Point&,
                                   const Subgradient& g) const {
  return steepest_direction(g.w);
}

void SolverParams::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("invalid solver parameters: " + msg);
  };
  if (!(tau_min > 0.0)) fail("tau_min must be > 0");
  if (!(tau0 >= tau_min)) fail("tau0 must be >= tau_min");
  if (!(tau_max >= tau0)) fail("tau_max must be >= tau0");
  if (!(sigma > 0.0 && sigma < 1.0)) fail("sigma must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0, 1)");
  if (!(gamma > 1.0)) fail("gamma must be > 1");
  if (mem0 < 0 || mem_max < 0) fail("memory parameters must be nonnegative");
  if (mem0 > mem_max) fail("mem0 must be <= mem_max");
  if (!(tol > 0.0)) fail("tol must be > 0");
  if (max_iter == 0) fail("max_iter must be positive");
  if (max_backtracks < 1) fail("max_backtracks must be positive");
  if (trace_stride == 0) fail("trace_stride must be positive");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ZeroSubgradient:
      return "zero_subgradient";
    case Termination::StopCriterion:
      return "stop_criterion";
    case Termination::MaxIter:
      return "max_iter";
  }
  return "unknown";
}

std::optional<Termination> termination_from_string(std::string_view s) {
  for (auto t : {Termination::ZeroSubgradient, Termination::StopCriterion,
                 Termination::MaxIter}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

bool should_stop(const Point& x_prev, const Point& x_cur, double f_prev,
                 double f_cur, double tol) {
  if (x_prev.size() != x_cur.size()) {
    throw std::invalid_argument("should_stop: dimension mismatch");
  }
  const double step = (x_cur - x_prev).norm() / std::max(x_prev.norm(), 1.0);
  const double change = std::abs(f_cur - f_prev) / std::max(std::abs(f_prev), 1.0);
  return std::max(step, change) <= tol;
}

}  // namespace nmsub
