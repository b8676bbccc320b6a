#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nmsub/core.hpp"

namespace nmsub {

/// Ring buffer of the objective values of the most recent iterates.
///
/// With capacity mem_max + 1 it always holds phi(x_i) for
/// max{k - mem_max, 0} <= i <= k, where k is the last pushed index.
class MemoryWindow {
 public:
  explicit MemoryWindow(int mem_max);

  /// Appends phi(x_k). Indices must be pushed consecutively from 0.
  void push(std::size_t k, double value);

  /// max{ phi(x_i) : [k - m_k]^+ <= i <= k }.
  /// Throws InternalConsistencyError if any index in range is not held.
  double window_max(int m_k, std::size_t k) const;

  /// phi(x_i); throws InternalConsistencyError if i is not held.
  double at(std::size_t i) const;

  std::size_t capacity() const noexcept { return values_.size(); }
  bool empty() const noexcept { return count_ == 0; }
  std::size_t last_index() const noexcept { return next_ - 1; }

 private:
  bool holds(std::size_t i) const noexcept;

  std::vector<double> values_;
  std::size_t next_ = 0;   // index the next push must carry
  std::size_t count_ = 0;  // number of valid entries
};

struct ArmijoOptions {
  double tau_init = 1.0;
  double sigma = 0.2;
  double beta = 0.2;
  /// phi(x_{l(k)}); must be >= f(x).
  double ref_value = 0.0;
  /// false: accept when phi <= ref + sigma tau <w,d>.
  /// true:  accept only when phi <  ref + sigma tau <w,d>.
  bool strict = false;
  int max_backtracks = 100;
};

struct ArmijoResult {
  double tau = 0.0;
  Point x_new;
  double f_new = 0.0;
  int backtracks = 0;
  /// Objective evaluations performed by this call (probes not supplied).
  std::size_t evaluations = 0;
};

/// Acceptance test shared by the linesearch and the self-adaptive rules.
inline bool armijo_accepts(double f_trial, double ref_value, double sigma,
                           double tau, double inner, bool strict) {
  const double rhs = ref_value + sigma * tau * inner;
  return strict ? f_trial < rhs : f_trial <= rhs;
}

/// Geometric nonmonotone Armijo backtracking along d from x.
///
/// Tries tau_init, beta tau_init, beta^2 tau_init, ... and returns the first
/// step that passes armijo_accepts. If `first_probe` is given it is used as
/// phi(x + tau_init d) instead of calling the oracle.
///
/// Throws LinesearchStalled once more than max_backtracks reductions fail.
ArmijoResult nonmonotone_armijo(const Objective& oracle, const Point& x,
                                double f_x, const Point& w, const Point& d,
                                const ArmijoOptions& opts,
                                std::optional<double> first_probe = std::nullopt);

}  // namespace nmsub
