#include "nmsub/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nmsub/errors.hpp"

namespace nmsub {

MemoryWindow::MemoryWindow(int mem_max) {
  if (mem_max < 0) throw std::invalid_argument("MemoryWindow: mem_max < 0");
  values_.assign(static_cast<std::size_t>(mem_max) + 1, 0.0);
}

void MemoryWindow::push(std::size_t k, double value) {
  if (k != next_) {
    throw InternalConsistencyError("MemoryWindow: expected index " +
                                   std::to_string(next_) + ", got " +
                                   std::to_string(k));
  }
  values_[k % values_.size()] = value;
  ++next_;
  count_ = std::min(count_ + 1, values_.size());
}

bool MemoryWindow::holds(std::size_t i) const noexcept {
  return count_ > 0 && i < next_ && i + count_ >= next_;
}

double MemoryWindow::at(std::size_t i) const {
  if (!holds(i)) {
    throw InternalConsistencyError("MemoryWindow: index " + std::to_string(i) +
                                   " not held");
  }
  return values_[i % values_.size()];
}

double MemoryWindow::window_max(int m_k, std::size_t k) const {
  if (m_k < 0) throw InternalConsistencyError("MemoryWindow: negative memory");
  const auto m = static_cast<std::size_t>(m_k);
  const std::size_t lo = k > m ? k - m : 0;
  double best = at(k);
  for (std::size_t i = lo; i < k; ++i) best = std::max(best, at(i));
  return best;
}

ArmijoResult nonmonotone_armijo(const Objective& oracle, const Point& x,
                                double f_x, const Point& w, const Point& d,
                                const ArmijoOptions& opts,
                                std::optional<double> first_probe) {
  const double inner = w.dot(d);
  if (!(inner < 0.0)) {
    throw std::invalid_argument("nonmonotone_armijo: <w,d> must be negative");
  }
  if (!(opts.tau_init > 0.0)) {
    throw std::invalid_argument("nonmonotone_armijo: tau_init must be positive");
  }
  if (!(opts.ref_value >= f_x)) {
    throw std::invalid_argument("nonmonotone_armijo: ref_value below f(x)");
  }

  ArmijoResult out;
  out.x_new.resize(x.size());
  for (int backtracks = 0;; ++backtracks) {
    // tau_init * beta^j evaluated directly so the accepted step carries no
    // accumulated rounding from repeated multiplication.
    const double tau = opts.tau_init * std::pow(opts.beta, backtracks);
    out.x_new = x + tau * d;
    double f_trial;
    if (backtracks == 0 && first_probe) {
      f_trial = *first_probe;
    } else {
      f_trial = oracle.value(out.x_new);
      ++out.evaluations;
    }
    if (armijo_accepts(f_trial, opts.ref_value, opts.sigma, tau, inner, opts.strict)) {
      out.tau = tau;
      out.f_new = f_trial;
      out.backtracks = backtracks;
      return out;
    }
    if (backtracks == opts.max_backtracks) {
      throw LinesearchStalled(tau, backtracks);
    }
  }
}

}  // namespace nmsub
