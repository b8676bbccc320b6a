#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmsub {

/// Raised when a backtracking linesearch exceeds its cap without accepting a
/// step. Usually a non-descent direction or an objective that is not upper-C2.
class LinesearchStalled : public std::runtime_error {
 public:
  LinesearchStalled(double last_tau, int backtracks, std::size_t iteration = 0)
      : std::runtime_error("linesearch stalled after " +
                           std::to_string(backtracks) +
                           " backtracks (last tau = " +
                           std::to_string(last_tau) + ", iteration " +
                           std::to_string(iteration) + ")"),
        last_tau_(last_tau),
        backtracks_(backtracks),
        iteration_(iteration) {}

  double last_tau() const noexcept { return last_tau_; }
  int backtracks() const noexcept { return backtracks_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  double last_tau_;
  int backtracks_;
  std::size_t iteration_;
};

/// The direction strategy returned d with <w, d> >= 0 for a nonzero w.
class NonDescentDirection : public std::runtime_error {
 public:
  NonDescentDirection(double inner, std::size_t iteration)
      : std::runtime_error("direction is not a descent direction at iteration " +
                           std::to_string(iteration) +
                           " (<w,d> = " + std::to_string(inner) + ")"),
        inner_(inner),
        iteration_(iteration) {}

  double inner() const noexcept { return inner_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  double inner_;
  std::size_t iteration_;
};

/// A declared spectral constant (a or b) or the sufficient-decrease law was
/// violated by a strategy or oracle at run time.
class AssumptionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant. Indicates a programming error, not bad input.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed text input; carries the 1-based line number of the first fault.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nmsub
