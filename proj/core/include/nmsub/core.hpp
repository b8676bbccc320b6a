#pragma once

// Problem-agnostic building blocks shared by the NSM and SNSM drivers:
// the objective oracle, direction strategies, solver parameters, the
// stopping rule and per-run bookkeeping.

#include <any>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nmsub {

/// A point in R^n. For clustering, block t occupies coords [t*s, (t+1)*s).
using Point = Eigen::VectorXd;

/// One oracle answer: the objective value and one Clarke subgradient.
/// `side_data` carries backend information a matching direction strategy
/// may need (e.g. active-index counts for clustering).
struct Subgradient {
  double value = 0.0;
  Point w;
  std::any side_data;
};

/// Deterministic, thread-safe (const) objective oracle.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const Point& x) const = 0;
  virtual Subgradient subgradient(const Point& x) const = 0;
};

/// Maps (x, w) to a search direction d with <w, d> < 0 whenever w != 0.
///
/// declared_a / declared_b are the constants of the standing assumptions:
///   <w, d> <= -a ||d||^2   and   ||w|| <= b ||d||.
/// The drivers check both on every call when declared.
class DirectionStrategy {
 public:
  virtual ~DirectionStrategy() = default;

  virtual Point direction(std::size_t iteration, const Point& x,
                          const Subgradient& g) const = 0;
  virtual std::optional<double> declared_a() const { return std::nullopt; }
  virtual std::optional<double> declared_b() const { return std::nullopt; }
};

/// d = -w. Satisfies the assumptions with a = b = 1.
class SteepestDirection final : public DirectionStrategy {
 public:
  Point direction(std::size_t iteration, const Point& x,
                  const Subgradient& g) const override;
  std::optional<double> declared_a() const override { return 1.0; }
  std::optional<double> declared_b() const override { return 1.0; }
};

/// d = -w; w must be nonzero.
Point steepest_direction(const Point& w);

struct SolverParams {
  double tau0 = 1.0;
  double tau_min = 1e-4;
  double tau_max = 1e8;
  double sigma = 0.2;
  double beta = 0.2;
  double gamma = 4.0;
  int mem0 = 0;
  int mem_max = 5;
  double tol = 1e-4;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 0;
  int max_backtracks = 100;
  /// Keep every k-th trace record (the last record is always kept).
  std::size_t trace_stride = 1;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// State of iteration k, recorded after x_{k+1} is formed.
struct TraceRecord {
  std::size_t iter = 0;
  double fval = 0.0;        // phi(x_{k+1})
  double window_max = 0.0;  // max phi(x_i), [k - m_k]^+ <= i <= k
  double tau_bar = 0.0;
  double tau = 0.0;
  int mem = 0;
  int backtracks = 0;
  double w_norm = 0.0;
  double d_norm = 0.0;
  double step_norm = 0.0;  // ||x_{k+1} - x_k||

  bool operator==(const TraceRecord&) const = default;
};

enum class Termination { ZeroSubgradient, StopCriterion, MaxIter };

std::string_view to_string(Termination t);
std::optional<Termination> termination_from_string(std::string_view s);

struct RunResult {
  Point final_point;
  double final_value = 0.0;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIter;
  std::vector<TraceRecord> trace;
  double wall_time = 0.0;
  std::size_t value_evals = 0;
  std::size_t subgradient_evals = 0;
  double final_w_norm = 0.0;
};

/// Relative step/value stopping rule on consecutive iterates:
///   max{ ||x_cur - x_prev|| / max{||x_prev||, 1},
///        |f_cur - f_prev| / max{|f_prev|, 1} } <= tol.
bool should_stop(const Point& x_prev, const Point& x_cur, double f_prev,
                 double f_cur, double tol);

}  // namespace nmsub
