#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmsub/core.hpp"

namespace nmsub {

inline constexpr const char* kTraceHeader =
    "iter,fval,window_max,tau_bar,tau,mem,backtracks,w_norm,d_norm,step_norm";

/// Shortest-safe text for a double: 17 significant digits, round-trips bits.
std::string format_real(double v);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
/// Throws ParseError on a bad header, wrong field count or bad number.
std::vector<TraceRecord> read_trace_csv(std::istream& in);

nlohmann::json to_json(const SolverParams& params);
nlohmann::json to_json(const RunResult& result, const SolverParams& params);

// Post-hoc verification of the sequence laws a run must obey.

struct TraceCheckOptions {
  double sigma = 0.2;
  /// Enables the sufficient-decrease and min-step checks.
  std::optional<double> declared_a;
  /// Upper bound for the memory column; when absent only the +1 growth
  /// rule and nonnegativity are checked.
  std::optional<int> mem_max;
  /// Relative slack absorbing rounding in the sufficient-decrease check.
  double rel_slack = 1e-12;
};

enum class TraceLaw {
  WindowMonotone,      // window_max nonincreasing
  SufficientDecrease,  // fval <= window_max - (sigma a / tau) step^2
  MemoryGrowth,        // 0 <= m_{k+1} <= min{m_k + 1, m}
  MinStepRate,         // min_j step_j <= 2 c / sqrt(k + 1)
};

std::string_view to_string(TraceLaw law);

struct TraceViolation {
  std::size_t row = 0;  // 0-based data row
  TraceLaw law = TraceLaw::WindowMonotone;
  std::string message;
};

/// Returns the first violation, or nullopt if every law holds.
std::optional<TraceViolation> check_trace(const std::vector<TraceRecord>& trace,
                                          const TraceCheckOptions& opts);

}  // namespace nmsub
