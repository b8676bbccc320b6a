#include "nmsub/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nmsub/errors.hpp"

namespace nmsub {

std::string format_real(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.iter << ',' << format_real(r.fval) << ',' << format_real(r.window_max)
        << ',' << format_real(r.tau_bar) << ',' << format_real(r.tau) << ','
        << r.mem << ',' << r.backtracks << ',' << format_real(r.w_norm) << ','
        << format_real(r.d_norm) << ',' << format_real(r.step_norm) << '\n';
  }
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_real(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("not a number: '" + std::string(s) + "'", line);
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::size_t line) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("not an integer: '" + std::string(s) + "'", line);
  }
  return v;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty trace", 1);
  ++lineno;
  if (strip_cr(line) != kTraceHeader) {
    throw ParseError("unexpected trace header", lineno);
  }
  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = strip_cr(line);
    if (view.empty()) continue;
    const auto f = split_commas(view);
    if (f.size() != 10) {
      throw ParseError("expected 10 fields, found " + std::to_string(f.size()),
                       lineno);
    }
    TraceRecord r;
    r.iter = parse_int<std::size_t>(f[0], lineno);
    r.fval = parse_real(f[1], lineno);
    r.window_max = parse_real(f[2], lineno);
    r.tau_bar = parse_real(f[3], lineno);
    r.tau = parse_real(f[4], lineno);
    r.mem = parse_int<int>(f[5], lineno);
    r.backtracks = parse_int<int>(f[6], lineno);
    r.w_norm = parse_real(f[7], lineno);
    r.d_norm = parse_real(f[8], lineno);
    r.step_norm = parse_real(f[9], lineno);
    trace.push_back(r);
  }
  return trace;
}

nlohmann::json to_json(const SolverParams& p) {
  return {
      {"tau0", p.tau0},         {"tau_min", p.tau_min},
      {"tau_max", p.tau_max},   {"sigma", p.sigma},
      {"beta", p.beta},         {"gamma", p.gamma},
      {"mem0", p.mem0},         {"mem_max", p.mem_max},
      {"tol", p.tol},           {"max_iter", p.max_iter},
      {"seed", p.seed},         {"max_backtracks", p.max_backtracks},
      {"trace_stride", p.trace_stride},
  };
}

nlohmann::json to_json(const RunResult& r, const SolverParams& params) {
  return {
      {"params", to_json(params)},
      {"termination", std::string(to_string(r.termination))},
      {"final_value", r.final_value},
      {"final_point", std::vector<double>(r.final_point.data(),
                                          r.final_point.data() + r.final_point.size())},
      {"iterations", r.iterations},
      {"wall_time", r.wall_time},
      {"value_evals", r.value_evals},
      {"subgradient_evals", r.subgradient_evals},
      {"final_w_norm", r.final_w_norm},
  };
}

std::string_view to_string(TraceLaw law) {
  switch (law) {
    case TraceLaw::WindowMonotone:
      return "window-max monotonicity";
    case TraceLaw::SufficientDecrease:
      return "sufficient decrease";
    case TraceLaw::MemoryGrowth:
      return "memory growth law";
    case TraceLaw::MinStepRate:
      return "min-step rate";
  }
  return "unknown";
}

std::optional<TraceViolation> check_trace(const std::vector<TraceRecord>& trace,
                                          const TraceCheckOptions& opts) {
  auto violation = [](std::size_t row, TraceLaw law, const std::string& msg) {
    return TraceViolation{row, law, msg};
  };

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (i > 0 && r.window_max > trace[i - 1].window_max) {
      return violation(i, TraceLaw::WindowMonotone,
                       "window_max rose from " + format_real(trace[i - 1].window_max) +
                           " to " + format_real(r.window_max));
    }
    if (r.mem < 0 || (opts.mem_max && r.mem > *opts.mem_max)) {
      return violation(i, TraceLaw::MemoryGrowth,
                       "mem " + std::to_string(r.mem) + " outside [0, m]");
    }
    if (i > 0 && r.mem > trace[i - 1].mem + 1) {
      return violation(i, TraceLaw::MemoryGrowth,
                       "mem jumped from " + std::to_string(trace[i - 1].mem) +
                           " to " + std::to_string(r.mem));
    }
    if (opts.declared_a) {
      const double bound =
          r.window_max - opts.sigma * *opts.declared_a / r.tau * r.step_norm * r.step_norm;
      const double slack = opts.rel_slack * std::max(1.0, std::abs(r.window_max));
      if (!(r.fval <= bound + slack)) {
        return violation(i, TraceLaw::SufficientDecrease,
                         "fval " + format_real(r.fval) + " exceeds bound " +
                             format_real(bound));
      }
    }
  }

  if (opts.declared_a && !trace.empty()) {
    int m = 0;
    double tau_sup = 0.0;
    double f_best = trace.front().window_max;
    for (const auto& r : trace) {
      m = std::max(m, r.mem);
      tau_sup = std::max(tau_sup, r.tau);
      f_best = std::min(f_best, r.fval);
    }
    if (opts.mem_max) m = *opts.mem_max;
    const double f0 = trace.front().window_max;
    const double c = std::sqrt(tau_sup * (m + 1) * std::max(0.0, f0 - f_best) /
                               (opts.sigma * *opts.declared_a));
    double min_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& r = trace[i];
      min_step = std::min(min_step, r.step_norm);
      if (r.iter < static_cast<std::size_t>(m)) continue;
      const double bound = 2.0 * c / std::sqrt(static_cast<double>(r.iter) + 1.0);
      if (!(min_step <= bound)) {
        return violation(i, TraceLaw::MinStepRate,
                         "min step " + format_real(min_step) + " exceeds " +
                             format_real(bound));
      }
    }
  }
  return std::nullopt;
}

}  // namespace nmsub
