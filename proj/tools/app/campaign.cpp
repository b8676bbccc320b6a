#include "campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include "nmsub/nsm.hpp"
#include "nmsub/random.hpp"
#include "nmsub/snsm.hpp"
#include "nmsub/trace_io.hpp"

namespace nmsub::app {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Snsm:
      return "snsm";
    case Method::SnsmM0:
      return "snsm-m0";
    case Method::NsmSteepest:
      return "nsm-steepest";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::Snsm, Method::SnsmM0, Method::NsmSteepest}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

RunResult run_method(Method method, const Objective& oracle,
                     const DirectionStrategy& strategy, const SolverParams& params,
                     const Point& x0) {
  switch (method) {
    case Method::Snsm:
      return run_snsm(oracle, strategy, params, x0);
    case Method::SnsmM0: {
      SolverParams p = params;
      p.mem0 = 0;
      p.mem_max = 0;
      return run_snsm(oracle, strategy, p, x0);
    }
    case Method::NsmSteepest:
      return run_nsm(oracle, SteepestDirection{}, params,
                     ramp_memory_schedules(params.tau0, params.mem_max), x0);
  }
  throw std::invalid_argument("unknown method");
}

namespace {

// Runs `task(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

bool selected(const CellFilter& only, std::size_t problem, std::size_t start) {
  return (!only.problem || *only.problem == problem) && (!only.start || *only.start == start);
}

void execute(RunRow& row, const Objective& oracle, const DirectionStrategy& strategy,
             const SolverParams& params, const Point& x0) {
  try {
    row.result = run_method(row.method, oracle, strategy, params, x0);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
}

}  // namespace

std::vector<RunRow> run_mssc_campaign(const MsscCampaign& c) {
  c.params.validate();
  if (c.starts == 0) throw std::invalid_argument("starts must be >= 1");
  if (c.methods.empty()) throw std::invalid_argument("at least one method is required");
  const mssc::ClusteringObjective oracle(c.problem);
  const mssc::ClusteringDirection strategy(
      c.problem.data.p(), mssc::AlphaSchedule::constant(c.problem.alpha), c.convention);

  std::vector<RunRow> rows;
  for (std::size_t s = 0; s < c.starts; ++s) {
    if (!selected(c.only, 0, s)) continue;
    for (auto m : c.methods) {
      RunRow row;
      row.start = s;
      row.start_seed = run_seed(c.params.seed, 0, s);
      row.method = m;
      rows.push_back(std::move(row));
    }
  }
  parallel_for(rows.size(), c.jobs, [&](std::size_t i) {
    auto& row = rows[i];
    const Point x0 = mssc::random_init(c.problem, row.start_seed);
    execute(row, oracle, strategy, c.params, x0);
  });
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows,
                                    const std::vector<Method>& methods) {
  std::vector<AggregateRow> out;
  for (auto m : methods) {
    AggregateRow agg;
    agg.method = m;
    agg.best_final_value = std::numeric_limits<double>::infinity();
    double it = 0.0, fe = 0.0, sec = 0.0, val = 0.0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      if (r.error) {
        ++agg.failures;
        continue;
      }
      ++agg.runs;
      it += static_cast<double>(r.result.iterations);
      fe += static_cast<double>(r.result.value_evals);
      sec += r.result.wall_time;
      val += r.result.final_value;
      agg.best_final_value = std::min(agg.best_final_value, r.result.final_value);
    }
    if (agg.runs > 0) {
      const double n = static_cast<double>(agg.runs);
      agg.mean_iterations = it / n;
      agg.mean_fevals = fe / n;
      agg.mean_seconds = sec / n;
      agg.mean_final_value = val / n;
    } else {
      agg.best_final_value = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(agg);
  }
  return out;
}

QpOutcome run_qp_campaign(const QpCampaign& c) {
  c.params.validate();
  if (c.starts == 0) throw std::invalid_argument("starts must be >= 1");
  if (c.methods.empty()) throw std::invalid_argument("at least one method is required");
  if (c.n == 0) throw std::invalid_argument("n must be >= 1");
  if (c.radius_factor < 1 || c.radius_factor > 9) {
    throw std::invalid_argument("c must lie in 1..9");
  }

  QpOutcome out;
  std::vector<std::unique_ptr<qp::FbeObjective>> oracles;
  std::vector<std::unique_ptr<qp::NewtonDirection>> strategies;
  for (std::size_t pi = 0; pi < c.problems; ++pi) {
    if (c.only.problem && *c.only.problem != pi) {
      out.problems.emplace_back();
      oracles.emplace_back();
      strategies.emplace_back();
      continue;
    }
    auto prob = qp::generate_problem(c.n, c.radius_factor, problem_seed(c.params.seed, pi));
    oracles.push_back(std::make_unique<qp::FbeObjective>(prob));
    strategies.push_back(std::make_unique<qp::NewtonDirection>(prob));
    out.problems.push_back(std::move(prob));
  }

  for (std::size_t pi = 0; pi < c.problems; ++pi) {
    for (std::size_t s = 0; s < c.starts; ++s) {
      if (!selected(c.only, pi, s)) continue;
      for (auto m : c.methods) {
        RunRow row;
        row.problem = pi;
        row.start = s;
        row.problem_seed = out.problems[pi].seed;
        row.start_seed = run_seed(c.params.seed, pi, s);
        row.method = m;
        out.rows.push_back(std::move(row));
      }
    }
  }
  parallel_for(out.rows.size(), c.jobs, [&](std::size_t i) {
    auto& row = out.rows[i];
    const auto& prob = out.problems[row.problem];
    const Point x0 = qp::random_start(prob, row.start_seed);
    execute(row, *oracles[row.problem], *strategies[row.problem], c.params, x0);
    if (!row.error) row.rounded_value = qp::round_and_score(prob, row.result.final_point).value;
  });
  return out;
}

std::vector<WinLoss> win_loss(const std::vector<RunRow>& rows,
                              const std::vector<Method>& methods, double tie_tol) {
  std::vector<WinLoss> out;
  if (std::find(methods.begin(), methods.end(), Method::Snsm) == methods.end()) return out;
  for (auto m : methods) {
    if (m == Method::Snsm) continue;
    WinLoss wl;
    wl.other = m;
    for (const auto& ref : rows) {
      if (ref.method != Method::Snsm || ref.error) continue;
      for (const auto& r : rows) {
        if (r.method != m || r.problem != ref.problem || r.start != ref.start || r.error) {
          continue;
        }
        const double diff = ref.rounded_value - r.rounded_value;
        if (std::abs(diff) <= tie_tol) {
          ++wl.ties;
        } else if (diff < 0.0) {
          ++wl.wins;
        } else {
          ++wl.losses;
        }
      }
    }
    out.push_back(wl);
  }
  return out;
}

std::vector<ProblemSummary> summarize_problems(const QpOutcome& outcome,
                                               const std::vector<Method>& methods) {
  std::vector<ProblemSummary> out;
  for (std::size_t pi = 0; pi < outcome.problems.size(); ++pi) {
    const auto& prob = outcome.problems[pi];
    if (prob.b.size() == 0) continue;  // filtered out
    ProblemSummary sum;
    sum.problem = pi;
    sum.seed = prob.seed;
    sum.best_rounded.resize(methods.size());
    for (const auto& r : outcome.rows) {
      if (r.problem != pi || r.error) continue;
      const auto idx = static_cast<std::size_t>(
          std::find(methods.begin(), methods.end(), r.method) - methods.begin());
      if (idx >= methods.size()) continue;
      auto& best = sum.best_rounded[idx];
      if (!best || r.rounded_value < *best) best = r.rounded_value;
    }
    if (prob.dimension() <= 2) sum.grid_optimum = qp::exhaustive_grid_optimum(prob).value;
    out.push_back(std::move(sum));
  }
  return out;
}

std::string trace_file_name(const RunRow& row) {
  return "p" + std::to_string(row.problem) + "_s" + std::to_string(row.start) + "_" +
         std::string(method_name(row.method)) + ".csv";
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::string termination_field(const RunRow& r) {
  return r.error ? std::string("error") : std::string(to_string(r.result.termination));
}

void write_results_json(const std::filesystem::path& dir, const std::vector<RunRow>& rows,
                        const SolverParams& params) {
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    if (r.error) {
      j = {{"termination", "error"}, {"error", *r.error}};
    } else {
      SolverParams p = params;
      if (r.method == Method::SnsmM0) p.mem0 = p.mem_max = 0;
      j = to_json(r.result, p);
    }
    j["problem"] = r.problem;
    j["start"] = r.start;
    j["method"] = std::string(method_name(r.method));
    j["start_seed"] = r.start_seed;
    all.push_back(std::move(j));
  }
  auto out = open_out(dir / "results.json");
  out << all.dump(2) << '\n';
}

}  // namespace

void write_traces(const std::filesystem::path& dir, const std::vector<RunRow>& rows) {
  std::filesystem::create_directories(dir);
  for (const auto& r : rows) {
    if (r.error) continue;
    auto out = open_out(dir / trace_file_name(r));
    write_trace_csv(out, r.result.trace);
  }
}

void write_mssc_outputs(const std::filesystem::path& dir, const MsscCampaign& c,
                        const std::vector<RunRow>& rows, bool traces) {
  std::filesystem::create_directories(dir);
  if (traces) write_traces(dir / "traces", rows);
  {
    auto out = open_out(dir / "runs.csv");
    out << "start,start_seed,method,termination,final_value,iterations,fevals,seconds\n";
    for (const auto& r : rows) {
      out << r.start << ',' << r.start_seed << ',' << method_name(r.method) << ','
          << termination_field(r) << ','
          << (r.error ? std::string("nan") : format_real(r.result.final_value)) << ','
          << r.result.iterations << ',' << r.result.value_evals << ','
          << seconds(r.result.wall_time) << '\n';
    }
  }
  {
    auto out = open_out(dir / "aggregate.csv");
    out << "method,mean_iterations,mean_fevals,mean_seconds,mean_final_value,best_final_value,runs,failures\n";
    for (const auto& a : aggregate(rows, c.methods)) {
      out << method_name(a.method) << ',' << format_real(a.mean_iterations) << ','
          << format_real(a.mean_fevals) << ',' << seconds(a.mean_seconds) << ','
          << format_real(a.mean_final_value) << ',' << format_real(a.best_final_value)
          << ',' << a.runs << ',' << a.failures << '\n';
    }
  }
  write_results_json(dir, rows, c.params);
}

void write_qp_outputs(const std::filesystem::path& dir, const QpCampaign& c,
                      const QpOutcome& outcome, bool traces) {
  std::filesystem::create_directories(dir / "problems");
  if (traces) write_traces(dir / "traces", outcome.rows);
  for (std::size_t pi = 0; pi < outcome.problems.size(); ++pi) {
    const auto& prob = outcome.problems[pi];
    if (prob.b.size() == 0) continue;
    auto out = open_out(dir / "problems" / ("problem_" + std::to_string(pi) + ".json"));
    out << qp::to_json(prob).dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "runs.csv");
    out << "problem,problem_seed,start,start_seed,method,termination,rounded_objective,"
           "final_value,iterations,fevals,seconds\n";
    for (const auto& r : outcome.rows) {
      out << r.problem << ',' << r.problem_seed << ',' << r.start << ',' << r.start_seed
          << ',' << method_name(r.method) << ',' << termination_field(r) << ','
          << (r.error ? std::string("nan") : format_real(r.rounded_value)) << ','
          << (r.error ? std::string("nan") : format_real(r.result.final_value)) << ','
          << r.result.iterations << ',' << r.result.value_evals << ','
          << seconds(r.result.wall_time) << '\n';
    }
  }
  {
    auto out = open_out(dir / "winloss.csv");
    out << "versus,snsm_lower,snsm_higher,ties\n";
    for (const auto& wl : win_loss(outcome.rows, c.methods)) {
      out << method_name(wl.other) << ',' << wl.wins << ',' << wl.losses << ',' << wl.ties
          << '\n';
    }
  }
  {
    auto out = open_out(dir / "problems.csv");
    out << "problem,seed";
    for (auto m : c.methods) out << ",best_" << method_name(m);
    out << ",grid_optimum\n";
    for (const auto& s : summarize_problems(outcome, c.methods)) {
      out << s.problem << ',' << s.seed;
      for (const auto& v : s.best_rounded) out << ',' << (v ? format_real(*v) : "nan");
      out << ',' << (s.grid_optimum ? format_real(*s.grid_optimum) : "") << '\n';
    }
  }
  write_results_json(dir, outcome.rows, c.params);
}

}  // namespace nmsub::app
