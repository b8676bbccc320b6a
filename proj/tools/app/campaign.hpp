#pragma once

// Multi-start benchmark campaigns over the clustering and QP backends.
//
// Every (problem, start) cell draws its randomness from
// run_seed(base, problem, start) (see nmsub/random.hpp), so a single cell
// re-run in isolation reproduces its row and trace.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmsub/core.hpp"
#include "nmsub/fbe_qp.hpp"
#include "nmsub/mssc.hpp"

namespace nmsub::app {

enum class Method { Snsm, SnsmM0, NsmSteepest };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

/// Runs one method from x0. Snsm uses params as given; SnsmM0 forces
/// mem0 = mem_max = 0; NsmSteepest runs the generic driver with d = -w,
/// constant tau0 and memory ramping to mem_max.
RunResult run_method(Method method, const Objective& oracle,
                     const DirectionStrategy& strategy, const SolverParams& params,
                     const Point& x0);

struct RunRow {
  std::size_t problem = 0;
  std::size_t start = 0;
  std::uint64_t problem_seed = 0;
  std::uint64_t start_seed = 0;
  Method method = Method::Snsm;
  std::optional<std::string> error;
  RunResult result;
  /// QP only: objective at the rounded point.
  double rounded_value = 0.0;
};

struct CellFilter {
  std::optional<std::size_t> problem;
  std::optional<std::size_t> start;
};

struct MsscCampaign {
  mssc::ClusteringProblem problem;
  std::vector<Method> methods{Method::Snsm, Method::SnsmM0, Method::NsmSteepest};
  std::size_t starts = 10;
  SolverParams params;
  std::size_t jobs = 1;
  mssc::HessianRegConvention convention = mssc::HessianRegConvention::Componentwise;
  CellFilter only;
};

/// Rows sorted by (start, method order).
std::vector<RunRow> run_mssc_campaign(const MsscCampaign& campaign);

struct AggregateRow {
  Method method = Method::Snsm;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_iterations = 0.0;
  double mean_fevals = 0.0;
  double mean_seconds = 0.0;
  double mean_final_value = 0.0;
  double best_final_value = 0.0;
};

/// Arithmetic means over the successful runs of each method.
std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows,
                                    const std::vector<Method>& methods);

struct QpCampaign {
  std::size_t n = 2;
  int radius_factor = 2;
  std::size_t problems = 10;
  std::size_t starts = 100;
  std::vector<Method> methods{Method::Snsm, Method::SnsmM0};
  SolverParams params;
  std::size_t jobs = 1;
  CellFilter only;
};

struct QpOutcome {
  std::vector<qp::QPProblem> problems;
  /// Rows sorted by (problem, start, method order).
  std::vector<RunRow> rows;
};

QpOutcome run_qp_campaign(const QpCampaign& campaign);

/// Rounded objectives within this distance count as a tie.
inline constexpr double kTieTolerance = 1e-9;

struct WinLoss {
  Method other = Method::SnsmM0;
  std::size_t wins = 0;    // snsm strictly lower
  std::size_t losses = 0;  // snsm strictly higher
  std::size_t ties = 0;
};

/// Compares snsm against every other method per (problem, start) instance.
std::vector<WinLoss> win_loss(const std::vector<RunRow>& rows,
                              const std::vector<Method>& methods,
                              double tie_tol = kTieTolerance);

struct ProblemSummary {
  std::size_t problem = 0;
  std::uint64_t seed = 0;
  std::vector<std::optional<double>> best_rounded;  // per method
  std::optional<double> grid_optimum;               // n <= 2 only
};

std::vector<ProblemSummary> summarize_problems(const QpOutcome& outcome,
                                               const std::vector<Method>& methods);

// Output writers. Trace CSVs are byte-deterministic; files with a seconds
// column are not.

std::string trace_file_name(const RunRow& row);

void write_traces(const std::filesystem::path& dir, const std::vector<RunRow>& rows);
void write_mssc_outputs(const std::filesystem::path& dir, const MsscCampaign& campaign,
                        const std::vector<RunRow>& rows, bool traces = true);
void write_qp_outputs(const std::filesystem::path& dir, const QpCampaign& campaign,
                      const QpOutcome& outcome, bool traces = true);

}  // namespace nmsub::app
