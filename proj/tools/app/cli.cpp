#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <ostream>

#include "campaign.hpp"
#include "nmsub/errors.hpp"
#include "nmsub/trace_io.hpp"

namespace nmsub::app {

namespace {

struct SharedFlags {
  SolverParams params;
  double alpha = 1e-3;
  std::size_t starts = 10;
  std::size_t jobs = 1;
  std::string output_dir = "nmsub-out";
  std::vector<std::string> methods;
  bool no_traces = false;
  std::optional<std::size_t> only_problem;
  std::optional<std::size_t> only_start;
};

void add_shared_flags(CLI::App* cmd, SharedFlags& f) {
  auto& p = f.params;
  cmd->add_option("--sigma", p.sigma, "Armijo sufficient-decrease constant")->capture_default_str();
  cmd->add_option("--beta", p.beta, "Backtracking factor")->capture_default_str();
  cmd->add_option("--gamma", p.gamma, "Trial-step growth factor")->capture_default_str();
  cmd->add_option("--tau0", p.tau0, "Initial trial stepsize")->capture_default_str();
  cmd->add_option("--tau-min", p.tau_min, "Lower bound for trial stepsizes")->capture_default_str();
  cmd->add_option("--tau-max", p.tau_max, "Upper clamp for trial stepsizes")->capture_default_str();
  cmd->add_option("--mem0", p.mem0, "Initial memory")->capture_default_str();
  cmd->add_option("--mem-max", p.mem_max, "Maximum memory")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Hessian regularization (clustering)")->capture_default_str();
  cmd->add_option("--tol", p.tol, "Relative stopping tolerance")->capture_default_str();
  cmd->add_option("--max-iter", p.max_iter, "Iteration cap per run")->capture_default_str();
  cmd->add_option("--max-backtracks", p.max_backtracks, "Backtracking cap per iteration")
      ->capture_default_str();
  cmd->add_option("--seed", p.seed, "Base seed of the campaign")->capture_default_str();
  cmd->add_option("--starts", f.starts, "Random starts per problem")->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Concurrent runs")->capture_default_str();
  cmd->add_option("--output-dir", f.output_dir, "Directory for CSV/JSON outputs")
      ->capture_default_str();
  cmd->add_option("--method", f.methods, "snsm | snsm-m0 | nsm-steepest (repeatable)");
  cmd->add_option("--trace-stride", p.trace_stride, "Keep every k-th trace row")
      ->capture_default_str();
  cmd->add_flag("--no-traces", f.no_traces, "Skip per-run trace CSVs");
  cmd->add_option("--start-index", f.only_start, "Run only this start (single-cell replay)");
}

std::vector<Method> resolve_methods(const std::vector<std::string>& names,
                                    std::vector<Method> fallback) {
  if (names.empty()) return fallback;
  std::vector<Method> out;
  for (const auto& n : names) {
    auto m = parse_method(n);
    if (!m) throw CLI::ValidationError("--method", "unknown method '" + n + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

void print_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "method,mean_iterations,mean_fevals,mean_seconds,mean_final_value,best_final_value,runs,failures\n";
  for (const auto& a : rows) {
    out << method_name(a.method) << ',' << a.mean_iterations << ',' << a.mean_fevals << ','
        << a.mean_seconds << ',' << format_real(a.mean_final_value) << ','
        << format_real(a.best_final_value) << ',' << a.runs << ',' << a.failures << '\n';
  }
}

int cmd_mssc(const SharedFlags& f, const std::string& data_path, bool skip_header,
             std::size_t ell, const std::string& convention, std::ostream& out,
             std::ostream& err) {
  MsscCampaign c;
  try {
    c.problem.data = mssc::load_csv(data_path, skip_header);
  } catch (const std::exception& e) {
    err << "nmsub mssc: " << e.what() << '\n';
    return kExitIo;
  }
  c.problem.ell = ell;
  c.problem.alpha = f.alpha;
  c.methods = resolve_methods(f.methods, c.methods);
  c.starts = f.starts;
  c.params = f.params;
  c.jobs = f.jobs;
  c.convention = convention == "matrix" ? mssc::HessianRegConvention::Matrix
                                        : mssc::HessianRegConvention::Componentwise;
  c.only.start = f.only_start;
  c.problem.validate();

  const auto rows = run_mssc_campaign(c);
  try {
    write_mssc_outputs(f.output_dir, c, rows, !f.no_traces);
  } catch (const std::exception& e) {
    err << "nmsub mssc: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& r : rows) {
    if (r.error) {
      err << "run start=" << r.start << " method=" << method_name(r.method)
          << " failed: " << *r.error << '\n';
    }
  }
  print_aggregate(out, aggregate(rows, c.methods));
  return kExitOk;
}

int cmd_qp(const SharedFlags& f, std::size_t n, int c_factor, std::size_t problems,
           std::ostream& out, std::ostream& err) {
  QpCampaign c;
  c.n = n;
  c.radius_factor = c_factor;
  c.problems = problems;
  c.starts = f.starts;
  c.methods = resolve_methods(f.methods, c.methods);
  c.params = f.params;
  c.jobs = f.jobs;
  c.only.problem = f.only_problem;
  c.only.start = f.only_start;

  const auto outcome = run_qp_campaign(c);
  try {
    write_qp_outputs(f.output_dir, c, outcome, !f.no_traces);
  } catch (const std::exception& e) {
    err << "nmsub qp: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& r : outcome.rows) {
    if (r.error) {
      err << "run problem=" << r.problem << " start=" << r.start
          << " method=" << method_name(r.method) << " failed: " << *r.error << '\n';
    }
  }
  out << "versus,snsm_lower,snsm_higher,ties\n";
  for (const auto& wl : win_loss(outcome.rows, c.methods)) {
    out << method_name(wl.other) << ',' << wl.wins << ',' << wl.losses << ',' << wl.ties
        << '\n';
  }
  const auto summaries = summarize_problems(outcome, c.methods);
  if (!summaries.empty()) {
    out << "problem";
    for (auto m : c.methods) out << ",best_" << method_name(m);
    out << ",grid_optimum\n";
    for (const auto& s : summaries) {
      out << s.problem;
      for (const auto& v : s.best_rounded) out << ',' << (v ? format_real(*v) : "nan");
      out << ',' << (s.grid_optimum ? format_real(*s.grid_optimum) : "") << '\n';
    }
  }
  return kExitOk;
}

int cmd_trace_check(const std::string& path, const TraceCheckOptions& opts,
                    std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "nmsub trace-check: cannot open '" << path << "'\n";
    return kExitIo;
  }
  std::vector<TraceRecord> trace;
  try {
    trace = read_trace_csv(in);
  } catch (const ParseError& e) {
    err << "nmsub trace-check: " << path << ": " << e.what() << '\n';
    return kExitIo;
  }
  if (auto v = check_trace(trace, opts)) {
    const auto iter = v->row < trace.size() ? trace[v->row].iter : v->row;
    err << "FAIL row " << v->row << " (iter " << iter << "): " << to_string(v->law) << ": "
        << v->message << '\n';
    return kExitVerification;
  }
  out << "ok: " << trace.size() << " rows satisfy all trace laws\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonmonotone subgradient methods for upper-C2 objectives"};
  app.name("nmsub");
  app.require_subcommand(1);

  SharedFlags mssc_flags;
  std::string data_path;
  bool skip_header = false;
  std::size_t ell = 2;
  std::string convention = "componentwise";
  auto* mssc_cmd = app.add_subcommand("mssc", "Multi-start clustering campaign");
  add_shared_flags(mssc_cmd, mssc_flags);
  mssc_cmd->add_option("--data", data_path, "CSV data set, one point per row")->required();
  mssc_cmd->add_flag("--skip-header", skip_header, "Ignore the first row of the CSV");
  mssc_cmd->add_option("--ell", ell, "Number of clusters")->capture_default_str()
      ->check(CLI::PositiveNumber);
  mssc_cmd->add_option("--hessian-reg-convention", convention,
                       "componentwise: p/(2q+alpha); matrix: p/(2q+p*alpha)")
      ->capture_default_str()
      ->check(CLI::IsMember({"componentwise", "matrix"}));

  SharedFlags qp_flags;
  qp_flags.starts = 100;
  std::size_t n = 2;
  int c_factor = 2;
  std::size_t problems = 10;
  auto* qp_cmd = app.add_subcommand("qp", "Integer-ball QP campaign through the FBE");
  add_shared_flags(qp_cmd, qp_flags);
  qp_cmd->add_option("--n", n, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
  qp_cmd->add_option("--c", c_factor, "Radius factor: r = (c/20) sqrt(n)")
      ->capture_default_str()
      ->check(CLI::Range(1, 9));
  qp_cmd->add_option("--problems", problems, "Number of generated problems")
      ->capture_default_str();
  qp_cmd->add_option("--problem-index", qp_flags.only_problem,
                     "Run only this problem (single-cell replay)");

  std::string trace_path;
  TraceCheckOptions check_opts;
  double declared_a = 0.0;
  int check_mem_max = -1;
  auto* check_cmd = app.add_subcommand("trace-check", "Verify the sequence laws of a trace CSV");
  check_cmd->add_option("trace", trace_path, "Trace CSV")->required();
  auto* a_opt = check_cmd->add_option("--declared-a", declared_a,
                                      "Direction constant a; enables decrease and rate checks");
  check_cmd->add_option("--sigma", check_opts.sigma)->capture_default_str();
  check_cmd->add_option("--mem-max", check_mem_max, "Memory bound m (default: max in trace)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mssc_cmd) {
      mssc_flags.params.validate();
      return cmd_mssc(mssc_flags, data_path, skip_header, ell, convention, out, err);
    }
    if (*qp_cmd) {
      qp_flags.params.validate();
      return cmd_qp(qp_flags, n, c_factor, problems, out, err);
    }
    if (*check_cmd) {
      if (*a_opt) check_opts.declared_a = declared_a;
      if (check_mem_max >= 0) check_opts.mem_max = check_mem_max;
      return cmd_trace_check(trace_path, check_opts, out, err);
    }
  } catch (const CLI::Error& e) {
    err << "nmsub: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "nmsub: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "nmsub: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace nmsub::app
