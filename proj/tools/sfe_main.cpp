// Command-line front end: solve / screen / certify / batch plus the two
// bundled reproductions (repro-small, repro-synthetic). Flags mirror
// RunConfig fields. Exit codes: 0 success, 2 inconclusive certification,
// 1 any error.

#include "sfe/core.hpp"
#include "sfe/driver.hpp"
#include "sfe/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

void print_vector(const char* name, const sfe::Vector& v, const char* fmt = "%.6f") {
  std::printf("%s = [", name);
  for (sfe::Index i = 0; i < v.size(); ++i) {
    if (i) std::printf(", ");
    std::printf(fmt, v[i]);
  }
  std::printf("]\n");
}

void print_mask(const char* name, const std::vector<bool>& mask) {
  std::printf("%s:", name);
  bool any = false;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      std::printf(" %zu", i);
      any = true;
    }
  std::printf(any ? "\n" : " (none)\n");
}

void print_report(const sfe::CertificationReport& rep) {
  std::printf("verdict: %s (%s)\n", rep.unique ? "unique" : "inconclusive",
              to_string(rep.method));
  std::printf("eliminated: %td of %td columns\n", rep.eliminated_count,
              rep.reduced_cols + rep.eliminated_count);
  if (rep.unique && rep.method == sfe::CertMethod::safe_reduction) {
    std::printf("reduced matrix: %td x %td, sigma_min = %.6g\n", rep.reduced_rows,
                rep.reduced_cols, rep.reduced_min_singular_value);
  }
  if (rep.distance_bound)
    std::printf("distance bound: %.6g\n", *rep.distance_bound);
  std::printf("gap: %.6g\n", rep.gap_at_certification);
  if (rep.iterations_at_certification)
    std::printf("certified at iteration %d\n", *rep.iterations_at_certification);
}

struct CommonArgs {
  sfe::RunConfig config;
  std::string format = "json";
};

void add_loop_options(CLI::App* cmd, CommonArgs& args, bool needs_input) {
  auto* matrix = cmd->add_option("--matrix", args.config.matrix_path,
                                 "Matrix A (CSV or Matrix Market)");
  auto* rhs = cmd->add_option("--rhs", args.config.rhs_path,
                              "Right-hand side b (or matrix of columns for batch)");
  if (needs_input) {
    matrix->required()->check(CLI::ExistingFile);
    rhs->required()->check(CLI::ExistingFile);
  }
  const std::map<std::string, sfe::RunConfig::Solver> solvers{
      {"pgd", sfe::RunConfig::Solver::pgd},
      {"accel", sfe::RunConfig::Solver::accel}};
  cmd->add_option("--solver", args.config.solver, "Iterative solver")
      ->transform(CLI::CheckedTransformer(solvers, CLI::ignore_case));
  const std::map<std::string, sfe::ScreenMethod> methods{
      {"sphere", sfe::ScreenMethod::sphere}, {"dome", sfe::ScreenMethod::dome}};
  cmd->add_option("--screen-method", args.config.screen_method,
                  "Feature elimination bound")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
  const std::map<std::string, sfe::RunConfig::NuStrictStrategy> strategies{
      {"clip", sfe::RunConfig::NuStrictStrategy::clip},
      {"ones", sfe::RunConfig::NuStrictStrategy::ones},
      {"lp", sfe::RunConfig::NuStrictStrategy::lp},
      {"auto", sfe::RunConfig::NuStrictStrategy::auto_select}};
  cmd->add_option("--nu-strict-strategy", args.config.nu_strict_strategy,
                  "Strictly dual-feasible anchor strategy")
      ->transform(CLI::CheckedTransformer(strategies, CLI::ignore_case));
  cmd->add_option("--max-iters", args.config.max_iters, "Iteration budget")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--screen-every", args.config.screen_every,
                  "Iterations between screening checkpoints")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rank-tol", args.config.rank_tol,
                  "Relative rank tolerance for the reduced-matrix SVD test");
  cmd->add_option("--feas-tol", args.config.feas_tol,
                  "Dual feasibility tolerance (< 0: scaled default)");
  cmd->add_option("--safety-margin", args.config.safety_margin,
                  "Eliminate only when the lower bound exceeds this margin");
  cmd->add_flag("--stop-on-certification,!--no-stop-on-certification",
                args.config.stop_on_certification,
                "Stop iterating once uniqueness is certified");
  cmd->add_flag("--l1-rescale-lp", args.config.l1_rescale_lp,
                "Rescale the LP anchor to unit l1 norm");
  cmd->add_option("--report", args.config.report_path, "Write a report here");
  cmd->add_option("--format", args.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
}

sfe::ReportFormat parse_format(const std::string& format) {
  return format == "csv" ? sfe::ReportFormat::csv : sfe::ReportFormat::json;
}

int finish_loop(const sfe::ScreeningLoopResult& result, const CommonArgs& args) {
  print_report(result.report);
  std::printf("anchor strategy: %s\n", to_string(result.strategy_used));
  print_mask("eliminated indices", result.final_mask);
  if (!args.config.report_path.empty())
    write_report(result, args.config, args.config.report_path,
                 parse_format(args.format));
  return result.report.unique ? kExitSuccess : kExitInconclusive;
}

int run_single(CommonArgs& args) {
  sfe::Matrix A = sfe::read_matrix(args.config.matrix_path);
  const sfe::Vector b = sfe::read_vector(args.config.rhs_path);
  const sfe::ProblemInstance problem(std::move(A), b);
  const sfe::SmoothObjective obj = sfe::make_nnls_objective(b);
  const sfe::ScreeningLoopResult result =
      sfe::run_screening_loop(problem, obj, args.config);
  return finish_loop(result, args);
}

int run_solve(CommonArgs& args, const std::string& out_path) {
  const sfe::Matrix A = sfe::read_matrix(args.config.matrix_path);
  const sfe::Vector b = sfe::read_vector(args.config.rhs_path);
  const sfe::ProblemInstance problem(A, b);
  const sfe::SmoothObjective obj = sfe::make_nnls_objective(b);
  const double norm2 = sfe::spectral_norm(A, 1e-10);
  const sfe::Vector x0 = sfe::Vector::Zero(A.cols());
  const int stride = std::max(1, args.config.max_iters);
  sfe::SolverTrace trace;
  if (args.config.solver == sfe::RunConfig::Solver::pgd) {
    trace = sfe::pgd_solve(problem, obj, x0, 1.0 / (norm2 * norm2),
                           args.config.max_iters, {}, stride);
  } else {
    trace = sfe::accelerated_solve(problem, obj, x0, args.config.max_iters,
                                   sfe::AccelOptions{}, {}, stride);
  }
  const sfe::Vector x = trace.final_x();
  std::printf("iterations: %d\n", trace.iterations_run);
  std::printf("objective: %.12g\n", trace.final_objective());
  sfe::Index nnz = 0;
  for (sfe::Index i = 0; i < x.size(); ++i)
    if (x[i] > 0) ++nnz;
  std::printf("nonzeros: %td of %td\n", nnz, x.size());
  if (!out_path.empty()) sfe::write_csv_matrix(x, out_path);
  return kExitSuccess;
}

int run_batch(CommonArgs& args, bool finish_with_active_set) {
  args.config.finish_with_active_set = finish_with_active_set;
  const sfe::Matrix A = sfe::read_matrix(args.config.matrix_path);
  const sfe::Matrix B = sfe::read_matrix(args.config.rhs_path);
  const sfe::BatchReport report = sfe::batch_certify(A, B, args.config);
  std::printf("problems: %zu\n", report.problems.size());
  std::printf("certified unique: %td\n", report.certified_count);
  std::printf("eliminated fraction: %.6f\n", report.eliminated_fraction);
  if (!args.config.report_path.empty())
    write_report(report, args.config, args.config.report_path,
                 parse_format(args.format));
  return report.certified_count == static_cast<sfe::Index>(report.problems.size())
             ? kExitSuccess
             : kExitInconclusive;
}

int run_repro_small(const std::string& report_path) {
  const sfe::SmallDemoReport rep = sfe::run_small_demo();
  std::printf("-- bundled 3x5 demo --\n");
  print_vector("x_hat (250 iterations)", rep.full.x_hat);
  print_vector("nu_strict", rep.nu_strict.nu_strict, "%.4f");
  std::printf("t_star = %.6f\n", rep.rounded.t_star);
  print_vector("nu_hat", rep.rounded.nu_hat, "%.4f");
  std::printf("gap = %.6g\n", rep.full.gap);
  print_vector("sphere bounds", rep.rounded.sphere_bounds, "%.4f");
  print_mask("eliminated indices", rep.rounded.eliminated);
  std::printf("squared distance bound = %.6g\n", rep.rounded.distance_bound_sq);
  std::printf("projection gap = %.6g\n", rep.rounded.projection_gap);
  print_report(rep.cert);
  if (rep.certified_at)
    std::printf("first certified at iteration %d\n", *rep.certified_at);
  if (rep.pstar_positive_at)
    std::printf("positive dual objective at iteration %d\n", *rep.pstar_positive_at);
  if (!report_path.empty()) sfe::write_small_demo_report(rep, report_path);
  return rep.cert.unique ? kExitSuccess : kExitInconclusive;
}

struct SyntheticArgs {
  std::string kind = "gaussian";
  sfe::Index rows = 50;
  sfe::Index cols = 100;
  sfe::Index count = 1;
  double kernel_sigma = 0.2;
  std::string save_matrix;
  std::string save_rhs;
  bool finish_with_active_set = false;
};

int run_repro_synthetic(CommonArgs& args, SyntheticArgs& syn,
                        bool screen_every_given) {
  const sfe::SyntheticKind kind = syn.kind == "kernel"
                                      ? sfe::SyntheticKind::kernel
                                      : sfe::SyntheticKind::gaussian;
  auto [A, B] = sfe::generate_synthetic(kind, syn.rows, syn.cols, syn.count,
                                        args.config.seed, syn.kernel_sigma);
  if (!syn.save_matrix.empty()) sfe::write_csv_matrix(A, syn.save_matrix);
  if (!syn.save_rhs.empty()) sfe::write_csv_matrix(B, syn.save_rhs);
  if (syn.count == 1) {
    const sfe::ProblemInstance problem(std::move(A), B.col(0));
    const sfe::SmoothObjective obj = sfe::make_nnls_objective(B.col(0));
    const sfe::ScreeningLoopResult result =
        sfe::run_screening_loop(problem, obj, args.config);
    return finish_loop(result, args);
  }
  if (!screen_every_given) args.config.screen_every = 50;
  args.config.finish_with_active_set = syn.finish_with_active_set;
  const sfe::BatchReport report = sfe::batch_certify(A, B, args.config);
  std::printf("problems: %zu\n", report.problems.size());
  std::printf("certified unique: %td\n", report.certified_count);
  std::printf("eliminated fraction: %.6f\n", report.eliminated_fraction);
  if (!args.config.report_path.empty())
    write_report(report, args.config, args.config.report_path,
                 parse_format(args.format));
  return report.certified_count == static_cast<sfe::Index>(report.problems.size())
             ? kExitSuccess
             : kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe feature elimination and uniqueness certification for "
               "non-negative least squares"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* solve = app.add_subcommand("solve", "Run the solver without screening");
  CommonArgs solve_args;
  std::string solve_out;
  add_loop_options(solve, solve_args, /*needs_input=*/true);
  solve->add_option("--out", solve_out, "Write the solution vector here (CSV)");

  auto* screen = app.add_subcommand(
      "screen", "Iterate and screen; report eliminable features");
  CommonArgs screen_args;
  screen_args.config.stop_on_certification = false;
  add_loop_options(screen, screen_args, /*needs_input=*/true);

  auto* certify = app.add_subcommand(
      "certify", "Iterate, screen, and certify solution uniqueness");
  CommonArgs certify_args;
  add_loop_options(certify, certify_args, /*needs_input=*/true);

  auto* batch = app.add_subcommand(
      "batch", "Certify many right-hand sides sharing one matrix");
  CommonArgs batch_args;
  batch_args.config.screen_every = 50;
  bool batch_finish = false;
  add_loop_options(batch, batch_args, /*needs_input=*/true);
  batch->add_flag("--finish-with-active-set", batch_finish,
                  "Solve stragglers with the active-set solver at the end");

  auto* repro_small =
      app.add_subcommand("repro-small", "Reproduce the bundled 3x5 demo");
  std::string small_report;
  repro_small->add_option("--report", small_report, "Write a JSON report here");

  auto* repro_syn = app.add_subcommand(
      "repro-synthetic", "Run the pipeline on a seeded synthetic instance");
  CommonArgs syn_args;
  SyntheticArgs syn;
  add_loop_options(repro_syn, syn_args, /*needs_input=*/false);
  repro_syn->add_option("--kind", syn.kind, "Matrix ensemble")
      ->check(CLI::IsMember({"gaussian", "kernel"}));
  repro_syn->add_option("--rows", syn.rows, "Rows of A")->check(CLI::PositiveNumber);
  repro_syn->add_option("--cols", syn.cols, "Columns of A")
      ->check(CLI::PositiveNumber);
  repro_syn->add_option("--count", syn.count, "Number of right-hand sides")
      ->check(CLI::PositiveNumber);
  repro_syn->add_option("--seed", syn_args.config.seed, "Generator seed");
  repro_syn->add_option("--kernel-sigma", syn.kernel_sigma,
                        "Kernel width (kind = kernel)");
  repro_syn->add_option("--save-matrix", syn.save_matrix,
                        "Also write the generated A here (CSV)");
  repro_syn->add_option("--save-rhs", syn.save_rhs,
                        "Also write the generated right-hand sides here (CSV)");
  repro_syn->add_flag("--finish-with-active-set", syn.finish_with_active_set,
                      "Solve batch stragglers with the active-set solver");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitError;
  }

  try {
    if (solve->parsed()) {
      solve_args.config.command = sfe::RunConfig::Command::solve;
      return run_solve(solve_args, solve_out);
    }
    if (screen->parsed()) {
      screen_args.config.command = sfe::RunConfig::Command::screen;
      return run_single(screen_args);
    }
    if (certify->parsed()) {
      certify_args.config.command = sfe::RunConfig::Command::certify;
      return run_single(certify_args);
    }
    if (batch->parsed()) {
      batch_args.config.command = sfe::RunConfig::Command::batch;
      return run_batch(batch_args, batch_finish);
    }
    if (repro_small->parsed()) return run_repro_small(small_report);
    if (repro_syn->parsed()) {
      syn_args.config.command = sfe::RunConfig::Command::repro_synthetic;
      return run_repro_synthetic(syn_args, syn,
                                 repro_syn->count("--screen-every") > 0);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
