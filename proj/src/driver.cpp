#include "sfe/driver.hpp"

#include "sfe/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sfe {

void RunConfig::validate() const {
  if (screen_every < 1) throw invalid_input("RunConfig: screen_every must be >= 1");
  if (max_iters < 0) throw invalid_input("RunConfig: max_iters must be >= 0");
}

namespace {

// Strict-anchor dispenser. The matrix-only strategies (ones, lp) are solved
// once and reused — including across problems in a batch — while clip is
// re-derived from the current nu' at every request. A permanent strategy
// failure is cached so the LP is not re-attempted at every checkpoint.
class AnchorProvider {
 public:
  AnchorProvider(const Matrix& A, RunConfig::NuStrictStrategy strategy,
                 bool l1_rescale)
      : A_(A), strategy_(strategy), l1_rescale_(l1_rescale) {}

  struct Anchor {
    const StrictFeasibleCertificate* cert;
    const Vector* At_nu_strict;
  };

  Anchor get(const Vector& nu_prime) {
    using Strategy = RunConfig::NuStrictStrategy;
    if (strategy_ == Strategy::clip ||
        (strategy_ == Strategy::auto_select && try_clip(nu_prime)))
      return clip_anchor(nu_prime);
    if (static_failed_) throw no_strict_point(static_error_);
    if (!static_cert_) {
      try {
        if (strategy_ == Strategy::ones) {
          static_cert_ = strict_feasible_ones(A_);
        } else if (strategy_ == Strategy::lp) {
          static_cert_ = strict_feasible_lp(A_, l1_rescale_);
        } else {  // auto: clip already failed
          try {
            static_cert_ = strict_feasible_ones(A_);
          } catch (const condition_failed&) {
            static_cert_ = strict_feasible_lp(A_);
          }
        }
      } catch (const std::exception& e) {
        static_failed_ = true;
        static_error_ = e.what();
        throw;
      }
      static_At_ns_ = A_.transpose() * static_cert_->nu_strict;
    }
    return {&*static_cert_, &static_At_ns_};
  }

 private:
  bool try_clip(const Vector& nu_prime) {
    try {
      clip_cert_ = strict_feasible_clip(A_, nu_prime);
      clip_At_ns_ = A_.transpose() * clip_cert_.nu_strict;
      return true;
    } catch (const condition_failed&) {
      return false;
    }
  }

  Anchor clip_anchor(const Vector& nu_prime) {
    if (strategy_ == RunConfig::NuStrictStrategy::clip) {
      clip_cert_ = strict_feasible_clip(A_, nu_prime);  // throws on failure
      clip_At_ns_ = A_.transpose() * clip_cert_.nu_strict;
    }
    return {&clip_cert_, &clip_At_ns_};
  }

  const Matrix& A_;
  RunConfig::NuStrictStrategy strategy_;
  bool l1_rescale_;
  StrictFeasibleCertificate clip_cert_;
  Vector clip_At_ns_;
  std::optional<StrictFeasibleCertificate> static_cert_;
  Vector static_At_ns_;
  bool static_failed_ = false;
  std::string static_error_;
};

struct CheckpointOutcome {
  CheckpointRecord record;
  CertificationReport report;
  ScreeningResult screen;
  PrimalDualPair pair;
  StrictStrategy strategy;
};

CheckpointOutcome evaluate_checkpoint(const ProblemInstance& problem,
                                      const SmoothObjective& obj,
                                      const RunConfig& config,
                                      AnchorProvider& anchors, int iteration,
                                      const Vector& x) {
  const Matrix& A = problem.A();
  const Vector Ax = A * x;
  Vector nu_prime = obj.gradient(Ax);
  const AnchorProvider::Anchor anchor = anchors.get(nu_prime);
  const Vector At_nu_prime = A.transpose() * nu_prime;
  LineSearchResult ls = dual_line_search(At_nu_prime, *anchor.At_nu_strict,
                                         nu_prime, anchor.cert->nu_strict);

  CheckpointOutcome out;
  out.strategy = anchor.cert->method;
  if (config.feas_tol >= 0) {
    // paranoid mode: validate both points instead of trusting construction
    out.pair = make_primal_dual_pair(problem, obj, x, std::move(ls.nu_hat),
                                     config.feas_tol);
  } else {
    out.pair.x_hat = x;
    out.pair.nu_hat = std::move(ls.nu_hat);
    out.pair.gap =
        std::max(obj.value(Ax) + obj.conjugate_value(out.pair.nu_hat), 0.0);
  }

  out.screen = config.screen_method == ScreenMethod::sphere
                   ? sphere_screen(problem, obj, out.pair, config.safety_margin)
                   : dome_screen(problem, obj, out.pair, config.safety_margin);
  out.report = certify_unique(problem, out.screen.eliminated, config.rank_tol);
  out.report.gap_at_certification = out.pair.gap;

  out.record.iteration = iteration;
  out.record.gap = out.pair.gap;
  out.record.eliminated_count = out.screen.eliminated_count();
  out.record.certified = out.report.unique;
  out.record.t_star = ls.t_star;
  out.record.dual_objective = obj.dual_value(out.pair.nu_hat);
  if (out.report.unique && out.report.reduced_min_singular_value > 0.0) {
    const double db = std::isfinite(out.report.reduced_min_singular_value)
                          ? distance_bound(out.pair.gap,
                                           out.report.reduced_min_singular_value)
                          : 0.0;
    out.report.distance_bound = db;
    out.record.distance_bound = db;
  }
  return out;
}

}  // namespace

ScreeningLoopResult run_screening_loop(const ProblemInstance& problem,
                                       const SmoothObjective& obj,
                                       const RunConfig& config) {
  config.validate();
  if (config.screen_method == ScreenMethod::dome) problem.gram();

  const double norm2 = spectral_norm(problem.A(), 1e-10);
  const double t = 1.0 / (norm2 * norm2);
  AnchorProvider anchors(problem.A(), config.nu_strict_strategy,
                         config.l1_rescale_lp);

  ScreeningLoopResult out;
  auto checkpoint = [&](int k, const Vector& x) -> bool {
    CheckpointOutcome c =
        evaluate_checkpoint(problem, obj, config, anchors, k, x);
    out.curve.push_back(c.record);
    if (config.keep_history) {
      out.mask_history.push_back(c.screen.eliminated);
      out.nu_hat_history.push_back(c.pair.nu_hat);
    }
    if (!out.first_pstar_positive_iteration && c.record.dual_objective > 0.0)
      out.first_pstar_positive_iteration = k;
    if (c.report.unique && !out.first_certified_iteration)
      out.first_certified_iteration = k;
    const bool stop = c.report.unique && config.stop_on_certification;
    out.report = std::move(c.report);
    out.final_mask = std::move(c.screen.eliminated);
    out.final_pair = std::move(c.pair);
    out.strategy_used = c.strategy;
    return !stop;
  };

  const Vector x0 = Vector::Zero(problem.cols());
  if (config.max_iters == 0) {
    out.trace = pgd_solve(problem, obj, x0, t, 0);
    checkpoint(0, x0);
  } else {
    const IterCallback cb = [&](int k, const Vector& x) {
      if (k % config.screen_every != 0 && k != config.max_iters) return true;
      return checkpoint(k, x);
    };
    out.trace =
        config.solver == RunConfig::Solver::pgd
            ? pgd_solve(problem, obj, x0, t, config.max_iters, cb,
                        config.screen_every)
            : accelerated_solve(problem, obj, x0, config.max_iters,
                                AccelOptions{.initial_step = t}, cb,
                                config.screen_every);
  }
  out.report.iterations_at_certification = out.first_certified_iteration;
  return out;
}

BatchReport batch_certify(const Matrix& A, const Matrix& B,
                          const RunConfig& config) {
  config.validate();
  if (B.rows() != A.rows())
    throw invalid_input("batch_certify: B row count does not match A");
  if (B.cols() < 1) throw invalid_input("batch_certify: need at least one RHS");
  if (config.solver != RunConfig::Solver::pgd)
    throw invalid_input("batch_certify: only the pgd solver is batched");

  const Index n = A.cols();
  const Index k_problems = B.cols();
  ProblemInstance problem(A);
  if (config.screen_method == ScreenMethod::dome) problem.gram();
  const double norm2 = spectral_norm(A, 1e-10);
  const double t = 1.0 / (norm2 * norm2);
  AnchorProvider anchors(A, config.nu_strict_strategy, config.l1_rescale_lp);

  BatchReport out;
  out.problems.resize(static_cast<size_t>(k_problems));
  out.final_masks.assign(static_cast<size_t>(k_problems),
                         std::vector<bool>(static_cast<size_t>(n), false));
  std::vector<Index> eliminated_now(static_cast<size_t>(k_problems), 0);
  std::vector<Index> active;
  for (Index j = 0; j < k_problems; ++j) active.push_back(j);

  Matrix X = Matrix::Zero(n, k_problems);  // active iterates, column j <-> active[j]
  Matrix B_active = B;

  auto drop_certified = [&](const std::vector<size_t>& done_local) {
    if (done_local.empty()) return;
    std::vector<Index> next_active;
    Matrix X2(n, static_cast<Index>(active.size() - done_local.size()));
    Matrix B2(B.rows(), X2.cols());
    Index w = 0;
    size_t d = 0;
    for (size_t c = 0; c < active.size(); ++c) {
      if (d < done_local.size() && done_local[d] == c) {
        ++d;
        continue;
      }
      next_active.push_back(active[c]);
      X2.col(w) = X.col(static_cast<Index>(c));
      B2.col(w) = B_active.col(static_cast<Index>(c));
      ++w;
    }
    active = std::move(next_active);
    X = std::move(X2);
    B_active = std::move(B2);
  };

  auto screen_active = [&](int iteration) {
    std::vector<size_t> done_local;
    for (size_t c = 0; c < active.size(); ++c) {
      const Index j = active[c];
      const Vector b_j = B_active.col(static_cast<Index>(c));
      const SmoothObjective obj_j = make_nnls_objective(b_j);
      try {
        CheckpointOutcome co = evaluate_checkpoint(
            problem, obj_j, config, anchors, iteration,
            X.col(static_cast<Index>(c)));
        eliminated_now[static_cast<size_t>(j)] = co.record.eliminated_count;
        out.final_masks[static_cast<size_t>(j)] = co.screen.eliminated;
        out.problems[static_cast<size_t>(j)] = co.report;
        if (co.report.unique) {
          out.problems[static_cast<size_t>(j)].iterations_at_certification =
              iteration;
          done_local.push_back(c);
        }
      } catch (const no_strict_point&) {
        // leave this problem inconclusive; others continue
      } catch (const condition_failed&) {
      }
    }
    drop_certified(done_local);
  };

  int k = 0;
  for (; k < config.max_iters && !active.empty(); ) {
    // batched projected-gradient step: all residuals in one GEMM pair
    const Matrix R = A * X - B_active;
    X = (X - t * (A.transpose() * R)).cwiseMax(0.0);
    ++k;
    if (k % config.screen_every == 0 || k == config.max_iters) {
      screen_active(k);
      Index elim_total = 0;
      for (Index e : eliminated_now) elim_total += e;
      BatchCheckpoint cp;
      cp.iteration = k;
      cp.certified_count =
          k_problems - static_cast<Index>(active.size());
      cp.eliminated_fraction = static_cast<double>(elim_total) /
                               static_cast<double>(k_problems * n);
      out.checkpoints.push_back(cp);
    }
  }

  if (config.finish_with_active_set && !active.empty()) {
    // direct-solver finish for stragglers: solve to optimality, rebuild the
    // dual point from the solution, and screen once more
    std::vector<size_t> done_local;
    for (size_t c = 0; c < active.size(); ++c) {
      const Index j = active[c];
      const Vector b_j = B_active.col(static_cast<Index>(c));
      const SmoothObjective obj_j = make_nnls_objective(b_j);
      try {
        const NnlsResult solved = active_set_nnls(A, b_j);
        CheckpointOutcome co = evaluate_checkpoint(problem, obj_j, config,
                                                   anchors, k, solved.x);
        eliminated_now[static_cast<size_t>(j)] = co.record.eliminated_count;
        out.final_masks[static_cast<size_t>(j)] = co.screen.eliminated;
        co.report.iterations_at_certification = std::nullopt;
        out.problems[static_cast<size_t>(j)] = co.report;
        if (co.report.unique) done_local.push_back(c);
      } catch (const std::exception&) {
        // stays inconclusive
      }
    }
    drop_certified(done_local);
  }

  out.certified_count = k_problems - static_cast<Index>(active.size());
  Index elim_total = 0;
  for (Index e : eliminated_now) elim_total += e;
  out.eliminated_fraction =
      static_cast<double>(elim_total) / static_cast<double>(k_problems * n);
  return out;
}

std::pair<Matrix, Matrix> generate_synthetic(SyntheticKind kind, Index m, Index n,
                                             Index k, std::uint64_t seed,
                                             double kernel_sigma) {
  if (m < 1 || n < 1 || k < 1)
    throw invalid_input("generate_synthetic: m, n, k must be >= 1");
  CounterRng rng(seed);
  Matrix A;
  if (kind == SyntheticKind::gaussian) {
    A = rng.normal_matrix(m, n);
  } else {
    if (!(kernel_sigma > 0))
      throw invalid_input("generate_synthetic: kernel_sigma must be positive");
    A.resize(m, n);
    const double s2 = kernel_sigma * kernel_sigma;
    for (Index j = 0; j < n; ++j) {
      const double tj = n > 1 ? static_cast<double>(j) / static_cast<double>(n - 1) : 0.5;
      for (Index i = 0; i < m; ++i) {
        const double si = m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.5;
        A(i, j) = std::exp(-(si - tj) * (si - tj) / s2);
      }
    }
  }
  Matrix B = rng.normal_matrix(m, k);
  return {std::move(A), std::move(B)};
}

Matrix small_demo_matrix() {
  Matrix A(3, 5);
  A << 1, 6, -1, 8, 0,
      -2, 7, 1, 8, 2,
       3, 1, 4, 1, -5;
  return A;
}

Vector small_demo_rhs() {
  Vector b(3);
  b << -1, 2, 1;
  return b;
}

namespace {

SmallDemoChain demo_chain(const ProblemInstance& problem,
                          const SmoothObjective& obj,
                          const StrictFeasibleCertificate& anchor,
                          const Vector& At_ns, Vector x_hat,
                          double sigma_min_red) {
  SmallDemoChain chain;
  chain.x_hat = std::move(x_hat);
  chain.nu_prime = obj.gradient(problem.A() * chain.x_hat);
  const Vector At_np = problem.A().transpose() * chain.nu_prime;
  LineSearchResult ls =
      dual_line_search(At_np, At_ns, chain.nu_prime, anchor.nu_strict);
  chain.t_star = ls.t_star;
  chain.nu_hat = std::move(ls.nu_hat);
  chain.gap = std::max(
      obj.value(problem.A() * chain.x_hat) + obj.conjugate_value(chain.nu_hat), 0.0);
  const PrimalDualPair pair{chain.x_hat, chain.nu_hat, chain.gap};
  ScreeningResult screen = sphere_screen(problem, obj, pair);
  chain.sphere_bounds = screen.lower_bounds;
  chain.eliminated = screen.eliminated;
  chain.distance_bound_sq = 2.0 * chain.gap / (sigma_min_red * sigma_min_red);
  const Vector projected = orthogonal_project_dual(problem.A(), chain.nu_prime);
  chain.projection_gap =
      obj.value(problem.A() * chain.x_hat) + obj.conjugate_value(projected);
  return chain;
}

}  // namespace

SmallDemoReport run_small_demo() {
  const Matrix A = small_demo_matrix();
  const Vector b = small_demo_rhs();
  const ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  SmallDemoReport rep;
  rep.nu_strict = strict_feasible_lp(A, /*l1_rescale=*/true);
  const Vector At_ns = A.transpose() * rep.nu_strict.nu_strict;

  const double norm2 = spectral_norm(A, 1e-10);
  const SolverTrace trace = pgd_solve(problem, obj, Vector::Zero(A.cols()),
                                      1.0 / (norm2 * norm2), 250, {}, 250);
  const Vector x_full = trace.final_x();

  // certification evidence from the full-precision mask
  {
    const Vector nu_prime = obj.gradient(A * x_full);
    const Vector At_np = A.transpose() * nu_prime;
    const LineSearchResult ls =
        dual_line_search(At_np, At_ns, nu_prime, rep.nu_strict.nu_strict);
    const double gap =
        std::max(obj.value(A * x_full) + obj.conjugate_value(ls.nu_hat), 0.0);
    const PrimalDualPair pair{x_full, ls.nu_hat, gap};
    const ScreeningResult screen = sphere_screen(problem, obj, pair);
    rep.cert = certify_unique(problem, screen.eliminated);
    rep.cert.gap_at_certification = gap;
    if (rep.cert.unique)
      rep.cert.distance_bound =
          distance_bound(gap, rep.cert.reduced_min_singular_value);
    rep.A_red = reduce_problem(problem, screen.eliminated).first;
  }

  const double sigma_min = rep.cert.reduced_min_singular_value;
  rep.full = demo_chain(problem, obj, rep.nu_strict, At_ns, x_full, sigma_min);

  Vector x_rounded = x_full;
  for (Index i = 0; i < x_rounded.size(); ++i)
    x_rounded[i] = std::round(x_rounded[i] * 1e4) / 1e4;
  rep.rounded =
      demo_chain(problem, obj, rep.nu_strict, At_ns, std::move(x_rounded), sigma_min);

  // milestone scan: fixed LP anchor, screening every iteration
  RunConfig mc;
  mc.command = RunConfig::Command::repro_small;
  mc.max_iters = 350;
  mc.screen_every = 1;
  mc.nu_strict_strategy = RunConfig::NuStrictStrategy::lp;
  mc.l1_rescale_lp = true;
  mc.stop_on_certification = false;
  const ScreeningLoopResult loop = run_screening_loop(problem, obj, mc);
  rep.certified_at = loop.first_certified_iteration;
  rep.pstar_positive_at = loop.first_pstar_positive_iteration;
  return rep;
}

// ---- report serialization ----

namespace {

std::string fmt_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* command_name(RunConfig::Command c) {
  switch (c) {
    case RunConfig::Command::solve: return "solve";
    case RunConfig::Command::screen: return "screen";
    case RunConfig::Command::certify: return "certify";
    case RunConfig::Command::batch: return "batch";
    case RunConfig::Command::repro_small: return "repro-small";
    case RunConfig::Command::repro_synthetic: return "repro-synthetic";
  }
  return "?";
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j;
  j["command"] = command_name(config.command);
  j["solver"] = config.solver == RunConfig::Solver::pgd ? "pgd" : "accel";
  j["max_iters"] = config.max_iters;
  j["screen_every"] = config.screen_every;
  j["screen_method"] = to_string(config.screen_method);
  j["seed"] = config.seed;
  j["rank_tol"] = config.rank_tol;
  j["safety_margin"] = config.safety_margin;
  return j;
}

nlohmann::json mask_indices(const std::vector<bool>& mask) {
  nlohmann::json idx = nlohmann::json::array();
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) idx.push_back(i);
  return idx;
}

nlohmann::json curve_json(const std::vector<CheckpointRecord>& curve) {
  nlohmann::json rows = nlohmann::json::array();
  for (const CheckpointRecord& r : curve) {
    nlohmann::json row;
    row["iteration"] = r.iteration;
    row["gap"] = r.gap;
    row["eliminated"] = r.eliminated_count;
    row["certified"] = r.certified;
    if (std::isnan(r.distance_bound))
      row["distance_bound"] = nullptr;
    else
      row["distance_bound"] = r.distance_bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace

namespace {

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json matrix_json(const Matrix& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json chain_json(const SmallDemoChain& c) {
  nlohmann::json j;
  j["x_hat"] = vector_json(c.x_hat);
  j["nu_prime"] = vector_json(c.nu_prime);
  j["nu_hat"] = vector_json(c.nu_hat);
  j["t_star"] = c.t_star;
  j["gap"] = c.gap;
  j["sphere_bounds"] = vector_json(c.sphere_bounds);
  j["eliminated_indices"] = mask_indices(c.eliminated);
  j["distance_bound_sq"] = c.distance_bound_sq;
  j["projection_gap"] = c.projection_gap;
  return j;
}

}  // namespace

void write_small_demo_report(const SmallDemoReport& report,
                             const std::string& path) {
  nlohmann::json j;
  j["nu_strict"] = vector_json(report.nu_strict.nu_strict);
  j["nu_strict_method"] = to_string(report.nu_strict.method);
  j["full"] = chain_json(report.full);
  j["rounded"] = chain_json(report.rounded);
  j["A_red"] = matrix_json(report.A_red);
  j["cert"] = nlohmann::json::parse(report_to_json(report.cert));
  j["milestones"] = {
      {"certified_at", report.certified_at ? nlohmann::json(*report.certified_at)
                                           : nlohmann::json(nullptr)},
      {"pstar_positive_at",
       report.pstar_positive_at ? nlohmann::json(*report.pstar_positive_at)
                                : nlohmann::json(nullptr)}};
  write_text(path, j.dump(2) + "\n");
}

void write_report(const ScreeningLoopResult& result, const RunConfig& config,
                  const std::string& path, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::json j;
    j["config"] = config_json(config);
    j["iterations_run"] = result.trace.iterations_run;
    j["milestones"] = {
        {"certified_at", result.first_certified_iteration
                             ? nlohmann::json(*result.first_certified_iteration)
                             : nlohmann::json(nullptr)},
        {"pstar_positive_at",
         result.first_pstar_positive_iteration
             ? nlohmann::json(*result.first_pstar_positive_iteration)
             : nlohmann::json(nullptr)}};
    j["final"] = nlohmann::json::parse(report_to_json(result.report));
    j["eliminated_indices"] = mask_indices(result.final_mask);
    j["curve"] = curve_json(result.curve);
    write_text(path, j.dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  for (const CheckpointRecord& r : result.curve) {
    os << r.iteration << ',' << fmt_full(r.gap) << ',' << r.eliminated_count
       << ',' << (r.certified ? 1 : 0) << ',' << fmt_full(r.distance_bound)
       << '\n';
  }
  write_text(path, os.str());
}

void write_report(const BatchReport& report, const RunConfig& config,
                  const std::string& path, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::json j;
    j["config"] = config_json(config);
    j["certified_count"] = report.certified_count;
    j["eliminated_fraction"] = report.eliminated_fraction;
    nlohmann::json rows = nlohmann::json::array();
    for (const BatchCheckpoint& cp : report.checkpoints)
      rows.push_back({{"iteration", cp.iteration},
                      {"certified_count", cp.certified_count},
                      {"eliminated_fraction", cp.eliminated_fraction}});
    j["checkpoints"] = std::move(rows);
    nlohmann::json probs = nlohmann::json::array();
    for (size_t p = 0; p < report.problems.size(); ++p) {
      nlohmann::json entry =
          nlohmann::json::parse(report_to_json(report.problems[p]));
      if (p < report.final_masks.size())
        entry["eliminated_indices"] = mask_indices(report.final_masks[p]);
      probs.push_back(std::move(entry));
    }
    j["problems"] = std::move(probs);
    write_text(path, j.dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  for (const BatchCheckpoint& cp : report.checkpoints)
    os << cp.iteration << ',' << cp.certified_count << ','
       << fmt_full(cp.eliminated_fraction) << '\n';
  write_text(path, os.str());
}

}  // namespace sfe
