#pragma once

#include "sfe/certify.hpp"
#include "sfe/core.hpp"
#include "sfe/dual.hpp"
#include "sfe/screening.hpp"
#include "sfe/solvers.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

// Experiment driver: the screening loop (solve + per-checkpoint dual point,
// gap, screen, certification attempt), the batched multi-RHS variant, seeded
// synthetic instance generators, and report serialization.

namespace sfe {

struct RunConfig {
  enum class Command { solve, screen, certify, batch, repro_small, repro_synthetic };
  enum class Solver { pgd, accel };
  enum class NuStrictStrategy { clip, ones, lp, auto_select };

  Command command = Command::certify;
  std::string matrix_path;
  std::string rhs_path;
  std::string report_path;
  Solver solver = Solver::pgd;
  int max_iters = 7500;
  int screen_every = 1;  // repro default; batch paths use 50
  ScreenMethod screen_method = ScreenMethod::sphere;
  NuStrictStrategy nu_strict_strategy = NuStrictStrategy::auto_select;
  std::uint64_t seed = 0;
  double rank_tol = 1e-10;
  double feas_tol = -1.0;       // < 0: instance default
  double safety_margin = 0.0;
  bool stop_on_certification = true;
  bool l1_rescale_lp = false;   // presentation convention of the small demo
  bool finish_with_active_set = false;  // hand batch stragglers to the direct solver
  bool keep_history = false;    // retain per-checkpoint masks and dual points

  void validate() const;
};

struct CheckpointRecord {
  int iteration = 0;
  double gap = 0.0;
  Index eliminated_count = 0;
  bool certified = false;
  double distance_bound = std::numeric_limits<double>::quiet_NaN();
  double t_star = 0.0;
  double dual_objective = 0.0;  // g(nu_hat)
};

struct ScreeningLoopResult {
  SolverTrace trace;
  std::vector<CheckpointRecord> curve;  // one row per screening checkpoint
  CertificationReport report;           // state at the last checkpoint
  std::vector<bool> final_mask;         // eliminated mask at the last checkpoint
  PrimalDualPair final_pair;
  std::optional<int> first_certified_iteration;
  std::optional<int> first_pstar_positive_iteration;  // first g(nu_hat) > 0
  StrictStrategy strategy_used = StrictStrategy::lp;  // last checkpoint's anchor
  // populated only when config.keep_history:
  std::vector<std::vector<bool>> mask_history;
  std::vector<Vector> nu_hat_history;
};

// Iterate with the configured solver; every screen_every iterations (and at
// the final one) build nu' = grad f(Ax), obtain nu_strict per the configured
// strategy (auto: clip -> ones -> lp, static anchors computed once), line
// search, gap, screen, and attempt certification. Stops early when certified
// if configured. max_iters = 0 evaluates a single checkpoint at x0.
ScreeningLoopResult run_screening_loop(const ProblemInstance& problem,
                                       const SmoothObjective& obj,
                                       const RunConfig& config);

struct BatchCheckpoint {
  int iteration = 0;
  Index certified_count = 0;        // cumulative
  double eliminated_fraction = 0.0; // over all problems and columns
};

struct BatchReport {
  std::vector<CertificationReport> problems;  // original column order
  Index certified_count = 0;
  double eliminated_fraction = 0.0;
  std::vector<BatchCheckpoint> checkpoints;
  std::vector<std::vector<bool>> final_masks;  // latest mask per problem
};

// Screening loop over many right-hand sides sharing one matrix. Gradient
// steps for all still-active problems are batched into matrix-matrix
// products with A and A^T; a problem leaves the batch once certified. Other
// configuration is honored as in run_screening_loop. Per-problem failures
// (e.g. no strict point) leave that problem inconclusive rather than
// aborting the batch.
BatchReport batch_certify(const Matrix& A, const Matrix& B, const RunConfig& config);

enum class SyntheticKind { gaussian, kernel };

// Deterministic synthetic instances (see rng.hpp for the fixed generator).
//  - gaussian: A and B standard normal, A filled first, column-major.
//  - kernel: A(i,j) = exp(-(s_i - t_j)^2 / sigma^2) on uniform [0,1] grids —
//    elementwise positive and severely ill-conditioned as n grows; B normal.
std::pair<Matrix, Matrix> generate_synthetic(SyntheticKind kind, Index m, Index n,
                                             Index k, std::uint64_t seed,
                                             double kernel_sigma = 0.2);

// The bundled 3x5 demo instance used by repro-small.
Matrix small_demo_matrix();
Vector small_demo_rhs();

// Full repro-small pipeline. Quantities are computed twice: once at full
// precision, and once re-deriving the dual chain from the 4-decimal rounded
// iterate (the convention the demo's reference values follow).
struct SmallDemoChain {
  Vector x_hat;
  Vector nu_prime;
  Vector nu_hat;
  double t_star = 0.0;
  double gap = 0.0;
  Vector sphere_bounds;
  std::vector<bool> eliminated;
  double distance_bound_sq = 0.0;
  double projection_gap = 0.0;  // gap using the orthogonally projected dual point
};

struct SmallDemoReport {
  StrictFeasibleCertificate nu_strict;  // LP anchor, l1-rescaled
  SmallDemoChain full;     // straight 250-iteration arithmetic
  SmallDemoChain rounded;  // dual chain restarted from the rounded iterate
  Matrix A_red;
  CertificationReport cert;             // from the full-precision mask
  std::optional<int> certified_at;      // first checkpoint with a uniqueness verdict
  std::optional<int> pstar_positive_at; // first checkpoint with g(nu_hat) > 0
};

SmallDemoReport run_small_demo();

// JSON serialization of the repro-small report: both chains, the reduced
// matrix (row-major nested arrays), the certification report, and the
// milestone iterations.
void write_small_demo_report(const SmallDemoReport& report,
                             const std::string& path);

enum class ReportFormat { json, csv };

// JSON: configuration echo, milestones, final certification report, curve.
// CSV: the per-checkpoint curve (iteration, gap, eliminated count, certified
// flag, distance bound), one row per checkpoint, no header.
void write_report(const ScreeningLoopResult& result, const RunConfig& config,
                  const std::string& path, ReportFormat format);

// JSON: aggregates, per-problem reports, checkpoint table. CSV: the
// checkpoint table (iteration, certified count, eliminated fraction).
void write_report(const BatchReport& report, const RunConfig& config,
                  const std::string& path, ReportFormat format);

}  // namespace sfe
