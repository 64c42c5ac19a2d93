#pragma once

#include "sfe/core.hpp"

#include <vector>

namespace sfe {

// ||A||_2 by power iteration on A^T A from the normalized all-ones vector
// (deterministic start so downstream step sizes, and therefore iteration
// counts, reproduce exactly). Relative tolerance tol on the Rayleigh
// quotient. Throws invalid_input on a zero matrix.
double spectral_norm(const Matrix& A, double tol = 1e-10);

// One projected-gradient step: max(0, x - t * A^T grad f(Ax)).
Vector pgd_step(const ProblemInstance& problem, const SmoothObjective& obj,
                const Vector& x, double t);

struct SolverTrace {
  std::vector<Vector> iterates;         // recorded every record_stride steps
  std::vector<double> objective_values; // f(A x) per recorded iterate
  double step_size = 0.0;
  int iterations_run = 0;
  int record_stride = 1;

  const Vector& final_x() const { return iterates.back(); }
  double final_objective() const { return objective_values.back(); }
};

// Called after each iteration with (iteration index from 1, current x);
// return false to stop early.
using IterCallback = std::function<bool(int, const Vector&)>;

// Projected gradient descent from x0 (must be >= 0). The iterate at k = 0
// (x0 itself) and every record_stride-th iterate afterwards are recorded,
// as is the final one. Throws divergence_error if an iterate goes
// non-finite (step too large).
SolverTrace pgd_solve(const ProblemInstance& problem, const SmoothObjective& obj,
                      Vector x0, double t, int max_iters,
                      const IterCallback& callback = {}, int record_stride = 1);

struct AccelOptions {
  double initial_step = 0.0;     // <= 0: use 1 / ||A||^2
  double backtrack_shrink = 0.5; // step *= shrink on a failed line-search check
  double step_grow = 1.1;        // step *= grow after each accepted iteration
  bool adaptive_restart = true;  // gradient-based restart
};

// Accelerated first-order scheme (two-sequence variant) with backtracking
// line search and optional gradient-based adaptive restart. Iterates stay
// feasible; on the regression suite its final objective is <= PGD's after
// the same iteration count.
SolverTrace accelerated_solve(const ProblemInstance& problem,
                              const SmoothObjective& obj, Vector x0,
                              int max_iters, const AccelOptions& options = {},
                              const IterCallback& callback = {},
                              int record_stride = 1);

enum class NnlsStatus { converged, max_iterations };

struct NnlsResult {
  Vector x;
  int outer_iterations = 0;
  NnlsStatus status = NnlsStatus::converged;
};

// Active-set NNLS (passive-set growing scheme with inner step-back). The
// stopping tolerance is relative: the algorithm stops when
// max_i of -[A^T (Ax - b)]_i over the active set is <= tol * (1 + ||A^T b||_inf).
// Throws no_convergence after 10n active-set iterations and
// numerical_rank_error if a passive least-squares subproblem is singular.
NnlsResult active_set_nnls(const Matrix& A, const Vector& b, double tol = 1e-10);

}  // namespace sfe
