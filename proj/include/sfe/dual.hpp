#pragma once

#include "sfe/core.hpp"

namespace sfe {

// Where a strictly dual feasible point came from.
enum class StrictStrategy { lp, ones, clip };

const char* to_string(StrictStrategy s);

struct StrictFeasibleCertificate {
  Vector nu_strict;
  double margin = 0.0;  // min(A^T nu_strict), always > 0
  StrictStrategy method = StrictStrategy::lp;
};

// nu' = grad f(A x_hat). Dual feasible when x_hat is optimal, generally not
// otherwise; feed it to the line search or the projection below.
Vector grad_dual_candidate(const ProblemInstance& problem,
                           const SmoothObjective& obj, const Vector& x_hat);

// t(lambda; lambda0) = 0 for lambda >= 0, lambda / (lambda - lambda0)
// otherwise. Continuous, with values in [0, 1). lambda0 must be > 0, else
// the segment endpoint is not strictly feasible and the search breaks down.
double line_search_coefficient(double lambda, double lambda0);

struct LineSearchResult {
  Vector nu_hat;
  double t_star = 0.0;
};

// Nearest feasible point to nu' on the segment [nu', nu_strict]:
// t* = max_i t(a_i^T nu'; a_i^T nu_strict). The caller supplies both
// matrix-vector products so they can be amortized (each costs one gradient).
LineSearchResult dual_line_search(const Vector& At_nu_prime,
                                  const Vector& At_nu_strict,
                                  const Vector& nu_prime,
                                  const Vector& nu_strict);

// max t s.t. A^T nu >= t*1, 1^T A^T nu = 1, solved by a self-contained dense
// two-phase simplex (Bland's rule). Throws no_strict_point when the optimum
// is <= tol_strict or the normalization plane is infeasible (A*1 = 0).
// l1_rescale divides the vertex by its 1-norm (presentation convention used
// by the small worked example); the margin is recomputed after rescaling.
StrictFeasibleCertificate strict_feasible_lp(const Matrix& A,
                                             bool l1_rescale = false,
                                             double tol_strict = 1e-9);

// nu = 1. Valid iff every column sum of A is positive (A^T 1 stacks column
// sums); covers elementwise-positive A. Throws condition_failed otherwise.
StrictFeasibleCertificate strict_feasible_ones(const Matrix& A);

// nu = max(0, nu'). Cheap and effective for elementwise-positive A; validity
// is always verified by computing min(A^T nu). Throws condition_failed when
// the clipped point is not strictly feasible.
StrictFeasibleCertificate strict_feasible_clip(const Matrix& A,
                                               const Vector& nu_prime);

// clip -> ones -> lp, cheapest first.
StrictFeasibleCertificate strict_feasible_auto(const Matrix& A,
                                               const Vector& nu_prime);

// Euclidean projection of nu' onto {nu : A^T nu >= 0} via the Moreau
// decomposition: nu_hat = nu' + A w*, w* = argmin_{w>=0} ||nu' + A w||^2
// (an NNLS solve against -nu'). Exact up to the inner solver tolerance.
Vector orthogonal_project_dual(const Matrix& A, const Vector& nu_prime);

}  // namespace sfe
