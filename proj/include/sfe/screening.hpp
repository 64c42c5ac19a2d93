#pragma once

#include "sfe/core.hpp"

#include <vector>

// Safe feature elimination. The dual optimum lies in the ball
// ||nu - nu_hat||^2 <= 2 L eps (strong concavity of g), so any column whose
// inner product with nu* is provably positive over that ball — or over the
// ball cut by a dual halfspace (dome) — satisfies x*_i = 0 by complementary
// slackness and can be removed.

namespace sfe {

enum class ScreenMethod { sphere, dome };

const char* to_string(ScreenMethod m);

struct ScreeningResult {
  Vector lower_bounds;           // per-column lower bound on <a_i, nu*>
  std::vector<bool> eliminated;  // lower_bounds[i] > 0 (strict)
  double radius = 0.0;           // sqrt(2 L eps)
  ScreenMethod method = ScreenMethod::sphere;

  Index eliminated_count() const;
};

// min of <a_i, nu> over the ball of radius r centered at nu_hat:
// <a_i, nu_hat> - r ||a_i||.
double sphere_bound(double ai_dot_nu_hat, double norm_ai, double r);

// Safety margin: eliminate on bound > margin (default 0; any strictly
// positive exact-arithmetic bound is already a valid certificate).
ScreeningResult sphere_screen(const ProblemInstance& problem,
                              const SmoothObjective& obj,
                              const PrimalDualPair& pair,
                              double safety_margin = 0.0);

// min of <a_i, nu> over the dome {||nu - nu_hat|| <= r} ∩ {<a_j, nu> >= 0},
// written in terms of the precomputed scalars. Three regimes: the ball
// minimizer already satisfies the halfspace (sphere value); the halfspace is
// active (boundary-circle minimum); the dome is numerically empty (falls
// back to the sphere value and sets *degenerate — conservative, still safe).
double dome_bound(double ai_dot_nu_hat, double aj_dot_nu_hat, double gram_ij,
                  double norm_ai, double norm_aj, double r,
                  bool* degenerate = nullptr);

// Convenience overload reading the Gram cache of the instance.
double dome_bound(const ProblemInstance& problem, Index i, Index j,
                  const Vector& At_nu_hat, double r, bool* degenerate = nullptr);

// For each column i, the best dome bound over all halfspace choices j.
// Requires the Gram cache to have been built (problem.gram()); the O(n^2)
// scalar sweep is the whole cost once A^T nu_hat is available.
ScreeningResult dome_screen(const ProblemInstance& problem,
                            const SmoothObjective& obj,
                            const PrimalDualPair& pair,
                            double safety_margin = 0.0);

// Right-hand side of the guarantee
//   sqrt(eps) < (1/sqrt(2L)) min_{i in I} <a_i, nu_hat> / ||a_i||,
// under which sphere_screen eliminates every index in I.
double elimination_threshold(const ProblemInstance& problem,
                             const SmoothObjective& obj, const Vector& nu_hat,
                             const std::vector<Index>& index_set);

}  // namespace sfe
