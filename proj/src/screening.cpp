#include "sfe/screening.hpp"

#include <cmath>
#include <limits>

namespace sfe {

const char* to_string(ScreenMethod m) {
  return m == ScreenMethod::sphere ? "sphere" : "dome";
}

Index ScreeningResult::eliminated_count() const {
  Index count = 0;
  for (bool e : eliminated) count += e;
  return count;
}

double sphere_bound(double ai_dot_nu_hat, double norm_ai, double r) {
  return ai_dot_nu_hat - r * norm_ai;
}

namespace {

double clamped_radius(const SmoothObjective& obj, double gap) {
  return std::sqrt(2.0 * obj.lipschitz * std::max(gap, 0.0));
}

ScreeningResult finalize(Vector bounds, double r, ScreenMethod method,
                         double safety_margin) {
  ScreeningResult out;
  out.eliminated.resize(static_cast<size_t>(bounds.size()));
  for (Index i = 0; i < bounds.size(); ++i)
    out.eliminated[static_cast<size_t>(i)] = bounds[i] > safety_margin;
  out.lower_bounds = std::move(bounds);
  out.radius = r;
  out.method = method;
  return out;
}

// Boundary-circle value deflated by a forward-error allowance. A column that
// is positively collinear with the halfspace generator (itself, or a
// duplicate) has an exact-arithmetic value of 0: the halfspace clamps it
// precisely at the elimination threshold, where bare rounding residue
// (~eps * |a_i' nu_hat|) would decide the sign and could disqualify a
// genuinely active column. A few ulps of the participating terms buy safety
// and are negligible against any real elimination margin.
double circle_floor(double ai_dot_nu_hat, double r, double travel) {
  const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(ai_dot_nu_hat) + r * std::abs(travel));
  return ai_dot_nu_hat - r * travel - slack;
}

}  // namespace

ScreeningResult sphere_screen(const ProblemInstance& problem,
                              const SmoothObjective& obj,
                              const PrimalDualPair& pair, double safety_margin) {
  if (pair.nu_hat.size() != problem.rows())
    throw invalid_input("sphere_screen: nu_hat has wrong length");
  const double r = clamped_radius(obj, pair.gap);
  const Vector At_nu = problem.A().transpose() * pair.nu_hat;
  Vector bounds = At_nu - r * problem.column_norms();
  return finalize(std::move(bounds), r, ScreenMethod::sphere, safety_margin);
}

double dome_bound(double ai_dot_nu_hat, double aj_dot_nu_hat, double gram_ij,
                  double norm_ai, double norm_aj, double r, bool* degenerate) {
  if (degenerate) *degenerate = false;
  const double sphere = ai_dot_nu_hat - r * norm_ai;
  if (r <= 0.0 || norm_ai == 0.0) return sphere;
  if (norm_aj == 0.0) return sphere;  // vacuous halfspace

  const double beta = aj_dot_nu_hat / (r * norm_aj);
  if (beta < -1.0) {
    // ball and halfspace disjoint; can only be roundoff when the pair is
    // genuinely feasible, so answer conservatively
    if (degenerate) *degenerate = true;
    return sphere;
  }
  if (beta >= 1.0) return sphere;  // ball inside halfspace

  const double cos_ij = gram_ij / (norm_ai * norm_aj);
  if (cos_ij <= beta) return sphere;  // ball minimizer satisfies the halfspace

  // halfspace active: minimize over the boundary circle. The circle value
  // can only dip below the sphere value through its error allowance, so the
  // sphere bound remains a valid floor.
  const double cg = gram_ij / norm_aj;  // component of a_i along a_j
  const double cperp = std::sqrt(std::max(norm_ai * norm_ai - cg * cg, 0.0));
  const double travel = beta * cg + std::sqrt(1.0 - beta * beta) * cperp;
  return std::max(sphere, circle_floor(ai_dot_nu_hat, r, travel));
}

double dome_bound(const ProblemInstance& problem, Index i, Index j,
                  const Vector& At_nu_hat, double r, bool* degenerate) {
  if (!problem.gram_ready())
    throw precondition_error("dome_bound: Gram cache not built (call gram() first)");
  if (i == j) {
    // self-constraint: the halfspace is <a_i, nu> >= 0, so the minimum is the
    // sphere value clamped at zero — exactly, not via the cancellation-prone
    // circle formula
    if (degenerate) *degenerate = false;
    const double norm_ai = problem.column_norms()[i];
    const double sphere = At_nu_hat[i] - r * norm_ai;
    if (r <= 0.0 || norm_ai == 0.0) return sphere;
    if (At_nu_hat[i] < -r * norm_ai) {  // beta < -1: infeasible center, empty dome
      if (degenerate) *degenerate = true;
      return sphere;
    }
    return std::max(sphere, 0.0);
  }
  return dome_bound(At_nu_hat[i], At_nu_hat[j], problem.gram()(i, j),
                    problem.column_norms()[i], problem.column_norms()[j], r,
                    degenerate);
}

ScreeningResult dome_screen(const ProblemInstance& problem,
                            const SmoothObjective& obj,
                            const PrimalDualPair& pair, double safety_margin) {
  if (pair.nu_hat.size() != problem.rows())
    throw invalid_input("dome_screen: nu_hat has wrong length");
  if (!problem.gram_ready())
    throw precondition_error("dome_screen: Gram cache not built (call gram() first)");

  const double r = clamped_radius(obj, pair.gap);
  const Vector At_nu = problem.A().transpose() * pair.nu_hat;
  const Matrix& G = problem.gram();
  const Vector& norms = problem.column_norms();
  const Index n = problem.cols();

  Vector bounds(n);
  for (Index i = 0; i < n; ++i)
    bounds[i] = sphere_bound(At_nu[i], norms[i], r);
  if (r > 0.0) {
    for (Index j = 0; j < n; ++j) {
      if (norms[j] == 0.0) continue;
      const double beta = At_nu[j] / (r * norms[j]);
      if (beta < -1.0 || beta >= 1.0) continue;  // degenerate or never active
      const double srt = std::sqrt(1.0 - beta * beta);
      for (Index i = 0; i < n; ++i) {
        if (norms[i] == 0.0) continue;
        if (i == j) {  // self-constraint clamps at zero exactly
          if (bounds[i] < 0.0) bounds[i] = 0.0;
          continue;
        }
        const double cos_ij = G(i, j) / (norms[i] * norms[j]);
        if (cos_ij <= beta) continue;
        const double cg = G(i, j) / norms[j];
        const double cperp = std::sqrt(std::max(norms[i] * norms[i] - cg * cg, 0.0));
        const double val = circle_floor(At_nu[i], r, beta * cg + srt * cperp);
        if (val > bounds[i]) bounds[i] = val;
      }
    }
  }
  return finalize(std::move(bounds), r, ScreenMethod::dome, safety_margin);
}

double elimination_threshold(const ProblemInstance& problem,
                             const SmoothObjective& obj, const Vector& nu_hat,
                             const std::vector<Index>& index_set) {
  if (index_set.empty())
    throw invalid_input("elimination_threshold: empty index set");
  if (nu_hat.size() != problem.rows())
    throw invalid_input("elimination_threshold: nu_hat has wrong length");
  const Vector At_nu = problem.A().transpose() * nu_hat;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (Index i : index_set) {
    if (i < 0 || i >= problem.cols())
      throw invalid_input("elimination_threshold: index out of range");
    const double norm_ai = problem.column_norms()[i];
    if (norm_ai == 0.0) return 0.0;
    min_ratio = std::min(min_ratio, At_nu[i] / norm_ai);
  }
  if (min_ratio <= 0.0) return 0.0;  // nothing guaranteed
  return min_ratio / std::sqrt(2.0 * obj.lipschitz);
}

}  // namespace sfe
