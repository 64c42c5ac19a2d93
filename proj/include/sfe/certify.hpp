#pragma once

#include "sfe/core.hpp"

#include <optional>
#include <string>
#include <vector>

// Uniqueness certification. Two routes:
//  - safe_reduction: enough columns eliminated that the reduced problem is
//    overdetermined with full numerical column rank -> strongly convex ->
//    unique, and the distance bound applies.
//  - glp_positive_optimum: every min(m,n)-column submatrix independent (GLP)
//    together with p* > 0 (certified via g(nu_hat) > 0 by weak duality).

namespace sfe {

enum class CertMethod { safe_reduction, glp_positive_optimum, inconclusive };

const char* to_string(CertMethod m);

struct CertificationReport {
  bool unique = false;
  CertMethod method = CertMethod::inconclusive;
  Index eliminated_count = 0;          // r
  Index reduced_rows = 0;              // m
  Index reduced_cols = 0;              // n - r
  double reduced_min_singular_value = 0.0;
  std::optional<double> distance_bound;  // on ||x_hat - x*||, not its square
  double gap_at_certification = 0.0;
  std::optional<int> iterations_at_certification;
  bool p_star_positive = false;           // weak-duality certificate g(nu_hat) > 0
  std::optional<Index> support_size_bound; // <= m - 1 nonzeros when GLP + p* > 0
};

// JSON document for the report (schema: verdict, method, r, shapes,
// sigma_min, distance_bound, gap, iterations). report_from_json inverts it.
std::string report_to_json(const CertificationReport& report);
CertificationReport report_from_json(const std::string& text);

// Columns with eliminated[i] = false, in original order, plus the map from
// reduced column position back to the original index.
std::pair<Matrix, std::vector<Index>> reduce_problem(
    const ProblemInstance& problem, const std::vector<bool>& eliminated);

// safe_reduction verdict: unique iff n - r <= m and
// sigma_min(A_red) > rank_tol * sigma_max(A_red) (dense SVD). All columns
// eliminated certifies x* = 0 trivially. Inconclusive is a valid outcome,
// not an error.
CertificationReport certify_unique(const ProblemInstance& problem,
                                   const std::vector<bool>& eliminated,
                                   double rank_tol = 1e-10);

// sqrt(2 gap) / sigma_min_red, the bound on ||x_hat - x*|| from strong
// convexity of the reduced objective (the squared form bounds
// ||x_hat - x*||^2 by 2 gap / sigma_min_red^2).
double distance_bound(double gap, double sigma_min_red);

// True iff every subset of min(m,n) columns is numerically independent
// (sigma_min > glp_tol * sigma_max per submatrix). Exhaustive scan; throws
// intractable_error when C(n, min(m,n)) exceeds 1e6 subsets.
bool glp_check(const Matrix& A, double glp_tol = 1e-10);

struct CoherenceReport {
  double mu = 0.0;           // max_{i != j} |<a_i,a_j>| / (||a_i|| ||a_j||)
  double spark_bound = 0.0;  // spark > 1/mu; +inf when mu = 0 (vacuous)
  std::optional<Index> spark_ge;  // integerized: spark >= 1 + floor(1/mu)
};

CoherenceReport coherence(const ProblemInstance& problem);

// Requires m < n (the underdetermined case the lemma addresses). If
// g(nu_hat) > 0 then p* > 0 by weak duality; with GLP known this certifies
// uniqueness and a support of at most m - 1 nonzeros. Without GLP the
// verdict stays inconclusive but the p*-positivity certificate is recorded.
CertificationReport certify_positive_optimum(const ProblemInstance& problem,
                                             const SmoothObjective& obj,
                                             const Vector& nu_hat,
                                             bool glp_known);

struct ComplementarityReport {
  std::vector<Index> support;             // x*_i > tol
  std::vector<Index> eliminable;          // x*_i <= tol and <a_i, nu*> > tol
  std::vector<Index> strictness_failures; // both <= tol: no test can remove these
};

// Partition of the columns at an optimal pair. Validates the sign and
// complementarity conditions computable from the arguments (stationarity of
// (x*, nu*) is the caller's obligation; A is not among the arguments).
ComplementarityReport strict_complementarity_report(const Vector& x_star,
                                                    const Vector& nu_star,
                                                    const Vector& At_nu_star,
                                                    double tol);

}  // namespace sfe
