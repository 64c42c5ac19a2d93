#include "sfe/certify.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sfe {

const char* to_string(CertMethod m) {
  switch (m) {
    case CertMethod::safe_reduction: return "safe_reduction";
    case CertMethod::glp_positive_optimum: return "glp_positive_optimum";
    case CertMethod::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string report_to_json(const CertificationReport& report) {
  nlohmann::json j;
  j["verdict"] = report.unique;
  j["method"] = to_string(report.method);
  j["eliminated_count"] = report.eliminated_count;
  j["reduced_shape"] = {report.reduced_rows, report.reduced_cols};
  j["sigma_min"] = report.reduced_min_singular_value;
  if (report.distance_bound)
    j["distance_bound"] = *report.distance_bound;
  else
    j["distance_bound"] = nullptr;
  j["gap"] = report.gap_at_certification;
  if (report.iterations_at_certification)
    j["iterations"] = *report.iterations_at_certification;
  else
    j["iterations"] = nullptr;
  j["p_star_positive"] = report.p_star_positive;
  if (report.support_size_bound) j["support_size_bound"] = *report.support_size_bound;
  return j.dump();
}

CertificationReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CertificationReport rep;
  rep.unique = j.at("verdict").get<bool>();
  const std::string method = j.at("method").get<std::string>();
  if (method == "safe_reduction")
    rep.method = CertMethod::safe_reduction;
  else if (method == "glp_positive_optimum")
    rep.method = CertMethod::glp_positive_optimum;
  else if (method == "inconclusive")
    rep.method = CertMethod::inconclusive;
  else
    throw invalid_input("report_from_json: unknown method '" + method + "'");
  rep.eliminated_count = j.at("eliminated_count").get<Index>();
  rep.reduced_rows = j.at("reduced_shape").at(0).get<Index>();
  rep.reduced_cols = j.at("reduced_shape").at(1).get<Index>();
  // nlohmann serializes non-finite doubles as null
  rep.reduced_min_singular_value =
      j.at("sigma_min").is_null() ? std::numeric_limits<double>::infinity()
                                  : j.at("sigma_min").get<double>();
  if (!j.at("distance_bound").is_null())
    rep.distance_bound = j.at("distance_bound").get<double>();
  rep.gap_at_certification = j.at("gap").get<double>();
  if (!j.at("iterations").is_null())
    rep.iterations_at_certification = j.at("iterations").get<int>();
  rep.p_star_positive = j.at("p_star_positive").get<bool>();
  if (j.contains("support_size_bound"))
    rep.support_size_bound = j.at("support_size_bound").get<Index>();
  return rep;
}

std::pair<Matrix, std::vector<Index>> reduce_problem(
    const ProblemInstance& problem, const std::vector<bool>& eliminated) {
  if (static_cast<Index>(eliminated.size()) != problem.cols())
    throw invalid_input("reduce_problem: mask length does not match column count");
  std::vector<Index> index_map;
  for (Index i = 0; i < problem.cols(); ++i)
    if (!eliminated[static_cast<size_t>(i)]) index_map.push_back(i);
  Matrix A_red(problem.rows(), static_cast<Index>(index_map.size()));
  for (size_t c = 0; c < index_map.size(); ++c)
    A_red.col(static_cast<Index>(c)) = problem.A().col(index_map[c]);
  return {std::move(A_red), std::move(index_map)};
}

CertificationReport certify_unique(const ProblemInstance& problem,
                                   const std::vector<bool>& eliminated,
                                   double rank_tol) {
  CertificationReport rep;
  auto [A_red, index_map] = reduce_problem(problem, eliminated);
  rep.eliminated_count = problem.cols() - static_cast<Index>(index_map.size());
  rep.reduced_rows = problem.rows();
  rep.reduced_cols = A_red.cols();

  if (A_red.cols() == 0) {  // every column removed: x* = 0 is the solution
    rep.unique = true;
    rep.method = CertMethod::safe_reduction;
    rep.reduced_min_singular_value = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (A_red.cols() > problem.rows()) return rep;  // still underdetermined

  const Eigen::JacobiSVD<Matrix> svd(A_red);
  const auto& sv = svd.singularValues();
  rep.reduced_min_singular_value = sv[sv.size() - 1];
  if (rep.reduced_min_singular_value > rank_tol * sv[0]) {
    rep.unique = true;
    rep.method = CertMethod::safe_reduction;
  }
  return rep;
}

double distance_bound(double gap, double sigma_min_red) {
  if (!(sigma_min_red > 0.0))
    throw invalid_input("distance_bound: sigma_min must be positive");
  if (gap < 0.0) throw invalid_input("distance_bound: negative gap");
  return std::sqrt(2.0 * gap) / sigma_min_red;
}

bool glp_check(const Matrix& A, double glp_tol) {
  const Index m = A.rows();
  const Index n = A.cols();
  const Index k = std::min(m, n);

  double subsets = 1.0;  // C(n, k), checked against the tractability guard
  for (Index i = 0; i < k; ++i) {
    subsets *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (subsets > 1e6) {
      std::ostringstream os;
      os << "glp_check: C(" << n << ", " << k << ") exceeds 1e6 subsets";
      throw intractable_error(os.str());
    }
  }

  std::vector<Index> idx(static_cast<size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  Matrix sub(m, k);
  while (true) {
    for (Index c = 0; c < k; ++c) sub.col(c) = A.col(idx[static_cast<size_t>(c)]);
    const Eigen::JacobiSVD<Matrix> svd(sub);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > glp_tol * sv[0])) return false;

    // next k-combination of {0, ..., n-1}
    Index pos = k - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
    for (Index c = pos + 1; c < k; ++c)
      idx[static_cast<size_t>(c)] = idx[static_cast<size_t>(c - 1)] + 1;
  }
  return true;
}

CoherenceReport coherence(const ProblemInstance& problem) {
  if (problem.cols() < 2) throw invalid_input("coherence: need at least two columns");
  const Vector& norms = problem.column_norms();
  for (Index i = 0; i < norms.size(); ++i)
    if (norms[i] == 0.0) {
      std::ostringstream os;
      os << "coherence: column " << i << " is zero";
      throw invalid_input(os.str());
    }
  const Matrix& G = problem.gram();
  CoherenceReport rep;
  for (Index j = 0; j < problem.cols(); ++j)
    for (Index i = j + 1; i < problem.cols(); ++i)
      rep.mu = std::max(rep.mu, std::abs(G(i, j)) / (norms[i] * norms[j]));
  if (rep.mu == 0.0) {
    rep.spark_bound = std::numeric_limits<double>::infinity();
  } else {
    rep.spark_bound = 1.0 / rep.mu;
    rep.spark_ge = 1 + static_cast<Index>(std::floor(rep.spark_bound));
  }
  return rep;
}

CertificationReport certify_positive_optimum(const ProblemInstance& problem,
                                             const SmoothObjective& obj,
                                             const Vector& nu_hat,
                                             bool glp_known) {
  if (problem.rows() >= problem.cols())
    throw invalid_input(
        "certify_positive_optimum: requires an underdetermined problem (m < n)");
  if (nu_hat.size() != problem.rows())
    throw invalid_input("certify_positive_optimum: nu_hat has wrong length");

  CertificationReport rep;
  rep.reduced_rows = problem.rows();
  rep.reduced_cols = problem.cols();
  const double g_val = obj.dual_value(nu_hat);
  rep.gap_at_certification = g_val;  // here: the certified lower bound on p*
  if (g_val > 0.0) {
    rep.p_star_positive = true;  // p* >= g(nu_hat) > 0 by weak duality
    if (glp_known) {
      rep.unique = true;
      rep.method = CertMethod::glp_positive_optimum;
      rep.support_size_bound = problem.rows() - 1;
    }
  }
  return rep;
}

ComplementarityReport strict_complementarity_report(const Vector& x_star,
                                                    const Vector& nu_star,
                                                    const Vector& At_nu_star,
                                                    double tol) {
  if (x_star.size() != At_nu_star.size())
    throw invalid_input("strict_complementarity_report: length mismatch");
  if (nu_star.size() == 0)
    throw invalid_input("strict_complementarity_report: empty nu_star");
  // validate what the arguments allow: sign conditions and complementarity
  if (x_star.minCoeff() < -tol)
    throw invalid_input("strict_complementarity_report: x_star not feasible at tol");
  if (At_nu_star.minCoeff() < -tol)
    throw invalid_input("strict_complementarity_report: nu_star not feasible at tol");
  const double comp = (x_star.array() * At_nu_star.array()).abs().maxCoeff();
  const double scale = 1.0 + x_star.cwiseAbs().maxCoeff() * At_nu_star.cwiseAbs().maxCoeff();
  if (comp > tol * scale)
    throw invalid_input(
        "strict_complementarity_report: pair violates complementary slackness");

  ComplementarityReport rep;
  for (Index i = 0; i < x_star.size(); ++i) {
    if (x_star[i] > tol)
      rep.support.push_back(i);
    else if (At_nu_star[i] > tol)
      rep.eliminable.push_back(i);
    else
      rep.strictness_failures.push_back(i);
  }
  return rep;
}

}  // namespace sfe
