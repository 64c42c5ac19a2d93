#include "sfe/dual.hpp"

#include "sfe/solvers.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace sfe {

namespace {

// ---- minimal dense two-phase simplex, Bland's rule ----
//
// min c^T x  s.t.  E x = h, x >= 0, with h >= 0 on entry.
// Tableau method; row/column counts here are tiny (a few hundred), so the
// O(rows * cols) pivots are irrelevant next to the solver iterations.

constexpr double kPivotTol = 1e-11;
constexpr long kObjectiveRefresh = 256;

struct SimplexResult {
  bool feasible = false;
  bool bounded = true;
  double objective = 0.0;
  Vector x;
};

// Recompute the reduced-cost row from scratch: obj = c_full - sum of
// c_full[basic] * T.row(basic row). The incremental obj update inside the
// pivot loop accumulates round-off over long degenerate runs; by a few
// thousand pivots the noise can dwarf kPivotTol and fabricate entering
// columns, so the row is rebuilt periodically and before any verdict.
void refresh_objective(const Matrix& T, const Eigen::RowVectorXd& c_full,
                       const std::vector<Eigen::Index>& basis, Eigen::RowVectorXd& obj) {
  obj = c_full;
  for (Eigen::Index r = 0; r < T.rows(); ++r) {
    const double cb = c_full[basis[static_cast<size_t>(r)]];
    if (cb != 0.0) obj -= cb * T.row(r);
  }
}

// Rebuild the tableau from the original data and the current basis:
// T = B^{-1} T0 with B the basic columns of T0. Rank-one pivot updates decay
// in accuracy; reinverting before any verdict makes optimal / unbounded /
// infeasible decisions depend only on one well-posed solve, not on the whole
// pivot history.
void reinvert_tableau(const Matrix& T0, const std::vector<Eigen::Index>& basis, Matrix& T) {
  const Eigen::Index rows = T0.rows();
  Matrix B(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) B.col(r) = T0.col(basis[static_cast<size_t>(r)]);
  Eigen::FullPivLU<Matrix> lu(B);
  if (!lu.isInvertible())
    throw no_convergence("simplex: basis matrix numerically singular");
  T = lu.solve(T0);
}

// One Bland-rule phase on an existing tableau. T is rows x (cols + 1) with
// the RHS in the last column; T0 is the pristine copy of the initial
// tableau (for reinversion); c_full is the phase cost over every tableau
// column (zero in the RHS slot); obj receives reduced costs and, in its
// last entry, the negated objective value. basis[r] = variable of row r.
// limit_cols restricts entering variables (phase 2 must not re-enter
// artificials). Returns false if unbounded; both verdicts are confirmed on
// a freshly reinverted tableau before being returned.
bool run_phase(Matrix& T, const Matrix& T0, const Eigen::RowVectorXd& c_full,
               Eigen::RowVectorXd& obj, std::vector<Eigen::Index>& basis,
               Eigen::Index limit_cols) {
  const Eigen::Index rows = T.rows();
  const auto find_entering = [&]() -> Eigen::Index {
    for (Eigen::Index j = 0; j < limit_cols; ++j)
      if (obj[j] < -kPivotTol) return j;  // Bland: first improving column
    return -1;
  };

  refresh_objective(T, c_full, basis, obj);
  bool fresh_basis = false;  // true while no pivot has followed a reinversion
  for (long iters = 0;; ++iters) {
    if (iters > 100000)
      throw no_convergence("simplex: pivot limit exceeded");
    if (iters > 0 && iters % kObjectiveRefresh == 0)
      refresh_objective(T, c_full, basis, obj);

    Eigen::Index enter = find_entering();
    if (enter < 0) {
      refresh_objective(T, c_full, basis, obj);  // don't trust a stale row
      enter = find_entering();
      if (enter < 0 && !fresh_basis) {
        reinvert_tableau(T0, basis, T);
        refresh_objective(T, c_full, basis, obj);
        fresh_basis = true;
        enter = find_entering();
      }
      if (enter < 0) return true;  // optimal, on a reinverted tableau
    }

    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (T(r, enter) > kPivotTol) {
        const double ratio = T(r, T.cols() - 1) / T(r, enter);
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && basis[static_cast<size_t>(r)] <
                                                          basis[static_cast<size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) {
      if (fresh_basis) return false;  // unbounded, on a reinverted tableau
      reinvert_tableau(T0, basis, T);
      refresh_objective(T, c_full, basis, obj);
      fresh_basis = true;
      continue;
    }

    // pivot
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index r = 0; r < rows; ++r)
      if (r != leave && T(r, enter) != 0.0) T.row(r) -= T(r, enter) * T.row(leave);
    if (obj[enter] != 0.0) obj -= obj[enter] * T.row(leave);
    basis[static_cast<size_t>(leave)] = enter;
    fresh_basis = false;
  }
}

SimplexResult simplex_solve(const Matrix& E, const Vector& h, const Vector& c) {
  const Eigen::Index rows = E.rows();
  const Eigen::Index n_struct = E.cols();

  // Crash basis: a structural column that is exactly a unit vector (the
  // caller's slack block) can start basic at value h[row] >= 0, so only the
  // remaining rows need artificial variables. Fewer artificials means a far
  // shorter, far less degenerate phase 1.
  std::vector<Eigen::Index> basis(static_cast<size_t>(rows), -1);
  for (Eigen::Index j = 0; j < n_struct; ++j) {
    Eigen::Index unit_row = -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double v = E(r, j);
      if (v == 0.0) continue;
      if (v == 1.0 && unit_row < 0) {
        unit_row = r;
      } else {
        unit_row = -1;
        break;
      }
    }
    if (unit_row >= 0 && basis[static_cast<size_t>(unit_row)] < 0)
      basis[static_cast<size_t>(unit_row)] = j;
  }
  Eigen::Index n_art = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    if (basis[static_cast<size_t>(r)] < 0) ++n_art;

  const Eigen::Index total = n_struct + n_art;  // structural + artificial
  Matrix T(rows, total + 1);
  T.leftCols(n_struct) = E;
  T.middleCols(n_struct, n_art).setZero();
  Eigen::Index next_art = n_struct;
  for (Eigen::Index r = 0; r < rows; ++r)
    if (basis[static_cast<size_t>(r)] < 0) {
      T(r, next_art) = 1.0;
      basis[static_cast<size_t>(r)] = next_art++;
    }
  T.col(total) = h;
  Matrix T0 = T;  // pristine copy for reinversion

  // phase 1: minimize sum of artificials
  Eigen::RowVectorXd c_phase1 = Eigen::RowVectorXd::Zero(total + 1);
  c_phase1.segment(n_struct, n_art).setOnes();
  Eigen::RowVectorXd obj(total + 1);

  SimplexResult result;
  if (!run_phase(T, T0, c_phase1, obj, basis, total)) return result;  // cannot happen: phase 1 is bounded
  if (-obj[total] > 1e-8) return result;                              // infeasible

  // drive leftover artificials out of the basis; drop redundant rows
  std::vector<Eigen::Index> keep_rows;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (basis[static_cast<size_t>(r)] < n_struct) {
      keep_rows.push_back(r);
      continue;
    }
    Eigen::Index piv = -1;
    for (Eigen::Index j = 0; j < n_struct; ++j)
      if (std::abs(T(r, j)) > kPivotTol) {
        piv = j;
        break;
      }
    if (piv < 0) continue;  // redundant constraint
    T.row(r) /= T(r, piv);
    for (Eigen::Index r2 = 0; r2 < rows; ++r2)
      if (r2 != r && T(r2, piv) != 0.0) T.row(r2) -= T(r2, piv) * T.row(r);
    basis[static_cast<size_t>(r)] = piv;
    keep_rows.push_back(r);
  }
  if (static_cast<Eigen::Index>(keep_rows.size()) < rows) {
    Matrix T2(static_cast<Eigen::Index>(keep_rows.size()), T.cols());
    Matrix T02(T2.rows(), T.cols());
    std::vector<Eigen::Index> basis2;
    for (size_t k = 0; k < keep_rows.size(); ++k) {
      T2.row(static_cast<Eigen::Index>(k)) = T.row(keep_rows[k]);
      T02.row(static_cast<Eigen::Index>(k)) = T0.row(keep_rows[k]);
      basis2.push_back(basis[static_cast<size_t>(keep_rows[k])]);
    }
    T = std::move(T2);
    T0 = std::move(T02);
    basis = std::move(basis2);
  }

  // phase 2: original objective, artificials barred from entering
  Eigen::RowVectorXd c_phase2 = Eigen::RowVectorXd::Zero(total + 1);
  c_phase2.head(n_struct) = c.transpose();
  if (!run_phase(T, T0, c_phase2, obj, basis, n_struct)) {
    result.feasible = true;
    result.bounded = false;
    return result;
  }

  result.feasible = true;
  result.objective = -obj[total];
  result.x = Vector::Zero(n_struct);
  for (Eigen::Index r = 0; r < T.rows(); ++r)
    if (basis[static_cast<size_t>(r)] < n_struct)
      result.x[basis[static_cast<size_t>(r)]] = T(r, T.cols() - 1);
  return result;
}

}  // namespace

const char* to_string(StrictStrategy s) {
  switch (s) {
    case StrictStrategy::lp: return "lp";
    case StrictStrategy::ones: return "ones";
    case StrictStrategy::clip: return "clip";
  }
  return "?";
}

Vector grad_dual_candidate(const ProblemInstance& problem,
                           const SmoothObjective& obj, const Vector& x_hat) {
  if (x_hat.size() != problem.cols())
    throw invalid_input("grad_dual_candidate: x_hat has wrong length");
  return obj.gradient(problem.A() * x_hat);
}

double line_search_coefficient(double lambda, double lambda0) {
  if (!(lambda0 > 0.0)) {
    std::ostringstream os;
    os << "line_search_coefficient: anchor value " << lambda0
       << " is not strictly positive (pathological segment)";
    throw strictness_violation(os.str());
  }
  if (lambda >= 0.0) return 0.0;
  return lambda / (lambda - lambda0);
}

LineSearchResult dual_line_search(const Vector& At_nu_prime,
                                  const Vector& At_nu_strict,
                                  const Vector& nu_prime,
                                  const Vector& nu_strict) {
  if (At_nu_prime.size() != At_nu_strict.size() || nu_prime.size() != nu_strict.size())
    throw invalid_input("dual_line_search: mismatched vector lengths");
  Index worst;
  if (At_nu_strict.minCoeff(&worst) <= 0.0) {
    std::ostringstream os;
    os << "dual_line_search: nu_strict is not strictly feasible, (A^T nu)[" << worst
       << "] = " << At_nu_strict[worst];
    throw strictness_violation(os.str());
  }
  double t_star = 0.0;
  for (Index i = 0; i < At_nu_prime.size(); ++i)
    t_star = std::max(t_star, line_search_coefficient(At_nu_prime[i], At_nu_strict[i]));
  LineSearchResult out;
  out.t_star = t_star;
  out.nu_hat = (1.0 - t_star) * nu_prime + t_star * nu_strict;
  return out;
}

StrictFeasibleCertificate strict_feasible_lp(const Matrix& A, bool l1_rescale,
                                             double tol_strict) {
  const Index m = A.rows();
  const Index n = A.cols();
  // variables: p (m), q (m), r, s, slack u (n); v = p - q, t = r - s.
  // A^T v - t 1 >= 0 is written as -A^T v + t 1 + u = 0 so that the slack
  // block is +I and the simplex can crash-start from it; only the
  // normalization row then needs an artificial variable.
  const Index nv = 2 * m + 2 + n;
  Matrix E = Matrix::Zero(n + 1, nv);
  E.block(0, 0, n, m) = -A.transpose();
  E.block(0, m, n, m) = A.transpose();
  E.col(2 * m).segment(0, n).setConstant(1.0);       // +t from r
  E.col(2 * m + 1).segment(0, n).setConstant(-1.0);  // -t from s
  E.block(0, 2 * m + 2, n, n) = Matrix::Identity(n, n);
  const Vector col_ones_A = A * Vector::Ones(n);  // 1^T A^T nu = (A 1)^T nu
  E.block(n, 0, 1, m) = col_ones_A.transpose();
  E.block(n, m, 1, m) = -col_ones_A.transpose();

  Vector h = Vector::Zero(n + 1);
  h[n] = 1.0;
  Vector c = Vector::Zero(nv);
  c[2 * m] = -1.0;  // max t
  c[2 * m + 1] = 1.0;

  const SimplexResult lp = simplex_solve(E, h, c);
  if (!lp.feasible)
    throw no_strict_point(
        "strict_feasible_lp: normalization plane infeasible (A has no strictly "
        "dual feasible point)");
  if (!lp.bounded)
    throw no_convergence(
        "strict_feasible_lp: simplex reported the provably bounded margin LP "
        "unbounded; numerical breakdown on badly conditioned data");
  const double t_opt = -lp.objective;
  if (t_opt <= tol_strict) {
    std::ostringstream os;
    os << "strict_feasible_lp: best achievable margin " << t_opt
       << " <= " << tol_strict << "; no strictly dual feasible point";
    throw no_strict_point(os.str());
  }

  StrictFeasibleCertificate cert;
  cert.method = StrictStrategy::lp;
  cert.nu_strict = lp.x.segment(0, m) - lp.x.segment(m, m);
  if (l1_rescale) cert.nu_strict /= cert.nu_strict.lpNorm<1>();
  cert.margin = (A.transpose() * cert.nu_strict).minCoeff();
  if (cert.margin <= 0.0)
    throw no_strict_point("strict_feasible_lp: recomputed margin not positive");
  return cert;
}

StrictFeasibleCertificate strict_feasible_ones(const Matrix& A) {
  Index worst;
  const Vector col_sums = A.colwise().sum();
  const double margin = col_sums.minCoeff(&worst);
  if (margin <= 0.0) {
    std::ostringstream os;
    os << "strict_feasible_ones: column " << worst << " sums to " << col_sums[worst]
       << " <= 0";
    throw condition_failed(os.str());
  }
  StrictFeasibleCertificate cert;
  cert.method = StrictStrategy::ones;
  cert.nu_strict = Vector::Ones(A.rows());
  cert.margin = margin;
  return cert;
}

StrictFeasibleCertificate strict_feasible_clip(const Matrix& A,
                                               const Vector& nu_prime) {
  if (nu_prime.size() != A.rows())
    throw invalid_input("strict_feasible_clip: nu_prime has wrong length");
  StrictFeasibleCertificate cert;
  cert.method = StrictStrategy::clip;
  cert.nu_strict = nu_prime.cwiseMax(0.0);
  Index worst;
  cert.margin = (A.transpose() * cert.nu_strict).minCoeff(&worst);
  if (cert.margin <= 0.0) {
    std::ostringstream os;
    os << "strict_feasible_clip: clipped point not strictly feasible, (A^T nu)["
       << worst << "] = " << cert.margin;
    throw condition_failed(os.str());
  }
  return cert;
}

StrictFeasibleCertificate strict_feasible_auto(const Matrix& A,
                                               const Vector& nu_prime) {
  try {
    return strict_feasible_clip(A, nu_prime);
  } catch (const condition_failed&) {
  }
  try {
    return strict_feasible_ones(A);
  } catch (const condition_failed&) {
  }
  return strict_feasible_lp(A);
}

Vector orthogonal_project_dual(const Matrix& A, const Vector& nu_prime) {
  if (nu_prime.size() != A.rows())
    throw invalid_input("orthogonal_project_dual: nu_prime has wrong length");
  // Moreau: the polar of {nu : A^T nu >= 0} is -cone(A), so the projection
  // is nu' + A w* with w* the NNLS fit of A w to -nu'.
  const NnlsResult inner = active_set_nnls(A, -nu_prime);
  return nu_prime + A * inner.x;
}

}  // namespace sfe
