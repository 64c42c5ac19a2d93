#include "sfe/core.hpp"

#include <cmath>
#include <sstream>

namespace sfe {

SmoothObjective make_nnls_objective(Vector b) {
  if (!b.allFinite()) throw invalid_input("make_nnls_objective: b has non-finite entries");
  const double half_b2 = 0.5 * b.squaredNorm();
  SmoothObjective obj;
  obj.value = [b](const Vector& z) { return 0.5 * (z - b).squaredNorm(); };
  obj.gradient = [b](const Vector& z) { return Vector(z - b); };
  obj.conjugate_value = [b, half_b2](const Vector& nu) {
    return 0.5 * (nu + b).squaredNorm() - half_b2;
  };
  obj.lipschitz = 1.0;
  return obj;
}

ProblemInstance::ProblemInstance(Matrix A, std::optional<Vector> b)
    : A_(std::move(A)), b_(std::move(b)), gram_(std::make_unique<GramCache>()) {
  if (A_.rows() < 1 || A_.cols() < 1)
    throw invalid_input("ProblemInstance: A must be at least 1x1");
  if (!A_.allFinite()) throw invalid_input("ProblemInstance: A has non-finite entries");
  if (b_ && b_->size() != A_.rows())
    throw invalid_input("ProblemInstance: b length does not match rows of A");
  column_norms_ = A_.colwise().norm();
  norm_a1_ = A_.cwiseAbs().colwise().sum().maxCoeff();
}

const Vector& ProblemInstance::b() const {
  if (!b_) throw invalid_input("ProblemInstance: no right-hand side attached");
  return *b_;
}

const Matrix& ProblemInstance::gram() const {
  std::call_once(gram_->once, [this] {
    gram_->G.noalias() = A_.transpose() * A_;
    gram_->ready = true;
  });
  return gram_->G;
}

bool ProblemInstance::gram_ready() const { return gram_->ready; }

double ProblemInstance::dual_feas_tol(const Vector& nu) const {
  return 1e-10 * norm_a1_ * nu.cwiseAbs().maxCoeff();
}

namespace {

void check_dims(const ProblemInstance& p, const Vector& x, const Vector& nu,
                const char* where) {
  if (x.size() != p.cols() || nu.size() != p.rows()) {
    std::ostringstream os;
    os << where << ": dimension mismatch (x " << x.size() << " vs n " << p.cols()
       << ", nu " << nu.size() << " vs m " << p.rows() << ")";
    throw invalid_input(os.str());
  }
}

}  // namespace

double duality_gap(const ProblemInstance& problem, const SmoothObjective& obj,
                   const Vector& x_hat, const Vector& nu_hat, double feas_tol) {
  check_dims(problem, x_hat, nu_hat, "duality_gap");

  const double x_scale = x_hat.size() ? x_hat.cwiseAbs().maxCoeff() : 0.0;
  const double x_tol = 1e-12 * x_scale;
  Index worst;
  if (x_hat.size() && x_hat.minCoeff(&worst) < -x_tol) {
    std::ostringstream os;
    os << "duality_gap: x_hat infeasible, x[" << worst << "] = " << x_hat[worst]
       << " < -" << x_tol;
    throw feasibility_error(os.str());
  }

  const Vector At_nu = problem.A().transpose() * nu_hat;
  const double d_tol = feas_tol >= 0 ? feas_tol : problem.dual_feas_tol(nu_hat);
  if (At_nu.minCoeff(&worst) < -d_tol) {
    std::ostringstream os;
    os << "duality_gap: nu_hat infeasible, (A^T nu)[" << worst
       << "] = " << At_nu[worst] << " < -" << d_tol;
    throw feasibility_error(os.str());
  }

  return obj.value(problem.A() * x_hat) + obj.conjugate_value(nu_hat);
}

PrimalDualPair make_primal_dual_pair(const ProblemInstance& problem,
                                     const SmoothObjective& obj, Vector x_hat,
                                     Vector nu_hat, double feas_tol) {
  check_dims(problem, x_hat, nu_hat, "make_primal_dual_pair");
  const double x_scale = x_hat.size() ? x_hat.cwiseAbs().maxCoeff() : 0.0;
  const double x_tol = 1e-12 * x_scale;
  for (Index i = 0; i < x_hat.size(); ++i) {
    if (x_hat[i] < 0.0) {
      if (x_hat[i] < -x_tol) {
        std::ostringstream os;
        os << "make_primal_dual_pair: x_hat[" << i << "] = " << x_hat[i]
           << " below -" << x_tol;
        throw feasibility_error(os.str());
      }
      x_hat[i] = 0.0;  // clamp roundoff-negative entries
    }
  }

  PrimalDualPair pair;
  pair.gap = duality_gap(problem, obj, x_hat, nu_hat, feas_tol);
  const double gap_floor = -1e-10 * (1.0 + std::abs(obj.value(problem.A() * x_hat)));
  if (pair.gap < gap_floor) {
    std::ostringstream os;
    os << "make_primal_dual_pair: gap " << pair.gap
       << " below weak-duality floor " << gap_floor;
    throw feasibility_error(os.str());
  }
  if (pair.gap < 0.0) pair.gap = 0.0;  // roundoff near optimality
  pair.x_hat = std::move(x_hat);
  pair.nu_hat = std::move(nu_hat);
  return pair;
}

KktReport check_kkt(const ProblemInstance& problem, const SmoothObjective& obj,
                    const Vector& x, const Vector& nu, double tol) {
  check_dims(problem, x, nu, "check_kkt");
  KktReport rep;
  const Vector grad = obj.gradient(problem.A() * x);
  const Vector At_grad = problem.A().transpose() * grad;
  const Vector At_nu = problem.A().transpose() * nu;
  rep.stationarity = (At_grad - At_nu).cwiseAbs().maxCoeff();
  rep.primal_feasibility = x.minCoeff();
  rep.dual_feasibility = At_nu.minCoeff();
  rep.complementarity = (x.array() * At_nu.array()).abs().maxCoeff();
  rep.verdict = rep.stationarity <= tol && rep.primal_feasibility >= -tol &&
                rep.dual_feasibility >= -tol && rep.complementarity <= tol;
  return rep;
}

}  // namespace sfe
