#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

// Core data model for min f(Ax) s.t. x >= 0 and its dual
// max g(nu) s.t. A^T nu >= 0, with g = -f*.

namespace sfe {

using Matrix = Eigen::MatrixXd;  // dense, column-major
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---- error taxonomy ----
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct feasibility_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct no_convergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct divergence_error : no_convergence {
  using no_convergence::no_convergence;
};
struct numerical_rank_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct strictness_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct no_strict_point : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct condition_failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::logic_error {
  using std::logic_error::logic_error;
};
struct intractable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smooth part of the objective: f, its gradient, its convex conjugate f*,
// and a Lipschitz constant of the gradient. The conjugate must be supplied
// in closed form; the dual objective used everywhere is g(nu) = -f*(nu),
// which is (1/L)-strongly concave.
struct SmoothObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<double(const Vector&)> conjugate_value;
  double lipschitz = 1.0;

  double dual_value(const Vector& nu) const { return -conjugate_value(nu); }
};

// f(z) = 1/2 ||z - b||^2, f*(nu) = 1/2 ||nu + b||^2 - 1/2 ||b||^2, L = 1.
SmoothObjective make_nnls_objective(Vector b);

// Immutable problem data: A, optional right-hand side b, cached column
// norms, and a lazily built Gram matrix A^T A (thread-safe single init).
class ProblemInstance {
 public:
  explicit ProblemInstance(Matrix A, std::optional<Vector> b = std::nullopt);

  const Matrix& A() const { return A_; }
  bool has_b() const { return b_.has_value(); }
  const Vector& b() const;
  Index rows() const { return A_.rows(); }
  Index cols() const { return A_.cols(); }
  const Vector& column_norms() const { return column_norms_; }

  // Builds A^T A on first call; subsequent calls return the cache.
  const Matrix& gram() const;
  bool gram_ready() const;

  // Default dual feasibility tolerance: 1e-10 * ||A||_1 * ||nu||_inf.
  double dual_feas_tol(const Vector& nu) const;

 private:
  struct GramCache {
    std::once_flag once;
    Matrix G;
    bool ready = false;
  };

  Matrix A_;
  std::optional<Vector> b_;
  Vector column_norms_;
  double norm_a1_;  // ||A||_1 (max column abs sum), for feasibility scales
  std::unique_ptr<GramCache> gram_;
};

// Validated primal-dual pair. gap = f(A x_hat) - g(nu_hat); tiny negative
// gaps (roundoff at near-optimality) are clamped to 0 so sqrt(gap) is safe.
struct PrimalDualPair {
  Vector x_hat;
  Vector nu_hat;
  double gap = 0.0;
};

// Checks feasibility of both points (throwing feasibility_error naming the
// worst violated constraint), clamps tiny negative x entries to zero, and
// computes the gap. feas_tol < 0 means "use the instance default".
PrimalDualPair make_primal_dual_pair(const ProblemInstance& problem,
                                     const SmoothObjective& obj,
                                     Vector x_hat, Vector nu_hat,
                                     double feas_tol = -1.0);

// epsilon = f(A x_hat) + f*(nu_hat). Throws feasibility_error on infeasible
// inputs (index and magnitude of the worst violation in the message).
double duality_gap(const ProblemInstance& problem, const SmoothObjective& obj,
                   const Vector& x_hat, const Vector& nu_hat,
                   double feas_tol = -1.0);

// Residuals of the four optimality conditions at (x, nu).
struct KktReport {
  double stationarity = 0.0;       // ||A^T grad f(Ax) - A^T nu||_inf
  double primal_feasibility = 0.0; // min_i x_i
  double dual_feasibility = 0.0;   // min_i (A^T nu)_i
  double complementarity = 0.0;    // max_i |x_i (A^T nu)_i|
  bool verdict = false;            // all residuals within tol
};

KktReport check_kkt(const ProblemInstance& problem, const SmoothObjective& obj,
                    const Vector& x, const Vector& nu, double tol);

}  // namespace sfe
