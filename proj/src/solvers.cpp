#include "sfe/solvers.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace sfe {

double spectral_norm(const Matrix& A, double tol) {
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0)
    throw invalid_input("spectral_norm: zero matrix");
  if (tol <= 0) throw invalid_input("spectral_norm: tol must be positive");

  const Index n = A.cols();
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  // Guard against the start vector being orthogonal to the top eigenvector:
  // if A^T A v collapses, restart from a fixed alternating-sign vector.
  Vector w = A.transpose() * (A * v);
  if (w.norm() <= 1e-14 * A.squaredNorm()) {
    for (Index i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
    v /= v.norm();
    w = A.transpose() * (A * v);
  }

  double lambda = 0.0;  // estimate of ||A||_2^2
  const int max_iters = 20000;
  for (int k = 0; k < max_iters; ++k) {
    const double wn = w.norm();
    if (wn == 0.0) break;  // exact eigenvector of 0; lambda already settled
    v = w / wn;
    w.noalias() = A.transpose() * (A * v);
    const double next = v.dot(w);  // Rayleigh quotient
    if (std::abs(next - lambda) <= 0.01 * tol * std::max(next, 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

Vector pgd_step(const ProblemInstance& problem, const SmoothObjective& obj,
                const Vector& x, double t) {
  if (t <= 0) throw invalid_input("pgd_step: step size must be positive");
  if (x.size() != problem.cols()) throw invalid_input("pgd_step: x has wrong length");
  const Vector grad = obj.gradient(problem.A() * x);
  return (x - t * (problem.A().transpose() * grad)).cwiseMax(0.0);
}

namespace {

void record(SolverTrace& trace, const SmoothObjective& obj, const Matrix& A,
            const Vector& x) {
  trace.iterates.push_back(x);
  trace.objective_values.push_back(obj.value(A * x));
}

void check_finite(const Vector& x, int iter) {
  if (!x.allFinite()) {
    std::ostringstream os;
    os << "solver diverged: non-finite iterate at iteration " << iter;
    throw divergence_error(os.str());
  }
}

}  // namespace

SolverTrace pgd_solve(const ProblemInstance& problem, const SmoothObjective& obj,
                      Vector x0, double t, int max_iters,
                      const IterCallback& callback, int record_stride) {
  if (x0.minCoeff() < 0) throw invalid_input("pgd_solve: x0 must be nonnegative");
  if (record_stride < 1) throw invalid_input("pgd_solve: record_stride must be >= 1");

  SolverTrace trace;
  trace.step_size = t;
  trace.record_stride = record_stride;
  record(trace, obj, problem.A(), x0);

  Vector x = std::move(x0);
  int k = 0;
  for (; k < max_iters;) {
    x = pgd_step(problem, obj, x, t);
    ++k;
    check_finite(x, k);
    const bool keep_going = callback ? callback(k, x) : true;
    if (k % record_stride == 0 || k == max_iters || !keep_going)
      record(trace, obj, problem.A(), x);
    if (!keep_going) break;
  }
  trace.iterations_run = k;
  return trace;
}

SolverTrace accelerated_solve(const ProblemInstance& problem,
                              const SmoothObjective& obj, Vector x0,
                              int max_iters, const AccelOptions& options,
                              const IterCallback& callback, int record_stride) {
  if (x0.minCoeff() < 0) throw invalid_input("accelerated_solve: x0 must be nonnegative");
  if (record_stride < 1)
    throw invalid_input("accelerated_solve: record_stride must be >= 1");

  double t = options.initial_step > 0
                 ? options.initial_step
                 : 1.0 / std::pow(spectral_norm(problem.A(), 1e-10), 2);
  const double t_min = t * 0x1.0p-60;

  SolverTrace trace;
  trace.step_size = t;
  trace.record_stride = record_stride;
  record(trace, obj, problem.A(), x0);

  Vector x = x0;
  Vector z = std::move(x0);
  double theta = 1.0;

  int k = 0;
  for (; k < max_iters;) {
    if (k > 0) theta = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (theta * theta)));

    Vector y, gy, z_next, x_next;
    double fy = 0.0, fx_next = 0.0;
    while (true) {
      y = (1.0 - theta) * x + theta * z;
      const Vector Ay = problem.A() * y;
      fy = obj.value(Ay);
      gy.noalias() = problem.A().transpose() * obj.gradient(Ay);
      z_next = (z - (t / theta) * gy).cwiseMax(0.0);
      x_next = (1.0 - theta) * x + theta * z_next;
      fx_next = obj.value(problem.A() * x_next);
      const Vector d = x_next - y;
      if (fx_next <= fy + gy.dot(d) + d.squaredNorm() / (2.0 * t) +
                         1e-12 * (1.0 + std::abs(fy)))
        break;
      t *= options.backtrack_shrink;
      if (t < t_min)
        throw no_convergence("accelerated_solve: backtracking step underflow");
    }

    ++k;
    check_finite(x_next, k);
    if (options.adaptive_restart && gy.dot(x_next - x) > 0.0) {
      z = x_next;   // restart the momentum sequence at the new point
      theta = 1.0;
    } else {
      z = std::move(z_next);
    }
    x = std::move(x_next);
    t *= options.step_grow;

    const bool keep_going = callback ? callback(k, x) : true;
    if (k % record_stride == 0 || k == max_iters || !keep_going)
      record(trace, obj, problem.A(), x);
    if (!keep_going) break;
  }
  trace.iterations_run = k;
  return trace;
}

NnlsResult active_set_nnls(const Matrix& A, const Vector& b, double tol) {
  if (b.size() != A.rows()) throw invalid_input("active_set_nnls: b has wrong length");
  const Index n = A.cols();
  const double w_tol = tol * (1.0 + (A.transpose() * b).cwiseAbs().maxCoeff());
  const int max_outer = 10 * static_cast<int>(n);

  Vector x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<size_t>(n), false);
  std::vector<Index> pset;  // passive indices in insertion order

  auto solve_passive = [&](Vector& z_out) {
    Matrix Ap(A.rows(), static_cast<Index>(pset.size()));
    for (size_t c = 0; c < pset.size(); ++c) Ap.col(static_cast<Index>(c)) = A.col(pset[c]);
    Eigen::ColPivHouseholderQR<Matrix> qr(Ap);
    if (qr.rank() < Ap.cols())
      throw numerical_rank_error(
          "active_set_nnls: rank-deficient passive-set least-squares subproblem");
    z_out = qr.solve(b);
  };

  Vector w = A.transpose() * b;  // -gradient at x = 0
  NnlsResult result;
  for (int outer = 0; outer < max_outer; ++outer) {
    // pick the most violating active coordinate
    Index j = -1;
    double wmax = w_tol;
    for (Index i = 0; i < n; ++i)
      if (!passive[static_cast<size_t>(i)] && w[i] > wmax) {
        wmax = w[i];
        j = i;
      }
    if (j < 0) {  // all active multipliers within tolerance: done
      result.x = std::move(x);
      result.outer_iterations = outer;
      result.status = NnlsStatus::converged;
      return result;
    }
    passive[static_cast<size_t>(j)] = true;
    pset.push_back(j);

    // inner loop: restore x_P > 0 by stepping back and shrinking P
    bool inner_done = false;
    for (int inner = 0; inner <= static_cast<int>(n) + 1 && !inner_done; ++inner) {
      Vector z;
      solve_passive(z);
      if (z.size() == 0 || z.minCoeff() > 0.0) {
        x.setZero();
        for (size_t c = 0; c < pset.size(); ++c) x[pset[c]] = z[static_cast<Index>(c)];
        inner_done = true;
        break;
      }
      // largest feasible step toward z; remember which index binds
      double alpha = 1.0;
      Index binding = -1;
      for (size_t c = 0; c < pset.size(); ++c) {
        const double zc = z[static_cast<Index>(c)];
        if (zc <= 0.0) {
          const double xc = x[pset[c]];
          const double step = xc / (xc - zc);
          if (step < alpha) {
            alpha = step;
            binding = pset[c];
          }
        }
      }
      double x_max = 0.0;
      for (size_t c = 0; c < pset.size(); ++c) {
        const Index i = pset[c];
        x[i] += alpha * (z[static_cast<Index>(c)] - x[i]);
        x_max = std::max(x_max, x[i]);
      }
      // drop everything the step drove to the boundary (roundoff-tolerant),
      // always including the binding index itself
      std::vector<Index> kept;
      for (Index i : pset) {
        if (i == binding || x[i] <= 1e-14 * x_max) {
          x[i] = 0.0;
          passive[static_cast<size_t>(i)] = false;
        } else {
          kept.push_back(i);
        }
      }
      if (kept.size() == pset.size())
        throw no_convergence("active_set_nnls: inner loop failed to shrink passive set");
      pset = std::move(kept);
    }
    if (!inner_done)
      throw no_convergence("active_set_nnls: inner iteration limit");
    w.noalias() = A.transpose() * (b - A * x);
  }
  throw no_convergence("active_set_nnls: exceeded 10n active-set iterations");
}

}  // namespace sfe
