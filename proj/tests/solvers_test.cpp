#include <doctest.h>

#include "sfe/rng.hpp"
#include "sfe/solvers.hpp"

#include "oracles.hpp"
#include "test_instances.hpp"

#include <Eigen/SVD>
#include <cmath>

using namespace sfe;

namespace {

double svd_norm(const Matrix& A) {
  return Eigen::JacobiSVD<Matrix>(A).singularValues()[0];
}

double pgd_step_size(const Matrix& A) {
  return 1.0 / std::pow(spectral_norm(A), 2);
}

}  // namespace

TEST_CASE("spectral_norm matches dense SVD") {
  CHECK(spectral_norm(test::demo_matrix()) ==
        doctest::Approx(test::demo_spectral_norm).epsilon(1e-10));
  CHECK(spectral_norm(test::demo_matrix()) ==
        doctest::Approx(svd_norm(test::demo_matrix())).epsilon(1e-10));

  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    CounterRng rng(seed);
    const Matrix A = rng.normal_matrix(7, 11);
    CHECK(spectral_norm(A) == doctest::Approx(svd_norm(A)).epsilon(1e-8));
    const Matrix B = rng.normal_matrix(12, 4);
    CHECK(spectral_norm(B) == doctest::Approx(svd_norm(B)).epsilon(1e-8));
  }
}

TEST_CASE("spectral_norm restarts when the ones vector is orthogonal to the top eigenvector") {
  // A^T A * ones = 0 here, so the default start collapses immediately.
  Matrix A(2, 2);
  A << 1.0, -1.0, 1.0, -1.0;
  CHECK(spectral_norm(A) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("spectral_norm input validation") {
  CHECK_THROWS_AS(spectral_norm(Matrix::Zero(3, 3)), invalid_input);
  CHECK_THROWS_AS(spectral_norm(test::demo_matrix(), 0.0), invalid_input);
  CHECK_THROWS_AS(spectral_norm(test::demo_matrix(), -1e-8), invalid_input);
}

TEST_CASE("pgd_step fixes the optimum and validates inputs") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);
  const double t = pgd_step_size(A);

  // x* is a fixed point of the projected-gradient map for any valid step.
  const Vector x_star = test::demo_x_star();
  CHECK((pgd_step(problem, obj, x_star, t) - x_star).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((pgd_step(problem, obj, x_star, 0.3 * t) - x_star).lpNorm<Eigen::Infinity>() <= 1e-12);

  // A non-optimal point must move.
  const Vector x0 = Vector::Zero(A.cols());
  CHECK((pgd_step(problem, obj, x0, t) - x0).norm() > 1e-6);

  CHECK_THROWS_AS(pgd_step(problem, obj, x0, 0.0), invalid_input);
  CHECK_THROWS_AS(pgd_step(problem, obj, Vector::Zero(4), t), invalid_input);
}

TEST_CASE("pgd_solve descends monotonically to the enumeration optimum") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  const SolverTrace trace =
      pgd_solve(problem, obj, Vector::Zero(A.cols()), pgd_step_size(A), 2000);
  REQUIRE(trace.iterations_run == 2000);
  for (size_t k = 1; k < trace.objective_values.size(); ++k)
    CHECK(trace.objective_values[k] <= trace.objective_values[k - 1] + 1e-14);
  for (const Vector& x : trace.iterates) CHECK(x.minCoeff() >= 0.0);

  const oracle::EnumerationResult exact = oracle::nnls_by_enumeration(A, b);
  CHECK(trace.final_objective() == doctest::Approx(exact.objective).epsilon(1e-8));
  CHECK((trace.final_x() - exact.x).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("pgd_solve recording and callback semantics") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);
  const double t = pgd_step_size(A);

  SUBCASE("stride recording keeps x0, stride multiples, and the final iterate") {
    const SolverTrace trace =
        pgd_solve(problem, obj, Vector::Zero(A.cols()), t, 10, {}, 3);
    CHECK(trace.iterations_run == 10);
    CHECK(trace.record_stride == 3);
    // k = 0, 3, 6, 9, 10
    CHECK(trace.iterates.size() == 5);
    CHECK(trace.objective_values.size() == 5);
    CHECK(trace.iterates.front().isZero(0.0));
  }

  SUBCASE("callback sees 1-based iterations and can stop early") {
    std::vector<int> seen;
    const SolverTrace trace = pgd_solve(
        problem, obj, Vector::Zero(A.cols()), t, 100,
        [&](int k, const Vector& x) {
          seen.push_back(k);
          CHECK(x.minCoeff() >= 0.0);
          return k < 4;
        },
        3);
    CHECK(trace.iterations_run == 4);
    REQUIRE(seen.size() == 4);
    CHECK(seen.front() == 1);
    CHECK(seen.back() == 4);
    // records: k = 0, 3, and the early-stop iterate at k = 4
    CHECK(trace.iterates.size() == 3);
  }

  SUBCASE("zero iterations still records x0") {
    const SolverTrace trace = pgd_solve(problem, obj, Vector::Zero(A.cols()), t, 0);
    CHECK(trace.iterations_run == 0);
    CHECK(trace.iterates.size() == 1);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(pgd_solve(problem, obj, Vector::Constant(A.cols(), -1.0), t, 5),
                    invalid_input);
    CHECK_THROWS_AS(pgd_solve(problem, obj, Vector::Zero(A.cols()), t, 5, {}, 0),
                    invalid_input);
  }
}

TEST_CASE("pgd_solve reports divergence on an overlarge step") {
  // One mixed-sign row: the clamp cannot absorb the oscillation, so the
  // amplitude multiplies by ~t every iteration until it overflows.
  Matrix A(1, 2);
  A << 1.0, -1.0;
  const Vector b = Vector::Ones(1);
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);
  CHECK_THROWS_AS(pgd_solve(problem, obj, Vector::Zero(2), 1e3, 500), divergence_error);
}

TEST_CASE("accelerated_solve stays feasible and beats plain PGD at equal budgets") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  const SolverTrace accel = accelerated_solve(problem, obj, Vector::Zero(A.cols()), 250);
  const SolverTrace plain =
      pgd_solve(problem, obj, Vector::Zero(A.cols()), pgd_step_size(A), 250);
  CHECK(accel.iterations_run == 250);
  for (const Vector& x : accel.iterates) CHECK(x.minCoeff() >= 0.0);
  CHECK(accel.final_objective() <= plain.final_objective() + 1e-12);

  const oracle::EnumerationResult exact = oracle::nnls_by_enumeration(A, b);
  const SolverTrace long_run = accelerated_solve(problem, obj, Vector::Zero(A.cols()), 2000);
  CHECK(long_run.final_objective() >= exact.objective - 1e-12);
  CHECK(long_run.final_objective() - exact.objective <= 1e-7);
}

TEST_CASE("accelerated_solve on seeded instances tracks the active-set optimum") {
  for (std::uint64_t seed : {3, 7, 11}) {
    CounterRng rng(seed);
    const Matrix A = rng.normal_matrix(12, 8);
    Vector b(12);
    rng.fill_normals(b.data(), b.size());
    ProblemInstance problem(A, b);
    const SmoothObjective obj = make_nnls_objective(b);

    const SolverTrace accel = accelerated_solve(problem, obj, Vector::Zero(8), 300);
    const NnlsResult direct = active_set_nnls(A, b);
    const double f_star = obj.value(A * direct.x);
    CHECK(accel.final_objective() >= f_star - 1e-12);  // weak lower bound sanity
    CHECK(accel.final_objective() == doctest::Approx(f_star).epsilon(1e-6));
    for (const Vector& x : accel.iterates) CHECK(x.minCoeff() >= 0.0);
  }
}

TEST_CASE("accelerated_solve started at the optimum stays there") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);
  const double f_star = obj.value(A * test::demo_x_star());
  const SolverTrace trace = accelerated_solve(problem, obj, test::demo_x_star(), 100);
  CHECK(std::abs(trace.final_objective() - f_star) <= 1e-8);
}

TEST_CASE("acceleration dominates PGD on an ill-conditioned kernel instance") {
  const auto [A, B] = generate_synthetic(SyntheticKind::kernel, 100, 200, 1, 5);
  const Vector b = B.col(0);
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);
  const double t = pgd_step_size(A);
  const int budget = 20000;

  // reference optimum: the better of two long runs
  const SolverTrace long_a =
      accelerated_solve(problem, obj, Vector::Zero(200), budget, {}, {}, budget);
  const SolverTrace long_p =
      pgd_solve(problem, obj, Vector::Zero(200), t, budget, {}, budget);
  const double f_ref = std::min(long_a.final_objective(), long_p.final_objective());

  const auto iters_to_tol = [&](bool accelerated) {
    int hit = budget + 1;
    const IterCallback cb = [&](int k, const Vector& x) {
      if (obj.value(A * x) - f_ref <= 1e-6) {
        hit = k;
        return false;
      }
      return true;
    };
    if (accelerated)
      accelerated_solve(problem, obj, Vector::Zero(200), budget, {}, cb, budget);
    else
      pgd_solve(problem, obj, Vector::Zero(200), t, budget, cb, budget);
    return hit;
  };
  const int accel_iters = iters_to_tol(true);
  const int pgd_iters = iters_to_tol(false);
  CHECK(accel_iters <= budget);  // accel actually reaches the tolerance
  CHECK(accel_iters < pgd_iters);
}

TEST_CASE("accelerated_solve validation") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);
  CHECK_THROWS_AS(accelerated_solve(problem, obj, Vector::Constant(A.cols(), -0.5), 10),
                  invalid_input);
  CHECK_THROWS_AS(accelerated_solve(problem, obj, Vector::Zero(A.cols()), 10, {}, {}, 0),
                  invalid_input);
}

TEST_CASE("active_set_nnls agrees with support enumeration") {
  SUBCASE("bundled demo, exact rational solution") {
    const NnlsResult fit = active_set_nnls(test::demo_matrix(), test::demo_rhs());
    CHECK(fit.status == NnlsStatus::converged);
    CHECK((fit.x - test::demo_x_star()).lpNorm<Eigen::Infinity>() <= 1e-12);
    // exact zeros off-support, not merely small values
    CHECK(fit.x[0] == 0.0);
    CHECK(fit.x[1] == 0.0);
    CHECK(fit.x[3] == 0.0);
  }

  SUBCASE("seeded rectangular instances, both orientations") {
    struct Shape {
      Index m, n;
    };
    for (const Shape shape : {Shape{6, 10}, Shape{8, 6}, Shape{10, 12}}) {
      for (std::uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8}) {
        CounterRng rng(seed * 1000 + static_cast<std::uint64_t>(shape.n));
        const Matrix A = rng.normal_matrix(shape.m, shape.n);
        Vector b(shape.m);
        rng.fill_normals(b.data(), b.size());

        const NnlsResult fit = active_set_nnls(A, b);
        const oracle::EnumerationResult exact = oracle::nnls_by_enumeration(A, b);
        CHECK(fit.status == NnlsStatus::converged);
        CHECK(fit.x.minCoeff() >= 0.0);
        const double f_fit = 0.5 * (A * fit.x - b).squaredNorm();
        CHECK(f_fit == doctest::Approx(exact.objective).epsilon(1e-9));
        // the minimizer itself is only comparable when it is unique
        if (exact.unique) CHECK((fit.x - exact.x).lpNorm<Eigen::Infinity>() <= 1e-7);

        // KKT: multipliers nonpositive off-support, complementarity tight
        const Vector w = A.transpose() * (b - A * fit.x);
        for (Index i = 0; i < shape.n; ++i) {
          if (fit.x[i] > 0.0)
            CHECK(std::abs(w[i]) <= 1e-8 * (1.0 + b.norm()));
          else
            CHECK(w[i] <= 1e-8 * (1.0 + b.norm()));
        }
      }
    }
  }

  SUBCASE("zero right-hand side returns zero immediately") {
    const NnlsResult fit = active_set_nnls(test::demo_matrix(), Vector::Zero(3));
    CHECK(fit.x.isZero(0.0));
    CHECK(fit.outer_iterations == 0);
    CHECK(fit.status == NnlsStatus::converged);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(active_set_nnls(test::demo_matrix(), Vector::Zero(4)), invalid_input);
  }
}
