#include <doctest.h>

#include "sfe/dual.hpp"
#include "sfe/rng.hpp"
#include "sfe/screening.hpp"
#include "sfe/solvers.hpp"

#include "oracles.hpp"
#include "test_instances.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace sfe;

namespace {

double pgd_step_size(const Matrix& A) {
  const double s = spectral_norm(A);
  return 1.0 / (s * s);
}

// Run x_hat -> nu' -> line search against the given anchor -> validated pair.
PrimalDualPair pair_from_anchor(const ProblemInstance& problem,
                                const SmoothObjective& obj, const Vector& x_hat,
                                const Vector& nu_strict) {
  const Vector nu_prime = grad_dual_candidate(problem, obj, x_hat);
  const LineSearchResult ls =
      dual_line_search(problem.A().transpose() * nu_prime,
                       problem.A().transpose() * nu_strict, nu_prime, nu_strict);
  return make_primal_dual_pair(problem, obj, x_hat, ls.nu_hat);
}

// Generic chain with the cheapest-first strict point selection.
PrimalDualPair chain_pair(const ProblemInstance& problem,
                          const SmoothObjective& obj, const Vector& x_hat) {
  const Vector nu_prime = grad_dual_candidate(problem, obj, x_hat);
  const StrictFeasibleCertificate anchor =
      strict_feasible_auto(problem.A(), nu_prime);
  return pair_from_anchor(problem, obj, x_hat, anchor.nu_strict);
}

// The worked example fixes its anchor to the l1-rescaled LP vertex; all its
// published certificate values depend on that convention.
PrimalDualPair demo_pair(const ProblemInstance& problem,
                         const SmoothObjective& obj, const Vector& x_hat) {
  const StrictFeasibleCertificate anchor =
      strict_feasible_lp(problem.A(), /*l1_rescale=*/true);
  return pair_from_anchor(problem, obj, x_hat, anchor.nu_strict);
}

}  // namespace

TEST_CASE("sphere_bound matches the ball oracle") {
  // hand value: <a, c> = 2, ||a|| = 5, r = 0.1  ->  2 - 0.5
  CHECK(sphere_bound(2.0, 5.0, 0.1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(sphere_bound(-3.0, 2.0, 0.0) == -3.0);  // zero radius: just the value

  CounterRng rng(4100);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector a = rng.normal_matrix(6, 1);
    const Vector center = rng.normal_matrix(6, 1);
    const double r = 0.1 + 2.0 * rng.uniform();
    const double got = sphere_bound(a.dot(center), a.norm(), r);
    const double want = oracle::ball_linear_min(a, center, r);
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("sphere_screen on the worked example") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  Vector x_hat(5);
  x_hat << 0.0, 0.0, 0.9282, 0.0, 0.5409;
  const PrimalDualPair pair = demo_pair(problem, obj, x_hat);

  // frozen gap of the printed-value continuation (the full-precision run's
  // gap is 0.00688; the published 0.0069 refers to that one)
  CHECK(pair.gap == doctest::Approx(0.006656528983514327).epsilon(1e-9));

  const ScreeningResult sc = sphere_screen(problem, obj, pair);
  CHECK(sc.method == ScreenMethod::sphere);
  CHECK(std::string(to_string(sc.method)) == "sphere");
  CHECK(sc.radius == doctest::Approx(std::sqrt(2.0 * pair.gap)).epsilon(1e-15));
  CHECK(sc.lower_bounds.size() == 5);

  const double frozen[5] = {-0.34085786094307724, 0.16997967159515692,
                            -0.48952532458139053, 0.2622135722355705,
                            -0.615225742258621};
  // reference row as displayed to 2 decimals; the worst entry sits 0.0052
  // from its printed value, so the display check allows one display ulp
  const double printed[5] = {-0.34, 0.17, -0.49, 0.26, -0.61};
  for (Index i = 0; i < 5; ++i) {
    CHECK(sc.lower_bounds[i] == doctest::Approx(frozen[i]).epsilon(1e-9));
    CHECK(std::abs(sc.lower_bounds[i] - printed[i]) < 0.01);
  }

  // columns 1 and 3 are the provably inactive ones
  REQUIRE(sc.eliminated.size() == 5);
  CHECK_FALSE(sc.eliminated[0]);
  CHECK(sc.eliminated[1]);
  CHECK_FALSE(sc.eliminated[2]);
  CHECK(sc.eliminated[3]);
  CHECK_FALSE(sc.eliminated[4]);
  CHECK(sc.eliminated_count() == 2);

  // safety against the exact solution: eliminated columns really are zero
  const Vector x_star = test::demo_x_star();
  for (Index i = 0; i < 5; ++i)
    if (sc.eliminated[static_cast<size_t>(i)]) CHECK(x_star[i] == 0.0);

  // bounds agree with the ball oracle column by column
  for (Index i = 0; i < 5; ++i) {
    const double want = oracle::ball_linear_min(A.col(i), pair.nu_hat, sc.radius);
    CHECK(sc.lower_bounds[i] == doctest::Approx(want).epsilon(1e-12));
  }

  Vector short_nu(2);
  short_nu << 1.0, 2.0;
  PrimalDualPair bad = pair;
  bad.nu_hat = short_nu;
  CHECK_THROWS_AS(sphere_screen(problem, obj, bad), invalid_input);
}

TEST_CASE("sphere_screen safety margin raises the elimination bar") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  Vector x_hat(5);
  x_hat << 0.0, 0.0, 0.9282, 0.0, 0.5409;
  const PrimalDualPair pair = demo_pair(problem, obj, x_hat);

  // bounds ~ [-0.35, 0.17, -0.50, 0.26, -0.63]: a margin between the two
  // positive bounds keeps column 1 and still eliminates column 3
  const ScreeningResult mid = sphere_screen(problem, obj, pair, 0.2);
  CHECK_FALSE(mid.eliminated[1]);
  CHECK(mid.eliminated[3]);
  CHECK(mid.eliminated_count() == 1);

  const ScreeningResult high = sphere_screen(problem, obj, pair, 1.0);
  CHECK(high.eliminated_count() == 0);

  // margin sits exactly on a bound: strict inequality keeps the column
  const ScreeningResult exact =
      sphere_screen(problem, obj, pair, mid.lower_bounds[3]);
  CHECK_FALSE(exact.eliminated[3]);
}

TEST_CASE("sphere_screen at an exact optimum has zero radius") {
  Matrix A(1, 1);
  A << 1.0;
  Vector b(1);
  b << 1.0;
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  Vector x(1), nu(1);
  x << 1.0;
  nu << 0.0;  // dual optimum: residual is zero
  const PrimalDualPair pair = make_primal_dual_pair(problem, obj, x, nu);
  CHECK(pair.gap == 0.0);

  const ScreeningResult sc = sphere_screen(problem, obj, pair);
  CHECK(sc.radius == 0.0);
  CHECK(sc.lower_bounds[0] == 0.0);
  CHECK_FALSE(sc.eliminated[0]);  // bound == margin is not enough

  // a manually-built pair with a roundoff-negative gap must not produce NaN
  PrimalDualPair tiny{x, nu, -1e-18};
  const ScreeningResult clamped = sphere_screen(problem, obj, tiny);
  CHECK(clamped.radius == 0.0);
  CHECK(std::isfinite(clamped.lower_bounds[0]));
}

TEST_CASE("dome_bound hand geometries in the plane") {
  bool degenerate = true;

  // ball minimizer already satisfies the halfspace: min x over the unit
  // disk cap {y >= 0} is attained at (-1, 0)
  CHECK(dome_bound(0.0, 0.0, 0.0, 1.0, 1.0, 1.0, &degenerate) == -1.0);
  CHECK_FALSE(degenerate);

  // halfspace active, minimizer on the boundary circle: min y over the cap
  // is 0 (a_i = a_j = e_y, so gram = 1)
  CHECK(dome_bound(0.0, 0.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.0));

  // a_i = (1, 1), a_j = e_y: constrained minimizer is (-1, 0), value -1,
  // versus an unconstrained sphere bound of -sqrt(2)
  const double diag = dome_bound(0.0, 0.0, 1.0, std::sqrt(2.0), 1.0, 1.0);
  CHECK(diag == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(diag > sphere_bound(0.0, std::sqrt(2.0), 1.0));

  // ball entirely inside the halfspace (beta >= 1): sphere bound exactly
  CHECK(dome_bound(0.2, 3.0, 0.5, 1.0, 1.0, 1.0, &degenerate) ==
        sphere_bound(0.2, 1.0, 1.0));
  CHECK_FALSE(degenerate);

  // ball and halfspace disjoint (beta < -1): conservative sphere fallback
  // with the degenerate flag raised
  CHECK(dome_bound(0.2, -3.0, 0.5, 1.0, 1.0, 1.0, &degenerate) ==
        sphere_bound(0.2, 1.0, 1.0));
  CHECK(degenerate);

  // zero radius, zero a_i, or vacuous halfspace: sphere value, no flag
  degenerate = true;
  CHECK(dome_bound(0.7, -5.0, 1.0, 2.0, 1.0, 0.0, &degenerate) == 0.7);
  CHECK_FALSE(degenerate);
  CHECK(dome_bound(0.0, 1.0, 0.0, 0.0, 1.0, 1.0) == 0.0);
  CHECK(dome_bound(0.5, 0.0, 0.0, 1.0, 0.0, 1.0) == -0.5);
}

TEST_CASE("dome_bound agrees with the projected-gradient oracle") {
  CounterRng rng(91000);
  int active_cases = 0;
  int sphere_cases = 0;
  int degenerate_cases = 0;
  const double radii[3] = {0.4, 1.0, 2.5};

  for (int trial = 0; trial < 36; ++trial) {
    const Vector a = rng.normal_matrix(5, 1);
    const Vector g = rng.normal_matrix(5, 1);
    const Vector center = 0.8 * rng.normal_matrix(5, 1);
    const double r = radii[trial % 3];

    const double beta = g.dot(center) / (r * g.norm());
    if (std::abs(beta + 1.0) < 1e-6) continue;  // existence boundary

    bool degenerate = false;
    const double got = dome_bound(a.dot(center), g.dot(center), a.dot(g),
                                  a.norm(), g.norm(), r, &degenerate);
    const auto want = oracle::dome_linear_min(a, g, center, r);

    if (beta < -1.0) {
      ++degenerate_cases;
      CHECK(degenerate);
      CHECK_FALSE(want.has_value());
      CHECK(got == sphere_bound(a.dot(center), a.norm(), r));
      continue;
    }

    CHECK_FALSE(degenerate);
    REQUIRE(want.has_value());
    CHECK(std::abs(got - *want) <= 1e-6 * (1.0 + std::abs(*want)));
    CHECK(got >= sphere_bound(a.dot(center), a.norm(), r) - 1e-12);

    const double cos_ij = a.dot(g) / (a.norm() * g.norm());
    if (beta < 1.0 && cos_ij > beta)
      ++active_cases;
    else
      ++sphere_cases;
  }

  // the draw must exercise every regime, not just the sphere fallback
  CHECK(active_cases >= 5);
  CHECK(sphere_cases >= 5);
  CHECK(degenerate_cases >= 1);
}

TEST_CASE("dome_bound problem overload requires the Gram cache") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  const SmoothObjective obj = make_nnls_objective(b);

  Vector nu_hat(3);
  nu_hat << 0.1, 0.05, 0.02;
  const Vector At_nu = A.transpose() * nu_hat;

  ProblemInstance cold(A, b);
  CHECK_THROWS_AS(dome_bound(cold, 0, 1, At_nu, 0.5), precondition_error);

  ProblemInstance warm(A, b);
  warm.gram();
  const double via_problem = dome_bound(warm, 0, 1, At_nu, 0.5);
  const double via_scalars =
      dome_bound(At_nu[0], At_nu[1], A.col(0).dot(A.col(1)), A.col(0).norm(),
                 A.col(1).norm(), 0.5);
  CHECK(via_problem == doctest::Approx(via_scalars).epsilon(1e-14));
}

TEST_CASE("dome_screen dominates sphere_screen and matches pairwise bounds") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  problem.gram();
  const SmoothObjective obj = make_nnls_objective(b);

  Vector x_hat(5);
  x_hat << 0.0, 0.0, 0.9282, 0.0, 0.5409;
  const PrimalDualPair pair = demo_pair(problem, obj, x_hat);

  const ScreeningResult sphere = sphere_screen(problem, obj, pair);
  const ScreeningResult dome = dome_screen(problem, obj, pair);
  CHECK(dome.method == ScreenMethod::dome);
  CHECK(std::string(to_string(dome.method)) == "dome");
  CHECK(dome.radius == sphere.radius);

  const Vector At_nu = A.transpose() * pair.nu_hat;
  for (Index i = 0; i < 5; ++i) {
    // never weaker than the sphere bound
    CHECK(dome.lower_bounds[i] >= sphere.lower_bounds[i] - 1e-14);
    // equals the best single-halfspace refinement over all columns j
    double best = sphere.lower_bounds[i];
    for (Index j = 0; j < 5; ++j) {
      const double v = dome_bound(problem, i, j, At_nu, dome.radius);
      if (v > best) best = v;
    }
    CHECK(dome.lower_bounds[i] == doctest::Approx(best).epsilon(1e-14));
    // every eliminated column stays eliminated under the sharper bound
    if (sphere.eliminated[static_cast<size_t>(i)])
      CHECK(dome.eliminated[static_cast<size_t>(i)]);
  }
  CHECK(dome.eliminated_count() >= sphere.eliminated_count());

  // the dome refinement is still safe at the exact solution
  const Vector x_star = test::demo_x_star();
  for (Index i = 0; i < 5; ++i)
    if (dome.eliminated[static_cast<size_t>(i)]) CHECK(x_star[i] == 0.0);

  ProblemInstance cold(A, b);
  CHECK_THROWS_AS(dome_screen(cold, obj, pair), precondition_error);
  Vector short_nu(2);
  short_nu << 1.0, 2.0;
  PrimalDualPair bad = pair;
  bad.nu_hat = short_nu;
  CHECK_THROWS_AS(dome_screen(problem, obj, bad), invalid_input);
}

TEST_CASE("screening keeps columns of zeros and stays finite") {
  Matrix A(3, 4);
  A << 1.0, 0.0, -1.0, 2.0,
       2.0, 0.0,  1.0, 1.0,
       0.5, 0.0,  3.0, 1.0;
  Vector b(3);
  b << 1.0, 2.0, 1.5;
  ProblemInstance problem(A, b);
  problem.gram();
  const SmoothObjective obj = make_nnls_objective(b);

  // a zero column rules out any strictly feasible dual point, so the pair
  // comes from the projection instead of the line search
  Vector x0 = Vector::Zero(4);
  const SolverTrace trace =
      pgd_solve(problem, obj, x0, pgd_step_size(A), 200);
  const Vector nu_prime = grad_dual_candidate(problem, obj, trace.final_x());
  const Vector nu_hat = orthogonal_project_dual(A, nu_prime);
  const PrimalDualPair pair =
      make_primal_dual_pair(problem, obj, trace.final_x(), nu_hat);

  for (const ScreeningResult& sc : {sphere_screen(problem, obj, pair),
                                    dome_screen(problem, obj, pair)}) {
    CHECK(sc.lower_bounds.allFinite());
    // a zero column has bound a_i' nu - r * 0 = 0: never above the margin
    CHECK(sc.lower_bounds[1] == 0.0);
    CHECK_FALSE(sc.eliminated[1]);
  }
}

TEST_CASE("screening is safe along the solve path on random instances") {
  int usable = 0;
  Index total_sphere_eliminated = 0;

  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CounterRng rng(seed * 1000 + 6 * 10);
    const Matrix A = rng.normal_matrix(6, 10);
    const Vector b = rng.normal_matrix(6, 1);
    ProblemInstance problem(A, b);
    problem.gram();
    const SmoothObjective obj = make_nnls_objective(b);

    const oracle::EnumerationResult exact = oracle::nnls_by_enumeration(A, b);
    const double t = pgd_step_size(A);

    bool instance_ok = true;
    for (int iters : {5, 50, 400}) {
      Vector x0 = Vector::Zero(10);
      const SolverTrace trace = pgd_solve(problem, obj, x0, t, iters);
      PrimalDualPair pair;
      try {
        pair = chain_pair(problem, obj, trace.final_x());
      } catch (const no_strict_point&) {
        instance_ok = false;  // dual cone has empty interior; nothing to screen
        break;
      }

      const ScreeningResult sphere = sphere_screen(problem, obj, pair);
      const ScreeningResult dome = dome_screen(problem, obj, pair);
      for (Index i = 0; i < 10; ++i) {
        if (sphere.eliminated[static_cast<size_t>(i)])
          CHECK(exact.x[i] <= 1e-8);
        if (dome.eliminated[static_cast<size_t>(i)])
          CHECK(exact.x[i] <= 1e-8);
        CHECK(dome.lower_bounds[i] >= sphere.lower_bounds[i] - 1e-12);
        if (sphere.eliminated[static_cast<size_t>(i)])
          CHECK(dome.eliminated[static_cast<size_t>(i)]);
      }
      if (iters == 400) total_sphere_eliminated += sphere.eliminated_count();
    }
    if (instance_ok) ++usable;
  }

  CHECK(usable >= 4);  // most 6x10 Gaussian draws admit a strict dual point
  CHECK(total_sphere_eliminated > 0);  // tight pairs do eliminate something
}

TEST_CASE("elimination_threshold guarantees sphere elimination") {
  const Matrix A = test::demo_matrix();
  const Vector b = test::demo_rhs();
  ProblemInstance problem(A, b);
  const SmoothObjective obj = make_nnls_objective(b);

  Vector x_hat(5);
  x_hat << 0.0, 0.0, 0.9282, 0.0, 0.5409;
  const PrimalDualPair pair = demo_pair(problem, obj, x_hat);

  const std::vector<Index> inactive = {1, 3};
  const double thresh = elimination_threshold(problem, obj, pair.nu_hat, inactive);

  // definition: min_i <a_i, nu_hat> / ||a_i|| over the set, divided by
  // sqrt(2 L)
  const Vector At_nu = A.transpose() * pair.nu_hat;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (Index i : inactive)
    min_ratio = std::min(min_ratio, At_nu[i] / A.col(i).norm());
  CHECK(thresh ==
        doctest::Approx(min_ratio / std::sqrt(2.0 * obj.lipschitz))
            .epsilon(1e-14));

  // the worked example already clears the bar: sqrt(gap) below the
  // threshold forces both columns out
  REQUIRE(std::sqrt(pair.gap) < thresh);
  const ScreeningResult sc = sphere_screen(problem, obj, pair);
  for (Index i : inactive) CHECK(sc.eliminated[static_cast<size_t>(i)]);

  // active columns drag the threshold to zero: nothing is guaranteed there
  CHECK(elimination_threshold(problem, obj, pair.nu_hat, {0, 1, 2, 3, 4}) >= 0.0);
  Vector nu_neg = -pair.nu_hat;
  CHECK(elimination_threshold(problem, obj, nu_neg, inactive) == 0.0);

  CHECK_THROWS_AS(elimination_threshold(problem, obj, pair.nu_hat, {}),
                  invalid_input);
  CHECK_THROWS_AS(elimination_threshold(problem, obj, pair.nu_hat, {7}),
                  invalid_input);
  CHECK_THROWS_AS(elimination_threshold(problem, obj, pair.nu_hat, {-1}),
                  invalid_input);
  Vector short_nu(2);
  short_nu << 1.0, 1.0;
  CHECK_THROWS_AS(elimination_threshold(problem, obj, short_nu, inactive),
                  invalid_input);

  // a zero column can never be eliminated, so the threshold collapses
  Matrix Az(3, 2);
  Az.col(0) = A.col(0);
  Az.col(1).setZero();
  ProblemInstance pz(Az);
  CHECK(elimination_threshold(pz, obj, pair.nu_hat, {0, 1}) == 0.0);
}

TEST_CASE("threshold guarantee holds on random near-optimal pairs") {
  int verified = 0;
  for (std::uint64_t seed = 21; seed <= 36; ++seed) {
    CounterRng rng(seed * 1000 + 5 * 7);
    const Matrix A = rng.normal_matrix(5, 7);
    const Vector b = rng.normal_matrix(5, 1);
    ProblemInstance problem(A, b);
    const SmoothObjective obj = make_nnls_objective(b);

    const NnlsResult exact = active_set_nnls(A, b);
    PrimalDualPair pair;
    try {
      pair = chain_pair(problem, obj, exact.x);
    } catch (const no_strict_point&) {
      continue;  // dual cone has empty interior on this draw
    }

    // the set this pair can vouch for: columns with a healthy dual margin
    const Vector At_nu = A.transpose() * pair.nu_hat;
    std::vector<Index> set;
    for (Index i = 0; i < 7; ++i)
      if (At_nu[i] / A.col(i).norm() > 1e-3) set.push_back(i);
    if (set.empty()) continue;

    const double thresh = elimination_threshold(problem, obj, pair.nu_hat, set);
    REQUIRE(std::sqrt(pair.gap) < thresh);  // optimal pairs are always tight enough

    const ScreeningResult sc = sphere_screen(problem, obj, pair);
    for (Index i : set) CHECK(sc.eliminated[static_cast<size_t>(i)]);
    ++verified;
  }
  CHECK(verified >= 8);  // this seed range: 11 verify, 2 lack a strict point,
                         // 3 have no column clearing the margin floor
}
