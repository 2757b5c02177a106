#include <doctest.h>

#include <cmath>

#include "simvi/composite_mp.hpp"
#include "simvi/verify.hpp"

using namespace simvi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Rng& rng, Eigen::Index d, double scale) {
  MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = scale * rng.uniform(-1, 1);
  return m;
}

// Proximal subproblem of a random game: F = M, F1 = M + noise.
struct Instance {
  CompositeProblem p;
  double delta;
};

Instance random_instance(Rng& rng, Eigen::Index d, double noise) {
  MatrixXd M = random_matrix(rng, d, 1.0);
  MatrixXd M1 = M + random_matrix(rng, d, noise);
  const double delta = similarity_matrix_game(M, M1);
  auto F1 = make_saddle_shard(M1);
  Point anchor{rng.dirichlet(d), rng.dirichlet(d)};
  CompositeProblem p{1.0 / delta, anchor, F1, SaddleBilinear(M).evaluate(anchor) - F1->evaluate(anchor),
                     entropy_simplex({d, d}), lipschitz_matrix_game(M1)};
  return {p, delta};
}

}  // namespace

TEST_CASE("with no operator the iterates settle on the anchor") {
  auto geo = entropy_simplex({4});
  Rng rng(1);
  Point anchor{rng.dirichlet(4)};
  auto none = std::make_shared<FunctionOperator>([](const Point& z) { return DualVector::zeros_like(z); });
  CompositeProblem p{1.0, anchor, none, DualVector::zeros_like(anchor), geo, 1.0};

  for (std::size_t T : {1, 5, 50}) CHECK((composite_mp(p, anchor, T)[0] - anchor[0]).cwiseAbs().maxCoeff() < 1e-15);

  Point start = dgf_center(geo);
  double prev = bregman_divergence(geo, anchor, start);
  for (std::size_t T : {10, 100, 1000}) {
    const double cur = bregman_divergence(geo, anchor, composite_mp(p, start, T));
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("linear rate on three-dimensional games") {
  Rng rng(2);
  for (int inst = 0; inst < 10; ++inst) {
    auto [p, delta] = random_instance(rng, 3, 0.2);
    const std::size_t T = iterations_needed(p.L_F1, delta, divergence_scale(p.geometry), 1e-12);
    Point v0 = dgf_center(p.geometry);
    Point ref = composite_mp(p, v0, 10 * T);
    const double V0 = bregman_divergence(p.geometry, ref, v0);
    for (std::size_t t : {T / 4, T / 2, T}) {
      const double Vt = bregman_divergence(p.geometry, ref, composite_mp(p, v0, t));
      CHECK(Vt <= std::exp(-static_cast<double>(t) * delta / (3.0 * p.L_F1)) * V0 + 1e-12);
    }
  }
}

TEST_CASE("per-iteration contraction against a reference solution") {
  Rng rng(3);
  for (int inst = 0; inst < 8; ++inst) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.bits() % 4);
    auto [p, delta] = random_instance(rng, d, 0.3);
    const std::size_t T = iterations_needed(p.L_F1, delta, divergence_scale(p.geometry), 1e-12);
    auto rep = verify::contraction_check(p, dgf_center(p.geometry), T);
    CHECK(rep.reference_spread <= 1e-10);
    CHECK(rep.max_violation <= 1e-9);
  }
}

TEST_CASE("output solves the subproblem's variational inequality") {
  Rng rng(4);
  for (int inst = 0; inst < 10; ++inst) {
    auto [p, delta] = random_instance(rng, 4, 0.2);
    auto r = composite_mp_until(p, dgf_center(p.geometry), 1000000,
                                movement_tolerance(1e-16, p.eta()), 1000000);
    CHECK(r.converged);
    CHECK(verify::composite_vi_residual(p, r.v, 2000, 9) >= -1e-6);
    for (std::size_t b = 0; b < r.v.num_blocks(); ++b) CHECK(r.v[b].minCoeff() > 0.0);
  }
}

TEST_CASE("Euclidean iterates stay feasible") {
  Rng rng(5);
  auto geo = euclidean_simplex({4, 4});
  MatrixXd M = random_matrix(rng, 4, 1.0), M1 = M + random_matrix(rng, 4, 0.2);
  auto F1 = make_saddle_shard(M1);
  Point anchor{rng.dirichlet(4), rng.dirichlet(4)};
  CompositeProblem p{3.0, anchor, F1, SaddleBilinear(M).evaluate(anchor) - F1->evaluate(anchor), geo,
                     lipschitz_matrix_game_l2(M1)};
  bool feasible = true;
  composite_mp(p, dgf_center(geo), 200, [&](std::size_t, const Point& v) { feasible = feasible && in_domain(geo, v); });
  CHECK(feasible);
}

TEST_CASE("the subproblem is not the operator's own equilibrium") {
  // matching pennies: the game alone is solved by uniform play
  MatrixXd M1(2, 2);
  M1 << 1, -1, -1, 1;
  auto geo = entropy_simplex({2, 2});
  Point anchor{(VectorXd(2) << 0.95, 0.05).finished(), (VectorXd(2) << 0.1, 0.9).finished()};
  CompositeProblem p{1.0, anchor, make_saddle_shard(M1), DualVector::zeros_like(anchor), geo, 1.0};
  auto r = composite_mp_until(p, dgf_center(geo), 100000, movement_tolerance(1e-14, p.eta()), 100000);
  REQUIRE(r.converged);
  CHECK(verify::composite_vi_residual(p, r.v, 500, 1) >= -1e-6);
  Point eq = dgf_center(geo);
  CHECK((r.v - eq).flatten().cwiseAbs().maxCoeff() > 0.1);
  CHECK(verify::composite_vi_residual(p, eq, 500, 1) < -1e-2);
}

TEST_CASE("iteration count formula") {
  CHECK(iterations_needed(1.0, 1.0, std::exp(1.0), 1.0) == 3);
  CHECK(iterations_needed(2.0, 1.0, 1.0, 1.0) == 1);
  CHECK(iterations_needed(2.0, 1.0, 1.0, 5.0) == 1);
  for (double L : {0.7, 1.3, 5.0}) {
    const std::size_t a = iterations_needed(L, 0.1, 3.0, 1e-9), b = iterations_needed(2 * L, 0.1, 3.0, 1e-9);
    CHECK(b >= 2 * a - 1);
    CHECK(b <= 2 * a);
  }
  CHECK_THROWS_AS(iterations_needed(0.0, 1.0, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(iterations_needed(1.0, -1.0, 1.0, 0.1), ParameterError);
}

TEST_CASE("hard cap below the planned count raises with the residual") {
  Rng rng(6);
  auto [p, delta] = random_instance(rng, 3, 0.2);
  try {
    composite_mp_until(p, dgf_center(p.geometry), 1000, 0.0, 5);
    FAIL("expected an inner solver error");
  } catch (const InnerSolverError& e) {
    CHECK(e.iterations() == 5);
    CHECK(e.residual() > 0.0);
  }
  // reaching T_cap itself is not an error
  auto r = composite_mp_until(p, dgf_center(p.geometry), 5, 0.0, 1000);
  CHECK(r.iterations == 5);
  CHECK_FALSE(r.converged);
  (void)delta;
}
