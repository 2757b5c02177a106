#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "simvi/bench.hpp"
#include "simvi/paus.hpp"
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

// m local means scattered around a common game
struct SmallGame {
  std::vector<MatrixXd> means;
  MatrixXd global;
  SimilarityConstants k;
};

SmallGame small_game(std::uint64_t seed, Eigen::Index d, std::size_t m, double noise) {
  Rng rng(seed);
  MatrixXd base = random_matrix(rng, d, 1.0);
  SmallGame g;
  for (std::size_t i = 0; i < m; ++i) g.means.push_back(base + random_matrix(rng, d, noise));
  g.global = global_mean(g.means);
  g.k = constants_from_means(g.means);
  return g;
}

PausConfig theory_config(const SmallGame& g, std::size_t K) {
  const Eigen::Index d = g.global.rows();
  PausConfig p;
  p.geometry = entropy_simplex({d, d});
  p.z0 = dgf_center(p.geometry);
  p.gamma = 1.0 / g.k.delta;
  p.delta = g.k.delta;
  p.L_F1 = g.k.L_F1;
  p.K = K;
  p.run.gap = matrix_game_gap(g.global);
  p.run.keep_iterates = true;
  return p;
}

}  // namespace

TEST_CASE("zero operator leaves the start point in place") {
  auto geo = entropy_simplex({3, 3});
  Cluster c({make_saddle_shard(MatrixXd::Zero(3, 3))});
  PausConfig p;
  p.geometry = geo;
  p.z0 = dgf_center(geo);
  p.K = 1;
  p.gamma = 1.0;
  auto r = paus_run(p, c);
  CHECK((r.average - p.z0).flatten().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("identical shards reduce the subproblem to an exact prox of the full operator") {
  Rng rng(1);
  MatrixXd a = random_matrix(rng, 4, 1.0);
  Cluster c({make_saddle_shard(a), make_saddle_shard(a), make_saddle_shard(a)});
  auto geo = entropy_simplex({4, 4});
  PausConfig p;
  p.geometry = geo;
  p.z0 = Point{rng.dirichlet(4), rng.dirichlet(4)};
  p.K = 1;
  p.gamma = 2.0;
  p.L_F1 = lipschitz_matrix_game(a);
  p.inner.eps = 1e-16;
  p.run.keep_iterates = true;
  auto r = paus_run(p, c);
  // u^0 solves <gamma F(u) + grad w(u) - grad w(z0), z - u> >= 0 with no offset
  CompositeProblem sub{p.gamma, p.z0, make_saddle_shard(a), DualVector::zeros_like(p.z0), geo, p.L_F1};
  CHECK(verify::composite_vi_residual(sub, r.u_iterates[0], 500, 2) >= -1e-6);
  // no deviation term, so the mirror step returns u^0
  CHECK((r.z_iterates[1] - r.u_iterates[0]).flatten().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("duality gap reference values") {
  VectorXd h2 = VectorXd::Constant(2, 0.5), h3 = VectorXd::Constant(3, 1.0 / 3.0);
  CHECK(duality_gap(MatrixXd::Zero(2, 2), h2, h2) == 0.0);
  MatrixXd rps(3, 3);
  rps << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  CHECK(std::abs(duality_gap(rps, h3, h3)) < 1e-15);
  MatrixXd m(2, 2);
  m << 1, 0, 0, 0;
  VectorXd e1 = VectorXd::Unit(2, 0);
  CHECK(duality_gap(m, e1, e1) == 1.0);
  CHECK_THROWS_AS(duality_gap(m, h3, h2), ShapeError);
}

TEST_CASE("gap function estimate") {
  // diag(1, 2): both players mix (2/3, 1/3), value 2/3
  MatrixXd m(2, 2);
  m << 1, 0, 0, 2;
  SaddleBilinear op(m);
  Evaluator f = [&](const Point& z) { return op.evaluate(z); };
  VectorXd s = (VectorXd(2) << 2.0 / 3.0, 1.0 / 3.0).finished();
  CHECK(std::abs(gap_function_estimate(f, Point{s, s}, 100, 1)) < 1e-9);

  Evaluator zero = [](const Point& z) { return DualVector::zeros_like(z); };
  Rng rng(2);
  std::vector<Eigen::Index> dims = {3, 3};
  CHECK(gap_function_estimate(zero, random_simplex_point(dims, rng), 10, 1) == 0.0);

  MatrixXd a = random_matrix(rng, 3, 1.0);
  SaddleBilinear op2(a);
  Evaluator f2 = [&](const Point& z) { return op2.evaluate(z); };
  for (int t = 0; t < 20; ++t) {
    Point u = random_simplex_point(dims, rng);
    double prev = -1e300;
    for (int n : {1, 10, 100, 1000}) {
      const double g = gap_function_estimate(f2, u, n, 5);
      CHECK(g >= prev);
      prev = g;
    }
    CHECK(prev <= duality_gap(a, u[0], u[1]) + 1e-12);
  }
}

TEST_CASE("per-iteration telescoping inequality") {
  auto g = small_game(3, 5, 4, 0.1);
  Cluster c(saddle_shards(g.means));
  auto p = theory_config(g, 40);
  auto r = paus_run(p, c);
  SaddleBilinear full(g.global);
  Rng rng(4);
  double worst = -1.0;
  for (int j = 0; j < 10; ++j) {
    Point z = random_simplex_point(p.geometry.dims, rng);
    for (std::size_t k = 0; k < r.u_iterates.size(); ++k) {
      const Point& u = r.u_iterates[k];
      const double lhs = p.gamma * pairing(full.evaluate(u), u - z);
      const double rhs = bregman_divergence(p.geometry, z, r.z_iterates[k]) -
                         bregman_divergence(p.geometry, z, r.z_iterates[k + 1]);
      worst = std::max(worst, lhs - rhs);
    }
  }
  CHECK(worst <= 10 * p.inner.eps);
}

TEST_CASE("ergodic gap stays under the rate envelope") {
  auto g = small_game(5, 6, 5, 0.05);
  Cluster c(saddle_shards(g.means));
  auto p = theory_config(g, 400);
  p.run.keep_iterates = false;
  auto r = paus_run(p, c);
  const double maxV = 2.0 * std::log(6.0);
  for (const auto& rec : r.log) {
    if (rec.round == 0) continue;
    const double K = static_cast<double>(rec.round) / 2.0;
    CHECK(rec.gap <= maxV / (K * p.gamma) * 1.05);
  }

  // outer iterations needed for gap eps stay within delta maxV / eps
  for (double eps : {1e-2, 3e-3}) {
    auto hit = rounds_to_gap(r.log, eps);
    REQUIRE(hit.has_value());
    CHECK(static_cast<double>(*hit) <= 2.0 * std::ceil(g.k.delta * maxV / eps));
  }
}

TEST_CASE("averaged regret certificate against random comparators") {
  auto g = small_game(7, 5, 3, 0.1);
  Cluster c(saddle_shards(g.means));
  auto p = theory_config(g, 60);
  auto r = paus_run(p, c);
  auto shards = c.shards();
  auto rep = verify::regret_certificate(
      p.geometry, [&](const Point& z) { return average_operator(shards, z); }, r.u_iterates, p.z0, p.gamma, 100, 9);
  CHECK(rep.points == 100);
  CHECK(rep.worst_slack <= 1e-6);
}

TEST_CASE("iterates stay strictly inside the simplex") {
  auto g = small_game(8, 7, 4, 0.2);
  Cluster c(saddle_shards(g.means));
  auto p = theory_config(g, 100);
  auto r = paus_run(p, c);
  for (const auto& u : r.u_iterates)
    for (std::size_t b = 0; b < u.num_blocks(); ++b) CHECK(u[b].minCoeff() > 0.0);
  for (const auto& z : r.z_iterates)
    for (std::size_t b = 0; b < z.num_blocks(); ++b) CHECK(z[b].minCoeff() > 0.0);
}

TEST_CASE("permuting the non-server workers does not change the output") {
  auto g = small_game(9, 5, 5, 0.1);
  auto p = theory_config(g, 30);
  Cluster a(saddle_shards(g.means));
  auto ra = paus_run(p, a);
  std::vector<MatrixXd> perm = {g.means[0], g.means[3], g.means[1], g.means[4], g.means[2]};
  Cluster b(saddle_shards(perm));
  auto rb = paus_run(p, b);
  CHECK((ra.average - rb.average).flatten().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stepsize bound and inner failures") {
  auto g = small_game(10, 4, 2, 0.1);
  Cluster c(saddle_shards(g.means));
  auto p = theory_config(g, 3);
  p.gamma = 2.0 / g.k.delta;
  CHECK_THROWS_AS(paus_run(p, c), ParameterError);
  p.enforce_step_bound = false;
  CHECK_NOTHROW(paus_run(p, c));

  auto q = theory_config(g, 3);
  q.inner.hard_cap = 2;
  try {
    paus_run(q, c);
    FAIL("expected an inner solver error");
  } catch (const InnerSolverError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("log cadence") {
  auto g = small_game(11, 3, 2, 0.1);
  Cluster c(saddle_shards(g.means));
  auto p = theory_config(g, 1500);
  p.run.keep_iterates = false;
  auto r = paus_run(p, c);
  REQUIRE(r.log.size() > 2);
  CHECK(r.log.front().round == 0);
  CHECK(r.log.back().round == 3000);
  for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i].round > r.log[i - 1].round);
  // dense up to 1000 rounds, sparse after
  const auto dense = std::count_if(r.log.begin(), r.log.end(), [](const RunRecord& x) { return x.round <= 1000; });
  CHECK(dense == 501);
  CHECK(r.log.size() < 501 + 150);
  CHECK(inner_eps_for_target(1e-3) == doctest::Approx(1e-10));
  CHECK(inner_eps_for_target(1e-6) == doctest::Approx(1e-14));

  auto s = theory_config(g, 1500);
  s.run.stop_at_gap = 1e-2;
  Cluster c2(saddle_shards(g.means));
  auto rs = paus_run(s, c2);
  CHECK(rs.log.back().gap <= 1e-2);
  CHECK(rs.iterations < 1500);
}
