#include <doctest.h>

#include <cmath>

#include "simvi/restart.hpp"
#include "simvi/verify.hpp"

using namespace simvi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// F(z) = z - z* on a single machine
RestartConfig pull_to_target(const VectorXd& target, double eps) {
  RestartConfig rc;
  rc.mu = 1.0;
  rc.delta = 1.0;
  rc.eps = eps;
  rc.geometry = euclidean_ball(target.size(), 1.0);
  rc.z0 = Point{VectorXd::Zero(target.size())};
  rc.R0_sq = target.squaredNorm();
  rc.L_F1 = 1.0;
  rc.z_star = Point{target};
  return rc;
}

OperatorShard pull_shard(const VectorXd& target) {
  const auto n = target.size();
  return std::make_shared<AffineOperator>(MatrixXd::Identity(n, n), -target);
}

}  // namespace

TEST_CASE("stage length formula") {
  CHECK(stage_length(2.0, 2.0, 1.0) == 1);
  for (double delta : {0.3, 1.0, 7.0})
    for (double mu : {0.05, 0.2})
      CHECK(stage_length(mu, 1.0 / delta, 1.0) == static_cast<std::size_t>(std::ceil(4 * delta / mu)));
  CHECK(stage_length(0.1, 1.0, 2.0) == 2 * stage_length(0.1, 1.0, 1.0));
  CHECK_THROWS_AS(stage_length(0.0, 1.0, 1.0), ParameterError);
}

TEST_CASE("number of restarts") {
  // one stage cuts the squared distance by four
  CHECK(num_restarts(4.0, 1.0) == 1);
  CHECK(num_restarts(16.0, 1.0) == 2);
  CHECK(num_restarts(0.25, 1e-6) == 9);
  CHECK(num_restarts(1.0, 1.0) == 0);
  CHECK(num_restarts(1.0, 2.0) == 0);
  std::size_t prev = 0;
  for (double r : {1.5, 3.0, 10.0, 100.0, 1e4}) {
    CHECK(num_restarts(r, 1.0) >= prev);
    prev = num_restarts(r, 1.0);
  }
}

TEST_CASE("pull toward a known point halves the distance each stage") {
  VectorXd target(2);
  target << 0.3, -0.4;
  Cluster c({pull_shard(target)});
  auto rc = pull_to_target(target, 1e-8);
  auto res = paus_r(rc, c);
  REQUIRE(res.stages.size() == num_restarts(rc.R0_sq, rc.eps));
  for (const auto& s : res.stages) CHECK(s.ratio <= 0.5);
  CHECK((res.z_hat - *rc.z_star).flatten().squaredNorm() <= rc.eps);

  // K N iterations at two rounds each, up to ceiling effects
  const double x = rc.R0_sq / rc.eps;
  const double bound = 2.0 * (4.0 * rc.delta / rc.mu + 1.0) * (0.5 * std::log2(x) + 1.0);
  CHECK(static_cast<double>(res.rounds) <= bound);
  CHECK(res.rounds == 2 * res.iterations);
}

TEST_CASE("no stages leaves the start point unchanged") {
  VectorXd target(2);
  target << 0.1, 0.0;
  Cluster c({pull_shard(target)});
  auto rc = pull_to_target(target, 1.0);
  auto res = paus_r(rc, c);
  CHECK(res.stages.empty());
  CHECK(res.rounds == 0);
  CHECK((res.z_hat - rc.z0).flatten().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("strongly monotone family across workers") {
  auto fam = verify::make_restart_family(8, 5, 0.1, 1.0, 1.0, 3);
  // the family's promises
  VectorXd zs = fam.z_star[0];
  CHECK(zs.norm() == doctest::Approx(0.5));
  CHECK((average_operator(fam.shards, fam.z_star).flatten()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fam.A + fam.A.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  Cluster c(fam.shards);
  RestartConfig rc;
  rc.mu = fam.mu;
  rc.delta = fam.delta;
  rc.eps = 1e-6;
  rc.geometry = euclidean_ball(8, 1.0);
  rc.z0 = Point{VectorXd::Zero(8)};
  rc.R0_sq = zs.squaredNorm();
  rc.L_F1 = fam.L_F1;
  rc.z_star = fam.z_star;
  auto res = paus_r(rc, c);
  const double gamma = 1.0 / rc.delta;
  double prev = res.initial_distance;
  for (const auto& s : res.stages) {
    CHECK(s.ratio <= 0.5 * 1.05);
    // mu |u - z*|^2 <= omega/(K gamma) |start - z*|^2
    CHECK(rc.mu * s.distance * s.distance <=
          s.omega / (static_cast<double>(s.K) * gamma) * prev * prev * (1 + 1e-6) + 1e-14);
    prev = s.distance;
  }
  CHECK(res.stages.back().distance * res.stages.back().distance <= rc.eps);
}

TEST_CASE("stalled stages are reported") {
  auto fam = verify::make_restart_family(6, 3, 0.1, 1.0, 1.0, 5);
  Cluster c(fam.shards);
  RestartConfig rc;
  rc.mu = fam.mu;
  rc.delta = fam.delta;
  rc.eps = 1e-4;
  rc.geometry = euclidean_ball(6, 1.0);
  rc.z0 = Point{VectorXd::Zero(6)};
  rc.R0_sq = 0.25;
  rc.L_F1 = fam.L_F1;
  rc.z_star = fam.z_star;
  rc.stall_slack = 1e-3;  // demand a thousandfold cut per stage
  try {
    paus_r(rc, c);
    FAIL("expected a stall");
  } catch (const RestartStallError& e) {
    CHECK(e.stage() == 1);
    CHECK(e.ratio() > 5e-4);
  }
}

TEST_CASE("restarts on the l1 ball with the a-norm setup") {
  const Eigen::Index d = 10;
  auto fam = verify::make_restart_family(d, 3, 0.5, 0.5, 1.0, 7);
  auto geo = anorm_ball(d, 1.0, 2.0);
  const double q = geo.q;
  // constants moved from l2 into the (l_q, l_q*) pairing
  const double mu_q = fam.mu * std::pow(static_cast<double>(d), 1.0 - 2.0 / q);
  Cluster c(fam.shards);
  RestartConfig rc;
  rc.mu = mu_q;
  rc.delta = fam.delta;
  rc.geometry = geo;
  rc.z0 = Point{VectorXd::Zero(d)};
  rc.R0_sq = std::pow(primal_norm(geo, fam.z_star), 2);
  rc.eps = rc.R0_sq / 16.0;
  rc.L_F1 = fam.L_F1;
  rc.z_star = fam.z_star;
  auto res = paus_r(rc, c);
  CHECK(res.stages.size() == 2);
  for (const auto& s : res.stages) CHECK(s.ratio <= 0.5 * 1.05);
  CHECK(std::pow(primal_norm(geo, res.z_hat - fam.z_star), 2) <= rc.eps);
}

TEST_CASE("restart configuration errors") {
  VectorXd target(2);
  target << 0.1, 0.2;
  Cluster c({pull_shard(target)});
  auto rc = pull_to_target(target, 1e-4);
  rc.geometry = entropy_simplex({2});
  rc.z0 = dgf_center(rc.geometry);
  CHECK_THROWS_AS(paus_r(rc, c), ConfigError);

  auto rc2 = pull_to_target(target, 1e-4);
  rc2.mu = 5.0;  // more than delta * omega
  CHECK_THROWS_AS(paus_r(rc2, c), ParameterError);
}
