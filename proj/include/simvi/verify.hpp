#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simvi/bench.hpp"
#include "simvi/composite_mp.hpp"
#include "simvi/restart.hpp"

namespace simvi::verify {

// argmin over the simplex of <g, x> + sum_k w_k KL(x, c_k), solved by damped
// Newton in d-1 free coordinates. Shares no code with the closed forms.
Eigen::VectorXd simplex_newton_min(const Eigen::VectorXd& g,
                                   const std::vector<std::pair<double, Eigen::VectorXd>>& kl_terms);

// Euclidean projection onto the simplex by trying every support set.
Eigen::VectorXd project_simplex_enumerate(const Eigen::VectorXd& v);

// max of 2V(z, z0)/||z - z0||^2 over random z in a ball setup's domain
double sampled_omega(const GeometrySetup& s, const Point& z0, int samples, std::uint64_t seed);

Point random_ball_point(const GeometrySetup& s, Rng& rng);

// min over sampled z (and simplex vertices) of
// <gamma (F1(v) + offset) + grad w(v) - grad w(anchor), z - v>
double composite_vi_residual(const CompositeProblem& p, const Point& v, int samples, std::uint64_t seed);

struct ContractionReport {
  double max_violation = 0.0;  // max_t V(v*, v^{t+1}) - V(v*, v^t)/(1+eta)
  double reference_spread = 0.0;
  double eta = 0.0;
  std::size_t T = 0;
};

// Runs T iterations and compares against v* from three 10T-long runs.
ContractionReport contraction_check(const CompositeProblem& p, const Point& v0, std::size_t T);

struct RegretReport {
  double worst_slack = 0.0;  // max over z of lhs - rhs
  int points = 0;
};

// (1/K) sum_k <F(u^k), u^k - z>  <=  V(z, z0)/(K gamma)
RegretReport regret_certificate(const GeometrySetup& s, const Evaluator& f_avg, const std::vector<Point>& u,
                              const Point& z0, double gamma, int points, std::uint64_t seed);

// Strongly monotone affine family split across m shards:
//   F_i(z) = (A + E_i + mu I) z + b_i,  A and E_i antisymmetric, sum E_i = 0,
// so F = (A + mu I) z + b with solution z* inside the ball and
// F_1 - F = E_1 z + const with ||E_1||_2 = delta.
struct RestartFamily {
  std::vector<OperatorShard> shards;
  Eigen::MatrixXd A;
  Point z_star;
  double mu = 0.0;
  double delta = 0.0;
  double L = 0.0;
  double L_F1 = 0.0;
};

RestartFamily make_restart_family(Eigen::Index d, std::size_t m, double mu, double delta, double radius,
                                  std::uint64_t seed);

// Least-squares exponent of the seed-averaged delta against n, for games
// with T = m n split over m workers.
struct ScalingFit {
  double exponent = 0.0;
  std::vector<double> mean_delta;  // one per n
};
ScalingFit delta_scaling(const std::vector<std::size_t>& ns, std::size_t m, Eigen::Index d, int seeds);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

CheckResult check_geometry_oracles(std::uint64_t seed);
CheckResult check_regret_certificate(std::uint64_t seed);
CheckResult check_composite_contraction(std::uint64_t seed);
CheckResult check_restart_halving(std::uint64_t seed);

std::vector<CheckResult> run_all_checks(std::uint64_t seed = 1);

}  // namespace simvi::verify
