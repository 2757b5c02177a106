#include "simvi/restart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace simvi {

std::size_t stage_length(double mu, double gamma, double omega) {
  if (!(mu > 0.0) || !(gamma > 0.0) || !(omega > 0.0)) throw ParameterError("stage_length: arguments must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4.0 * omega / (mu * gamma))));
}

std::size_t num_restarts(double R0_sq, double eps) {
  if (!(R0_sq >= 0.0) || !(eps > 0.0)) throw ParameterError("num_restarts: bad arguments");
  if (eps >= R0_sq) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.5 * std::log2(R0_sq / eps))));
}

RestartResult paus_r(const RestartConfig& cfg, Cluster& cluster) {
  if (!(cfg.mu > 0.0) || !(cfg.delta > 0.0)) throw ParameterError("PAUS-R needs mu > 0 and delta > 0");
  if (cfg.geometry.domain != DomainKind::NormBall) throw ConfigError("PAUS-R runs on ball setups");
  validate_point(cfg.geometry, cfg.z0);
  const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / cfg.delta;

  // DGF centered at z0; later stages move the center to the stage start
  const GeometrySetup base = recenter(cfg.geometry, cfg.z0, dgf_center(cfg.geometry));
  if (cfg.mu > cfg.delta * omega_d(base, cfg.z0) * (1.0 + 1e-12))
    throw ParameterError("PAUS-R needs mu <= delta * omega");

  auto dist = [&](const Point& u) {
    return cfg.z_star ? primal_norm(cfg.geometry, u - *cfg.z_star) : std::numeric_limits<double>::quiet_NaN();
  };

  RestartResult res;
  res.z_hat = cfg.z0;
  res.initial_distance = dist(cfg.z0);
  const std::size_t N = num_restarts(cfg.R0_sq, cfg.eps);
  const std::size_t r0 = cluster.round_count();
  double prev = res.initial_distance;
  double scale = cfg.R0_sq;
  Point prev_start = cfg.z0;

  for (std::size_t t = 0; t < N; ++t) {
    const GeometrySetup geo = recenter(base, res.z_hat, cfg.z0);
    const double omega = omega_d(geo, res.z_hat);
    PausConfig p;
    p.gamma = gamma;
    p.K = stage_length(cfg.mu, gamma, omega);
    p.geometry = geo;
    p.z0 = res.z_hat;
    p.L_F1 = cfg.L_F1;
    p.delta = cfg.delta;
    p.inner = cfg.inner;
    // The real contraction usually beats the halving bound, so the stage
    // target follows the observed squared step between stage outputs.
    p.inner.eps = std::min(cfg.inner.eps, inner_eps_for_target(std::min(cfg.eps, scale)));
    const RunResult run = paus_run(p, cluster);

    res.z_hat = run.average;
    scale = std::max(std::pow(primal_norm(cfg.geometry, res.z_hat - prev_start), 2), 1e-150);
    prev_start = res.z_hat;
    res.iterations += run.iterations;
    StageRecord s;
    s.stage = t + 1;
    s.K = p.K;
    s.omega = omega;
    s.rounds = cluster.round_count() - r0;
    s.distance = dist(res.z_hat);
    s.ratio = prev > 0.0 ? s.distance / prev : 0.0;
    res.stages.push_back(s);
    if (cfg.z_star && prev > 0.0 && s.ratio > 0.5 * cfg.stall_slack)
      throw RestartStallError("stage " + std::to_string(s.stage) + " shrank the distance only by " +
                                  std::to_string(s.ratio),
                              s.stage, s.ratio);
    prev = s.distance;
  }
  res.rounds = cluster.round_count() - r0;
  return res;
}

}  // namespace simvi
