#include "simvi/baselines.hpp"

namespace simvi {

RunResult mirror_prox_run(const BaselineConfig& cfg, Cluster& cluster) {
  if (cfg.K < 1) throw ParameterError("Mirror Prox needs K >= 1");
  if (!(cfg.stepsize > 0.0)) throw ParameterError("Mirror Prox needs a positive stepsize");
  validate_point(cfg.geometry, cfg.z0);

  RunResult res;
  detail::RunLogger logger(cfg.run, cluster);
  logger.initial(cfg.z0);
  Point z = cfg.z0;
  Point sum_w = Point::zeros_like(cfg.z0);
  if (cfg.run.keep_iterates) res.z_iterates.push_back(z);

  for (std::size_t k = 0; k < cfg.K; ++k) {
    const Point w = prox_map(cfg.geometry, z, cluster.gather_average(z), cfg.stepsize);
    z = prox_map(cfg.geometry, z, cluster.gather_average(w), cfg.stepsize);
    sum_w += w;
    res.iterations = k + 1;
    if (cfg.run.keep_iterates) {
      res.u_iterates.push_back(w);
      res.z_iterates.push_back(z);
    }
    if (logger.after_iteration(sum_w * (1.0 / static_cast<double>(k + 1)), 0, k + 1 == cfg.K)) break;
  }
  res.average = sum_w * (1.0 / static_cast<double>(res.iterations));
  res.rounds = logger.rounds();
  res.log = logger.take();
  return res;
}

RunResult euclidean_paus_run(const BaselineConfig& cfg, Cluster& cluster) {
  if (cfg.geometry.kind != DgfKind::Euclidean || cfg.geometry.domain != DomainKind::SimplexProduct)
    throw ConfigError("Euclidean PAUS runs on a Euclidean simplex setup");
  PausConfig p;
  p.gamma = cfg.stepsize;
  p.K = cfg.K;
  p.geometry = cfg.geometry;
  p.z0 = cfg.z0;
  p.L_F1 = cfg.L_F1;
  p.delta = cfg.delta;
  p.enforce_step_bound = cfg.enforce_step_bound;
  p.inner = cfg.inner;
  p.run = cfg.run;
  return paus_run(p, cluster);
}

}  // namespace simvi
