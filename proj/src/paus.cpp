#include "simvi/paus.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "simvi/random.hpp"

namespace simvi {

namespace {

std::int64_t now_us() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

namespace detail {

RunLogger::RunLogger(const RunOptions& opts, const Cluster& cluster)
    : opts_(opts), cluster_(cluster), base_rounds_(cluster.round_count()), t0_(now_us()) {}

std::size_t RunLogger::rounds() const { return cluster_.round_count() - base_rounds_; }

void RunLogger::initial(const Point& z0) {
  const double gap = opts_.gap ? opts_.gap(z0) : std::numeric_limits<double>::quiet_NaN();
  log_.push_back({0, gap, 0, 0.0});
}

bool RunLogger::after_iteration(const Point& average, std::size_t inner, bool last) {
  const std::size_t r = rounds();
  const bool due = last || r <= opts_.schedule.dense_until || r >= next_mark_;
  const bool watch = opts_.stop_at_gap.has_value() && opts_.gap;
  if (!due && !watch) return false;
  const double gap = opts_.gap ? opts_.gap(average) : std::numeric_limits<double>::quiet_NaN();
  const bool stop = watch && gap <= *opts_.stop_at_gap;
  if (due || stop) {
    log_.push_back({r, gap, inner, static_cast<double>(now_us() - t0_) / 1000.0});
    if (r > opts_.schedule.dense_until)
      next_mark_ = static_cast<std::size_t>(std::ceil(static_cast<double>(r) * opts_.schedule.growth));
  }
  return stop;
}

}  // namespace detail

double inner_eps_for_target(double eps_target) {
  if (!(eps_target > 0.0)) throw ParameterError("target accuracy must be positive");
  return std::min(1e-10, eps_target * eps_target / 100.0);
}

RunResult paus_run(const PausConfig& cfg, Cluster& cluster) {
  if (cfg.K < 1) throw ParameterError("PAUS needs K >= 1");
  if (!(cfg.gamma > 0.0)) throw ParameterError("PAUS needs gamma > 0");
  if (cfg.enforce_step_bound && cfg.delta > 0.0 && cfg.gamma * cfg.delta > 1.0 + 1e-12)
    throw ParameterError("PAUS stepsize exceeds 1/delta");
  validate_point(cfg.geometry, cfg.z0);
  if (cfg.geometry.kind == DgfKind::EntropySimplex)
    for (std::size_t b = 0; b < cfg.z0.num_blocks(); ++b)
      if (!(cfg.z0[b].minCoeff() > 0.0)) throw DomainError("entropic PAUS needs a strictly positive start");

  const GeometrySetup& geo = cfg.geometry;
  const double eta = 1.0 / (2.0 * cfg.gamma * cfg.L_F1);
  const std::size_t T_cap = iterations_needed(cfg.L_F1, 1.0 / cfg.gamma, divergence_scale(geo), cfg.inner.eps);
  const double mv_tol = movement_tolerance(cfg.inner.eps, eta);

  RunResult res;
  detail::RunLogger logger(cfg.run, cluster);
  logger.initial(cfg.z0);

  Point z = cfg.z0, u_prev = cfg.z0;
  Point sum_u = Point::zeros_like(cfg.z0);
  if (cfg.run.keep_iterates) res.z_iterates.push_back(z);

  for (std::size_t k = 0; k < cfg.K; ++k) {
    const DualVector Fz = cluster.gather_average(z);
    const DualVector F1z = cluster.server_evaluate(z);

    CompositeProblem sub{cfg.gamma, z, cluster.server_shard(), Fz - F1z, geo, cfg.L_F1};
    const InnerResult in =
        composite_mp_until(sub, cfg.inner.warm_start ? u_prev : z, T_cap, mv_tol, cfg.inner.hard_cap);
    const Point& u = in.v;
    res.total_inner += in.iterations;

    const DualVector Fu = cluster.gather_average(u);
    const DualVector F1u = cluster.server_evaluate(u);
    Point z_next = prox_map(geo, u, Fu - F1u - Fz + F1z, cfg.gamma);

    sum_u += u;
    res.iterations = k + 1;
    const Point avg = sum_u * (1.0 / static_cast<double>(k + 1));
    if (cfg.run.keep_iterates) {
      res.u_iterates.push_back(u);
      res.z_iterates.push_back(z_next);
    }
    u_prev = u;
    z = std::move(z_next);
    if (logger.after_iteration(avg, in.iterations, k + 1 == cfg.K)) break;
  }
  res.average = sum_u * (1.0 / static_cast<double>(res.iterations));
  res.rounds = logger.rounds();
  res.log = logger.take();
  return res;
}

double duality_gap(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (m.size() == 0) return 0.0;
  if (x.size() != m.rows() || y.size() != m.cols()) throw ShapeError("duality gap: shape mismatch");
  return (m.transpose() * x).maxCoeff() - (m * y).minCoeff();
}

GapFn matrix_game_gap(Eigen::MatrixXd m) {
  return [m = std::move(m)](const Point& z) { return duality_gap(m, z[0], z[1]); };
}

double gap_function_estimate(const Evaluator& f_avg, const Point& u, int samples, std::uint64_t seed) {
  if (samples < 1) throw ParameterError("need at least one sample");
  const auto dims = u.dims();
  auto value = [&](const Point& z) { return pairing(f_avg(z), u - z); };

  double best = -std::numeric_limits<double>::infinity();
  // vertex enumeration over the product of simplices
  std::vector<Eigen::Index> idx(dims.size(), 0);
  for (;;) {
    Point z = Point::zeros_like(dims);
    for (std::size_t b = 0; b < dims.size(); ++b) z[b][idx[b]] = 1.0;
    best = std::max(best, value(z));
    std::size_t b = 0;
    while (b < dims.size() && ++idx[b] == dims[b]) idx[b++] = 0;
    if (b == dims.size()) break;
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) best = std::max(best, value(random_simplex_point(dims, rng)));
  return best;
}

}  // namespace simvi
