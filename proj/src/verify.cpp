#include "simvi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace simvi::verify {

Eigen::VectorXd simplex_newton_min(const Eigen::VectorXd& g,
                                   const std::vector<std::pair<double, Eigen::VectorXd>>& kl_terms) {
  const Eigen::Index d = g.size();
  double W = 0.0;
  Eigen::VectorXd b = g;
  for (const auto& [w, c] : kl_terms) {
    if (c.size() != d || !(c.minCoeff() > 0.0)) throw DomainError("oracle: KL centers must be positive");
    W += w;
    b -= w * c.array().log().matrix();
  }
  if (!(W > 0.0)) throw ParameterError("oracle needs positive KL weight");
  if (d == 1) return Eigen::VectorXd::Ones(1);

  // f(x) = sum b_i x_i + W x_i log x_i ; eliminate the cheapest coordinate
  Eigen::Index r = 0;
  b.minCoeff(&r);
  auto f = [&](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += b[i] * x[i] + W * x[i] * std::log(x[i]);
    return s;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  const Eigen::Index n = d - 1;
  auto full = [&](Eigen::Index j) { return j < r ? j : j + 1; };
  for (int it = 0; it < 500; ++it) {
    const double gr = b[r] + W * (std::log(x[r]) + 1.0);
    Eigen::VectorXd grad(n);
    Eigen::MatrixXd H = Eigen::MatrixXd::Constant(n, n, W / x[r]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index i = full(j);
      grad[j] = b[i] + W * (std::log(x[i]) + 1.0) - gr;
      H(j, j) += W / x[i];
    }
    const Eigen::VectorXd p = H.ldlt().solve(-grad);
    const double dec = -grad.dot(p);
    if (!(dec > 1e-30)) break;

    double tmax = 1.0;
    double ps = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index i = full(j);
      ps += p[j];
      if (p[j] < 0.0) tmax = std::min(tmax, -0.99 * x[i] / p[j]);
    }
    if (ps > 0.0) tmax = std::min(tmax, 0.99 * x[r] / ps);

    auto moved = [&](double t) {
      Eigen::VectorXd y = x;
      for (Eigen::Index j = 0; j < n; ++j) y[full(j)] += t * p[j];
      y[r] -= t * ps;
      return y;
    };
    // Armijo only while f can resolve the decrease; past that, pure Newton
    double t = tmax;
    if (dec > 1e-10) {
      const double f0 = f(x);
      while (t > 1e-12 && f(moved(t)) > f0 - 0.25 * t * dec) t *= 0.5;
    }
    x = moved(t);
  }
  return x;
}

Eigen::VectorXd project_simplex_enumerate(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  if (d > 20) throw ParameterError("enumeration oracle is for small d");
  Eigen::VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        sum += v[i];
        ++k;
      }
    const double shift = (sum - 1.0) / k;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    bool ok = true;
    for (Eigen::Index i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        x[i] = v[i] - shift;
        if (x[i] < 0.0) ok = false;
      }
    if (!ok) continue;
    const double dist = (x - v).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

Point random_ball_point(const GeometrySetup& s, Rng& rng) {
  const Eigen::Index d = s.dims.at(0);
  Eigen::VectorXd v = rng.uniform_vector(d, -1.0, 1.0);
  double n;
  if (s.ball_p == 1.0)
    n = v.lpNorm<1>();
  else if (s.ball_p == 2.0)
    n = v.norm();
  else
    n = std::pow(v.cwiseAbs().array().pow(s.ball_p).sum(), 1.0 / s.ball_p);
  return Point{Eigen::VectorXd(v * (s.radius * rng.uniform() / n))};
}

namespace {

Point random_domain_point(const GeometrySetup& s, Rng& rng) {
  if (s.domain == DomainKind::SimplexProduct) return random_simplex_point(s.dims, rng);
  return random_ball_point(s, rng);
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(3);
  o << v;
  return o.str();
}

}  // namespace

double sampled_omega(const GeometrySetup& s, const Point& z0, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    Point z = random_ball_point(s, rng);
    // every fourth sample hugs z0 to probe the local curvature
    if (i % 4 == 3) z = z0 + 1e-3 * (z - z0);
    const double den = std::pow(primal_norm(s, z - z0), 2);
    if (den == 0.0) continue;
    best = std::max(best, 2.0 * bregman_divergence(s, z, z0) / den);
  }
  return best;
}

double composite_vi_residual(const CompositeProblem& p, const Point& v, int samples, std::uint64_t seed) {
  const GeometrySetup& s = p.geometry;
  const DualVector G = p.gamma * (p.F1->evaluate(v) + p.offset) + dgf_gradient(s, v) - dgf_gradient(s, p.anchor);
  double best;
  if (s.domain == DomainKind::SimplexProduct) {
    best = 0.0;  // exact: the linear form is minimized at a vertex of each block
    for (std::size_t b = 0; b < v.num_blocks(); ++b) best += G[b].minCoeff() - G[b].dot(v[b]);
  } else {
    // min over the ball of <G, z> is -R ||G||_{p*}
    double dn;
    if (s.ball_p == 1.0)
      dn = G[0].lpNorm<Eigen::Infinity>();
    else if (s.ball_p == 2.0)
      dn = G[0].norm();
    else
      dn = std::pow(G[0].cwiseAbs().array().pow(s.ball_p / (s.ball_p - 1.0)).sum(), (s.ball_p - 1.0) / s.ball_p);
    best = -s.radius * dn - pairing(G, v);
  }
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) best = std::min(best, pairing(G, random_domain_point(s, rng) - v));
  return best;
}

ContractionReport contraction_check(const CompositeProblem& p, const Point& v0, std::size_t T) {
  const GeometrySetup& s = p.geometry;
  std::vector<Point> starts{v0, p.anchor};
  Rng rng(12345);
  starts.push_back(random_domain_point(s, rng));
  if (s.kind == DgfKind::EntropySimplex)
    for (std::size_t b = 0; b < starts.back().num_blocks(); ++b)
      starts.back()[b] = (starts.back()[b].array() + 1e-3).matrix() / (1.0 + 1e-3 * starts.back()[b].size());

  std::vector<Point> refs;
  for (const auto& st : starts) refs.push_back(composite_mp(p, st, 10 * T));
  ContractionReport rep;
  rep.eta = p.eta();
  rep.T = T;
  for (std::size_t i = 1; i < refs.size(); ++i)
    rep.reference_spread =
        std::max(rep.reference_spread, (refs[i] - refs[0]).flatten().lpNorm<Eigen::Infinity>());
  const Point& vstar = refs[0];

  double prev = -1.0;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  composite_mp(p, v0, T, [&](std::size_t, const Point& v) {
    const double cur = bregman_divergence(s, vstar, v);
    if (prev >= 0.0) rep.max_violation = std::max(rep.max_violation, cur - prev / (1.0 + rep.eta));
    prev = cur;
  });
  return rep;
}

RegretReport regret_certificate(const GeometrySetup& s, const Evaluator& f_avg, const std::vector<Point>& u,
                              const Point& z0, double gamma, int points, std::uint64_t seed) {
  if (u.empty()) throw ParameterError("no iterates");
  const double K = static_cast<double>(u.size());
  DualVector fbar = DualVector::zeros_like(u[0]);
  double inner = 0.0;
  for (const auto& uk : u) {
    const DualVector f = f_avg(uk);
    inner += pairing(f, uk);
    fbar += f;
  }
  inner /= K;
  fbar *= 1.0 / K;

  Rng rng(seed);
  RegretReport rep;
  rep.worst_slack = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const Point z = random_domain_point(s, rng);
    const double lhs = inner - pairing(fbar, z);
    const double rhs = bregman_divergence(s, z, z0) / (K * gamma);
    rep.worst_slack = std::max(rep.worst_slack, lhs - rhs);
    ++rep.points;
  }
  return rep;
}

RestartFamily make_restart_family(Eigen::Index d, std::size_t m, double mu, double delta, double radius,
                                  std::uint64_t seed) {
  if (m < 2) throw ConfigError("restart family needs at least two shards");
  Rng rng(seed);
  auto antisym = [&](double norm2) {
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    a = (a - a.transpose()).eval();
    return Eigen::MatrixXd(a * (norm2 / lipschitz_matrix_game_l2(a)));
  };
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);

  RestartFamily f;
  f.mu = mu;
  f.delta = delta;
  f.A = antisym(1.0);
  const Eigen::MatrixXd E1 = antisym(delta);
  std::vector<Eigen::MatrixXd> E{E1};
  std::vector<Eigen::MatrixXd> D;
  Eigen::MatrixXd Dmean = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 1; i < m; ++i) {
    D.push_back(antisym(0.3 * delta));
    Dmean += D.back() / static_cast<double>(m - 1);
  }
  for (std::size_t i = 1; i < m; ++i) E.push_back(-E1 / static_cast<double>(m - 1) + D[i - 1] - Dmean);

  Eigen::VectorXd zs = rng.uniform_vector(d, -1.0, 1.0);
  zs *= 0.5 * radius / zs.norm();
  f.z_star = Point{zs};
  const Eigen::VectorXd b = -(f.A + mu * I) * zs;

  std::vector<Eigen::VectorXd> beta;
  Eigen::VectorXd bmean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < m; ++i) {
    beta.push_back(rng.uniform_vector(d, -0.1, 0.1));
    bmean += beta.back() / static_cast<double>(m);
  }
  for (std::size_t i = 0; i < m; ++i)
    f.shards.push_back(std::make_shared<const AffineOperator>(f.A + E[i] + mu * I, b + beta[i] - bmean));
  f.L = lipschitz_matrix_game_l2(f.A + mu * I);
  f.L_F1 = lipschitz_matrix_game_l2(f.A + E1 + mu * I);
  return f;
}

ScalingFit delta_scaling(const std::vector<std::size_t>& ns, std::size_t m, Eigen::Index d, int seeds) {
  if (ns.size() < 2 || seeds < 1) throw ParameterError("scaling fit needs two sizes and a seed");
  ScalingFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t n : ns) {
    double acc = 0.0;
    for (int k = 1; k <= seeds; ++k) {
      GameSpec spec;
      spec.d = d;
      spec.m = m;
      spec.T = m * n;
      spec.seed = static_cast<std::uint64_t>(k);
      acc += constants_from_means(sample_shard_means(spec)).delta;
    }
    // averaged before the log: a single shard can match the global mean exactly
    const double mean = acc / seeds;
    fit.mean_delta.push_back(mean);
    const double lx = std::log(static_cast<double>(n)), ly = std::log(mean);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double k = static_cast<double>(ns.size());
  fit.exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return fit;
}

CheckResult check_geometry_oracles(std::uint64_t seed) {
  Rng rng(seed);
  double prox_err = 0.0, sc_violation = -1.0, proj_err = 0.0, foc = 0.0, omega_gap = 0.0;

  for (int i = 0; i < 200; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.bits() % 4);
    const GeometrySetup s = entropy_simplex({d});
    const Point c{rng.dirichlet(d)}, a{rng.dirichlet(d)};
    const DualVector g{rng.uniform_vector(d, -2.0, 2.0)};
    const double step = rng.uniform(0.1, 3.0), eta = rng.uniform(0.01, 5.0);
    const Point p = prox_map(s, c, g, step);
    prox_err = std::max(prox_err, (p[0] - simplex_newton_min(step * g[0], {{1.0, c[0]}})).lpNorm<Eigen::Infinity>());
    const Point q = composite_prox_map(s, a, c, g, eta);
    prox_err = std::max(prox_err,
                        (q[0] - simplex_newton_min(g[0], {{eta, a[0]}, {1.0, c[0]}})).lpNorm<Eigen::Infinity>());
  }

  const std::vector<GeometrySetup> setups{entropy_simplex({5, 4}), euclidean_ball(6, 2.0), anorm_ball(25, 1.0, 1.0),
                                          anorm_ball(10, 1.5, 1.0)};
  for (const auto& s : setups)
    for (int i = 0; i < 1000; ++i) {
      const Point u = random_domain_point(s, rng), v = random_domain_point(s, rng);
      sc_violation =
          std::max(sc_violation, 0.5 * std::pow(primal_norm(s, u - v), 2) - bregman_divergence(s, u, v));
    }

  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd v = rng.uniform_vector(3, -2.0, 2.0);
    proj_err = std::max(proj_err, (project_simplex(v) - project_simplex_enumerate(v)).lpNorm<Eigen::Infinity>());
  }

  const GeometrySetup an = recenter(anorm_ball(25, 1.0, 1.0), Point{Eigen::VectorXd::Zero(25)},
                                    Point{Eigen::VectorXd::Zero(25)});
  for (int i = 0; i < 50; ++i) {
    const GeometrySetup s = i % 2 ? recenter(an, random_ball_point(an, rng), Point{Eigen::VectorXd::Zero(25)}) : an;
    const Point v = random_ball_point(s, rng);
    const DualVector g{rng.uniform_vector(25, -3.0, 3.0)};
    const double step = rng.uniform(0.5, 5.0);
    const Point p = prox_map(s, v, g, step);
    const DualVector G = step * g + dgf_gradient(s, p) - dgf_gradient(s, v);
    for (int j = 0; j < 100; ++j) foc = std::min(foc, pairing(G, random_ball_point(s, rng) - p));
  }

  const GeometrySetup s25 = anorm_ball(25, 1.0, 1.0);
  const Point c25 = dgf_center(s25);
  omega_gap = sampled_omega(s25, c25, 10000, seed) - omega_d(s25, c25);

  CheckResult r;
  r.name = "geometry oracles";
  r.pass = prox_err <= 1e-8 && sc_violation <= 1e-9 && proj_err <= 1e-12 && foc >= -1e-8 && omega_gap <= 1e-9;
  r.detail = "prox vs Newton " + fmt(prox_err) + ", strong convexity slack " + fmt(sc_violation) +
             ", projection " + fmt(proj_err) + ", a-norm optimality " + fmt(foc) + ", omega excess " + fmt(omega_gap);
  return r;
}

CheckResult check_regret_certificate(std::uint64_t seed) {
  GameSpec spec;
  spec.T = 1000;
  spec.seed = seed;
  const auto means = sample_shard_means(spec);
  const SimilarityConstants k = constants_from_means(means);
  Cluster cluster(saddle_shards(means));
  PausConfig p;
  p.geometry = entropy_simplex({spec.d, spec.d});
  p.gamma = 1.0 / k.delta;
  p.delta = k.delta;
  p.L_F1 = k.L_F1;
  p.K = 100;
  p.z0 = dgf_center(p.geometry);
  p.run.keep_iterates = true;
  const RunResult run = paus_run(p, cluster);
  const auto shards = cluster.shards();
  const RegretReport rep = regret_certificate(p.geometry, [&](const Point& z) { return average_operator(shards, z); },
                                            run.u_iterates, p.z0, p.gamma, 100, seed + 1);
  return {"regret certificate", rep.worst_slack <= 1e-6, "worst slack " + fmt(rep.worst_slack)};
}

CheckResult check_composite_contraction(std::uint64_t seed) {
  Rng rng(seed);
  double worst = -1.0, spread = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXd M = 2.0 * Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return rng.uniform(-1.0, 1.0); });
    const Eigen::MatrixXd M1 = M + 0.2 * Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return rng.uniform(-1.0, 1.0); });
    const double delta = similarity_matrix_game(M, M1);
    const GeometrySetup s = entropy_simplex({3, 3});
    const Point anchor{rng.dirichlet(3), rng.dirichlet(3)};
    const auto F1 = make_saddle_shard(M1);
    CompositeProblem p{1.0 / delta, anchor, F1, SaddleBilinear(M).evaluate(anchor) - F1->evaluate(anchor), s,
                       lipschitz_matrix_game(M1)};
    const std::size_t T = iterations_needed(p.L_F1, delta, divergence_scale(s), 1e-12);
    const ContractionReport rep = contraction_check(p, dgf_center(s), T);
    worst = std::max(worst, rep.max_violation);
    spread = std::max(spread, rep.reference_spread);
  }
  return {"Composite MP contraction", worst <= 1e-9 && spread <= 1e-10,
          "max violation " + fmt(worst) + ", reference spread " + fmt(spread)};
}

CheckResult check_restart_halving(std::uint64_t seed) {
  const RestartFamily fam = make_restart_family(10, 5, 0.05, 1.0, 1.0, seed);
  Cluster cluster(fam.shards);
  RestartConfig rc;
  rc.mu = fam.mu;
  rc.delta = fam.delta;
  rc.eps = 1e-6;
  rc.geometry = euclidean_ball(10, 1.0);
  rc.z0 = Point{Eigen::VectorXd::Zero(10)};
  rc.R0_sq = std::pow((rc.z0 - fam.z_star).flatten().norm(), 2);
  rc.L_F1 = fam.L_F1;
  rc.z_star = fam.z_star;
  rc.stall_slack = 1e9;  // report rather than throw
  const RestartResult res = paus_r(rc, cluster);
  double worst = 0.0;
  for (const auto& s : res.stages) worst = std::max(worst, s.ratio);
  const double final_sq = std::pow(res.stages.empty() ? res.initial_distance : res.stages.back().distance, 2);
  return {"restart halving", worst <= 0.55 && final_sq <= rc.eps,
          "worst stage ratio " + fmt(worst) + ", final squared distance " + fmt(final_sq)};
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto guarded = [&](const char* name, auto fn) {
    try {
      out.push_back(fn(seed));
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("geometry oracles", check_geometry_oracles);
  guarded("regret certificate", check_regret_certificate);
  guarded("Composite MP contraction", check_composite_contraction);
  guarded("restart halving", check_restart_halving);
  return out;
}

}  // namespace simvi::verify
