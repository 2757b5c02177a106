#include "simvi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "simvi/detail/entropy.hpp"

namespace simvi {

namespace {

constexpr double kBoundaryNudge = 1e-15;
constexpr double kSumTol = 1e-12;
constexpr std::uintmax_t kRootIterCap = 200;

bool is_simplex(const GeometrySetup& s) { return s.domain == DomainKind::SimplexProduct; }

double lp_norm(const Eigen::VectorXd& y, double p) {
  const double m = y.cwiseAbs().maxCoeff();
  if (m == 0.0 || !std::isfinite(m)) return m;
  if (p == 1.0) return y.cwiseAbs().sum();
  if (p == 2.0) return y.norm();
  return m * std::pow((y.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

double dual_exponent(double q) { return q / (q - 1.0); }

Eigen::VectorXd shift_of(const GeometrySetup& s) {
  if (s.shift.size() == 0) return Eigen::VectorXd::Zero(s.total_dim());
  return s.shift;
}

// gradient of kappa*||y||_q^2
Eigen::VectorXd qnorm_sq_grad(const Eigen::VectorXd& y, double q, double kappa) {
  const double n = lp_norm(y, q);
  if (n == 0.0) return Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd r(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]) / n;
    r[i] = std::copysign(std::pow(a, q - 1.0), y[i]);
  }
  return 2.0 * kappa * n * r;
}

// gradient of the conjugate ||xi||_{q*}^2/(4 kappa)
Eigen::VectorXd qnorm_conj_grad(const Eigen::VectorXd& xi, double qstar, double kappa) {
  return qnorm_sq_grad(xi, qstar, 1.0 / (4.0 * kappa));
}

template <class Tag>
void require_shape(const GeometrySetup& s, const Blocks<Tag>& z) {
  if (z.dims() != s.dims) throw ShapeError("point shape does not match the geometry");
}

void require_finite(const DualVector& g) {
  if (!g.all_finite()) throw NumericsError("non-finite gradient passed to a prox map");
}

void require_positive_center(const GeometrySetup& s, const Point& c) {
  validate_point(s, c);
  if (s.kind != DgfKind::EntropySimplex) return;
  for (std::size_t b = 0; b < c.num_blocks(); ++b)
    if (!(c[b].minCoeff() > 0.0)) throw DomainError("entropic prox center must be strictly positive");
}

Eigen::VectorXd project_ball_l2(Eigen::VectorXd z, double radius) {
  const double n = z.norm();
  if (n > radius) z *= radius / n;
  return z;
}

// Row 1 mirror inverse: argmax <theta, y> - kappa||y||_q^2  s.t. ||y + sh||_1 <= R,
// returned as z = y + sh. Lagrange multiplier lambda on the l1 constraint; for
// fixed lambda the dual is a box-constrained problem in xi solved through its
// norm t = ||xi||_{q*}.
Eigen::VectorXd anorm_l1_ball_inverse(const Eigen::VectorXd& theta, const Eigen::VectorXd& sh,
                                      double q, double kappa, double R) {
  const double qs = dual_exponent(q);
  Eigen::VectorXd y = qnorm_conj_grad(theta, qs, kappa);
  if ((y + sh).cwiseAbs().sum() <= R) return y + sh;

  const Eigen::Index d = theta.size();
  using boost::math::tools::eps_tolerance;
  using boost::math::tools::toms748_solve;

  auto y_at = [&](double lambda) {
    const Eigen::VectorXd lo = theta.array() - lambda;
    const Eigen::VectorXd hi = theta.array() + lambda;
    Eigen::VectorXd xi(d);
    std::vector<char> free(static_cast<std::size_t>(d));
    auto xi_at = [&](double t) {
      const double nu = std::pow(t, 2.0 - qs) / (2.0 * kappa);
      for (Eigen::Index i = 0; i < d; ++i) {
        double u = 0.0;
        if (sh[i] != 0.0 && std::isfinite(nu))
          u = -std::copysign(std::pow(std::abs(sh[i]) / nu, 1.0 / (qs - 1.0)), sh[i]);
        const double c = std::clamp(u, lo[i], hi[i]);
        free[static_cast<std::size_t>(i)] = (u > lo[i] && u < hi[i]) ? 1 : 0;
        xi[i] = c;
      }
    };
    auto f = [&](double t) {
      xi_at(t);
      return lp_norm(xi, qs) - t;
    };
    const double t_hi = lp_norm(lo.cwiseAbs().cwiseMax(hi.cwiseAbs()), qs);
    double t = 0.0;
    if (t_hi > 0.0) {
      double t_lo = t_hi;
      while (t_lo > 1e-300 && f(t_lo) <= 0.0) t_lo *= 0.5;
      if (f(t_lo) > 0.0 && f(t_hi) < 0.0) {
        std::uintmax_t it = kRootIterCap;
        auto r = toms748_solve(f, t_lo, t_hi, eps_tolerance<double>(50), it);
        t = 0.5 * (r.first + r.second);
      } else if (f(t_hi) >= 0.0) {
        t = t_hi;
      }
    }
    xi_at(t);
    Eigen::VectorXd out(d);
    if (t == 0.0) {
      out = -sh;  // xi = 0 inside the box, stationarity gives y = -sh
      for (Eigen::Index i = 0; i < d; ++i)
        if (!free[static_cast<std::size_t>(i)]) out[i] = 0.0;
      return out;
    }
    const double nu = std::pow(t, 2.0 - qs) / (2.0 * kappa);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (free[static_cast<std::size_t>(i)])
        out[i] = -sh[i];
      else
        out[i] = nu * std::copysign(std::pow(std::abs(xi[i]), qs - 1.0), xi[i]);
    }
    return out;
  };

  auto psi = [&](double lambda) { return (y_at(lambda) + sh).cwiseAbs().sum() - R; };

  // Once the box holds the unconstrained dual minimizer, y = -sh and z = 0.
  const Eigen::VectorXd xi_star = qnorm_sq_grad(-sh, q, kappa);
  double lam_hi = 1.01 * (theta - xi_star).cwiseAbs().maxCoeff() + 1e-12;
  while (psi(lam_hi) > 0.0) lam_hi *= 2.0;
  std::uintmax_t it = kRootIterCap;
  auto r = toms748_solve(psi, 0.0, lam_hi, eps_tolerance<double>(50), it);
  return y_at(r.second) + sh;
}

}  // namespace

namespace detail {

Eigen::VectorXd softmax_floored(Eigen::VectorXd logits) {
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd x = logits.array().exp();
  x /= x.sum();
  return x.cwiseMax(kProbFloor);
}

}  // namespace detail

std::string to_string(NormTag t) {
  switch (t) {
    case NormTag::L1_Linf: return "l1/linf";
    case NormTag::L2_L2: return "l2/l2";
    case NormTag::Lq_Lqstar: return "lq/lq*";
  }
  return "?";
}

NormTag GeometrySetup::norm() const {
  switch (kind) {
    case DgfKind::EntropySimplex: return NormTag::L1_Linf;
    case DgfKind::Euclidean: return NormTag::L2_L2;
    case DgfKind::ANormBall: return NormTag::Lq_Lqstar;
  }
  return NormTag::L2_L2;
}

Eigen::Index GeometrySetup::total_dim() const {
  Eigen::Index n = 0;
  for (auto d : dims) n += d;
  return n;
}

double a_exponent(Eigen::Index d) {
  if (d < 3) throw ConfigError("a-norm setup needs dimension >= 3");
  const double l = 2.0 * std::log(static_cast<double>(d));
  return l / (l - 1.0);
}

GeometrySetup entropy_simplex(std::vector<Eigen::Index> dims) {
  GeometrySetup s;
  s.kind = DgfKind::EntropySimplex;
  s.domain = DomainKind::SimplexProduct;
  for (auto d : dims)
    if (d < 1) throw ConfigError("block dimension must be positive");
  s.dims = std::move(dims);
  return s;
}

GeometrySetup euclidean_simplex(std::vector<Eigen::Index> dims) {
  GeometrySetup s = entropy_simplex(std::move(dims));
  s.kind = DgfKind::Euclidean;
  return s;
}

GeometrySetup euclidean_ball(Eigen::Index d, double radius) {
  if (d < 1) throw ConfigError("dimension must be positive");
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  GeometrySetup s;
  s.kind = DgfKind::Euclidean;
  s.domain = DomainKind::NormBall;
  s.dims = {d};
  s.radius = radius;
  return s;
}

GeometrySetup anorm_ball(Eigen::Index d, double ball_p, double radius) {
  if (ball_p == 2.0) return euclidean_ball(d, radius);
  GeometrySetup s = euclidean_ball(d, radius);
  const double a = a_exponent(d);
  s.kind = DgfKind::ANormBall;
  s.ball_p = ball_p;
  if (ball_p == 1.0) {
    s.q = a;
    s.kappa = 1.0 / (2.0 * (a - 1.0));
  } else if (ball_p >= a && ball_p < 2.0) {
    s.q = ball_p;
    s.kappa = 1.0 / (ball_p - 1.0);
  } else {
    throw ConfigError("ball norm p must be 1, in [a, 2], or 2");
  }
  return s;
}

bool in_domain(const GeometrySetup& s, const Point& z, double tol) {
  if (z.dims() != s.dims || !z.all_finite()) return false;
  if (is_simplex(s)) {
    for (std::size_t b = 0; b < z.num_blocks(); ++b) {
      if (z[b].minCoeff() < -kBoundaryNudge) return false;
      if (std::abs(z[b].sum() - 1.0) > tol) return false;
    }
    return true;
  }
  return lp_norm(z[0], s.ball_p) <= s.radius + tol;
}

void validate_point(const GeometrySetup& s, const Point& z) {
  require_shape(s, z);
  if (!in_domain(s, z, kSumTol)) throw DomainError("point outside the domain");
}

double primal_norm(const GeometrySetup& s, const Point& diff) {
  switch (s.norm()) {
    case NormTag::L1_Linf: {
      double acc = 0.0;
      for (std::size_t b = 0; b < diff.num_blocks(); ++b) acc += std::pow(diff[b].lpNorm<1>(), 2);
      return std::sqrt(acc);
    }
    case NormTag::L2_L2: return diff.flatten().norm();
    case NormTag::Lq_Lqstar: return lp_norm(diff.flatten(), s.q);
  }
  return 0.0;
}

double dual_norm(const GeometrySetup& s, const DualVector& g) {
  switch (s.norm()) {
    case NormTag::L1_Linf: {
      double acc = 0.0;
      for (std::size_t b = 0; b < g.num_blocks(); ++b) acc += std::pow(g[b].lpNorm<Eigen::Infinity>(), 2);
      return std::sqrt(acc);
    }
    case NormTag::L2_L2: return g.flatten().norm();
    case NormTag::Lq_Lqstar: return lp_norm(g.flatten(), dual_exponent(s.q));
  }
  return 0.0;
}

double dgf_value(const GeometrySetup& s, const Point& z) {
  validate_point(s, z);
  switch (s.kind) {
    case DgfKind::EntropySimplex: {
      double acc = 0.0;
      for (std::size_t b = 0; b < z.num_blocks(); ++b)
        for (Eigen::Index i = 0; i < z[b].size(); ++i) {
          const double x = z[b][i];
          if (x > kBoundaryNudge) acc += x * std::log(x);
        }
      return acc;
    }
    case DgfKind::Euclidean:
      if (is_simplex(s)) return 0.5 * z.flatten().squaredNorm();
      return 0.5 * (z[0] - shift_of(s)).squaredNorm();
    case DgfKind::ANormBall: return s.kappa * std::pow(lp_norm(z[0] - shift_of(s), s.q), 2);
  }
  return 0.0;
}

DualVector dgf_gradient(const GeometrySetup& s, const Point& z) {
  validate_point(s, z);
  switch (s.kind) {
    case DgfKind::EntropySimplex: {
      DualVector g = DualVector::zeros_like(z);
      for (std::size_t b = 0; b < z.num_blocks(); ++b) {
        if (!(z[b].minCoeff() > 0.0)) throw DomainError("entropy gradient undefined on the boundary");
        g[b] = z[b].array().log() + 1.0;
      }
      return g;
    }
    case DgfKind::Euclidean:
      if (is_simplex(s)) return retag<DualTag>(z);
      return DualVector{Eigen::VectorXd(z[0] - shift_of(s))};
    case DgfKind::ANormBall: return DualVector{qnorm_sq_grad(z[0] - shift_of(s), s.q, s.kappa)};
  }
  return {};
}

double kl_term_from_logs(double lu, double lv) {
  if (lu == -std::numeric_limits<double>::infinity()) return std::exp(lv);
  const double x = lu - lv;
  double phi;
  if (std::abs(x) < 1e-3)
    phi = x * x * (0.5 + x * (1.0 / 3.0 + x * (0.125 + x / 30.0)));
  else
    phi = x * std::exp(x) - std::expm1(x);
  return std::exp(lv) * phi;
}

double bregman_divergence(const GeometrySetup& s, const Point& u, const Point& v) {
  validate_point(s, u);
  validate_point(s, v);
  switch (s.kind) {
    case DgfKind::EntropySimplex: {
      double acc = 0.0;
      for (std::size_t b = 0; b < u.num_blocks(); ++b)
        for (Eigen::Index i = 0; i < u[b].size(); ++i) {
          const double ui = u[b][i], vi = std::max(v[b][i], 0.0);
          if (ui <= kBoundaryNudge) {
            acc += vi;
            continue;
          }
          if (vi <= 0.0) throw DivergenceInfinite("V(u, v) is infinite: v vanishes where u has mass");
          acc += kl_term_from_logs(std::log(ui), std::log(vi));
        }
      return acc;
    }
    case DgfKind::Euclidean: return 0.5 * (u.flatten() - v.flatten()).squaredNorm();
    case DgfKind::ANormBall: {
      const Eigen::VectorXd sh = shift_of(s);
      const Eigen::VectorXd yu = u[0] - sh, yv = v[0] - sh;
      const double wu = s.kappa * std::pow(lp_norm(yu, s.q), 2);
      const double wv = s.kappa * std::pow(lp_norm(yv, s.q), 2);
      return std::max(0.0, wu - wv - qnorm_sq_grad(yv, s.q, s.kappa).dot(yu - yv));
    }
  }
  return 0.0;
}

Point mirror_inverse(const GeometrySetup& s, const DualVector& theta) {
  require_shape(s, theta);
  require_finite(theta);
  switch (s.kind) {
    case DgfKind::EntropySimplex: {
      Point z = Point::zeros_like(theta);
      for (std::size_t b = 0; b < theta.num_blocks(); ++b) z[b] = detail::softmax_floored(theta[b]);
      return z;
    }
    case DgfKind::Euclidean: {
      if (is_simplex(s)) {
        Point z = Point::zeros_like(theta);
        for (std::size_t b = 0; b < theta.num_blocks(); ++b) z[b] = project_simplex(theta[b]);
        return z;
      }
      return Point{project_ball_l2(theta[0] + shift_of(s), s.radius)};
    }
    case DgfKind::ANormBall: {
      if (s.ball_p == 1.0)
        return Point{anorm_l1_ball_inverse(theta[0], shift_of(s), s.q, s.kappa, s.radius)};
      Eigen::VectorXd y = qnorm_conj_grad(theta[0], dual_exponent(s.q), s.kappa);
      const double n = lp_norm(y, s.q);
      if (n > s.radius) y *= s.radius / n;
      return Point{y};
    }
  }
  return {};
}

Point prox_map(const GeometrySetup& s, const Point& center, const DualVector& g, double step) {
  if (!(step > 0.0)) throw ParameterError("prox step must be positive");
  require_shape(s, g);
  require_finite(g);
  require_positive_center(s, center);
  if (s.kind == DgfKind::EntropySimplex) {
    Point z = Point::zeros_like(center);
    for (std::size_t b = 0; b < center.num_blocks(); ++b)
      z[b] = detail::softmax_floored(center[b].array().log() - step * g[b].array());
    return z;
  }
  return mirror_inverse(s, dgf_gradient(s, center) - step * g);
}

Point composite_prox_map(const GeometrySetup& s, const Point& anchor, const Point& center,
                         const DualVector& g, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ParameterError("composite weight must be >= 0");
  require_shape(s, g);
  require_finite(g);
  require_positive_center(s, anchor);
  require_positive_center(s, center);
  const double inv = 1.0 / (1.0 + eta);
  if (s.kind == DgfKind::EntropySimplex) {
    Point z = Point::zeros_like(center);
    for (std::size_t b = 0; b < center.num_blocks(); ++b)
      z[b] = detail::softmax_floored(
          inv * (eta * anchor[b].array().log() + center[b].array().log() - g[b].array()));
    return z;
  }
  DualVector theta = eta * dgf_gradient(s, anchor) + dgf_gradient(s, center) - g;
  return mirror_inverse(s, inv * theta);
}

double omega_d(const GeometrySetup& s, const Point& z0) {
  validate_point(s, z0);
  switch (s.kind) {
    case DgfKind::EntropySimplex:
      throw UnboundedOmegaError("entropy: 2V/||z - z0||^2 is unbounded near the boundary");
    case DgfKind::Euclidean: return 1.0;
    case DgfKind::ANormBall: {
      const double off = (z0[0] - shift_of(s)).cwiseAbs().maxCoeff();
      if (off > 1e-12)
        throw UnboundedOmegaError("a-norm DGF: omega is only bounded at the DGF center");
      return 2.0 * s.kappa;
    }
  }
  return 0.0;
}

GeometrySetup recenter(const GeometrySetup& s, const Point& shift_from, const Point& shift_to) {
  if (is_simplex(s) || s.kind == DgfKind::EntropySimplex)
    throw UnsupportedRecenterError("simplex setups cannot be translated");
  require_shape(s, shift_from);
  require_shape(s, shift_to);
  const Eigen::VectorXd delta = shift_from[0] - shift_to[0];
  if (delta.cwiseAbs().maxCoeff() == 0.0) return s;
  if (s.kind == DgfKind::ANormBall && s.ball_p != 1.0)
    throw UnsupportedRecenterError("only the l1-ball a-norm DGF supports recentering");
  GeometrySetup r = s;
  r.shift = shift_of(s) + delta;
  return r;
}

Point dgf_center(const GeometrySetup& s) {
  if (is_simplex(s)) {
    Point z = Point::zeros_like(s.dims);
    for (std::size_t b = 0; b < z.num_blocks(); ++b) z[b].setConstant(1.0 / static_cast<double>(s.dims[b]));
    return z;
  }
  return Point{shift_of(s)};
}

double divergence_scale(const GeometrySetup& s) {
  if (is_simplex(s)) {
    double acc = 0.0;
    for (auto d : s.dims)
      acc += s.kind == DgfKind::EntropySimplex ? 2.0 * std::log(std::max<double>(2.0, static_cast<double>(d)))
                                               : 1.0;
    return acc;
  }
  if (s.kind == DgfKind::Euclidean) return 2.0 * s.radius * s.radius;
  const double r = s.radius + lp_norm(shift_of(s), s.q);
  return 5.0 * s.kappa * r * r;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    cum += u[static_cast<std::size_t>(j)];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) tau = t;
  }
  return (v.array() - tau).cwiseMax(0.0);
}

}  // namespace simvi
