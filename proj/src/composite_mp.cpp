#include "simvi/composite_mp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "simvi/detail/entropy.hpp"

namespace simvi {

namespace {

void check_problem(const CompositeProblem& p, const Point& v0) {
  if (!(p.gamma > 0.0) || !(p.L_F1 > 0.0)) throw ParameterError("composite MP needs gamma > 0 and L_F1 > 0");
  if (!p.F1) throw ConfigError("composite MP without an operator");
  if (!p.offset.same_shape(p.anchor)) throw ShapeError("offset shape differs from the anchor");
  validate_point(p.geometry, p.anchor);
  validate_point(p.geometry, v0);
}

void fail_nonfinite(std::size_t t) {
  throw NumericsError("composite MP produced a non-finite value at iteration " + std::to_string(t));
}

// Log-space iteration for the entropic setup; avoids re-taking logs of the
// anchor and center every half-step.
class EntropyStepper {
 public:
  EntropyStepper(const CompositeProblem& p, const Point& v0) : p_(p), eta_(p.eta()) {
    const std::size_t nb = v0.num_blocks();
    la_.resize(nb);
    lv_.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      if (!(p.anchor[b].minCoeff() > 0.0) || !(v0[b].minCoeff() > 0.0))
        throw DomainError("entropic composite MP needs strictly positive anchor and start");
      la_[b] = p.anchor[b].array().log();
      lv_[b] = v0[b].array().log();
    }
    v_ = v0;
  }

  // one full iteration; returns V(v^{t+1}, v^t)
  double step(std::size_t t) {
    const double scale = p_.gamma * eta_, inv = 1.0 / (1.0 + eta_);
    DualVector g = p_.F1->evaluate(v_);
    Point h = v_;
    std::vector<Eigen::VectorXd> lh(lv_.size());
    for (std::size_t b = 0; b < lv_.size(); ++b) {
      lh[b] = inv * (eta_ * la_[b] + lv_[b] - scale * (g[b] + p_.offset[b]));
      normalize(lh[b], h[b]);
    }
    g = p_.F1->evaluate(h);
    double mv = 0.0;
    for (std::size_t b = 0; b < lv_.size(); ++b) {
      Eigen::VectorXd ln = inv * (eta_ * la_[b] + lv_[b] - scale * (g[b] + p_.offset[b]));
      normalize(ln, v_[b]);
      for (Eigen::Index i = 0; i < ln.size(); ++i) mv += kl_term_from_logs(ln[i], lv_[b][i]);
      lv_[b] = std::move(ln);
    }
    if (!std::isfinite(mv)) fail_nonfinite(t);
    return mv;
  }

  const Point& v() const { return v_; }

 private:
  static void normalize(Eigen::VectorXd& l, Eigen::VectorXd& x) {
    const double mx = l.maxCoeff();
    const double lse = mx + std::log((l.array() - mx).exp().sum());
    static const double lfloor = std::log(detail::kProbFloor);
    l = (l.array() - lse).cwiseMax(lfloor);
    x = l.array().exp();
  }

  const CompositeProblem& p_;
  double eta_;
  std::vector<Eigen::VectorXd> la_, lv_;
  Point v_;
};

class GenericStepper {
 public:
  GenericStepper(const CompositeProblem& p, const Point& v0) : p_(p), eta_(p.eta()), v_(v0) {}

  double step(std::size_t t) {
    const double scale = p_.gamma * eta_;
    const Point h = composite_prox_map(p_.geometry, p_.anchor, v_,
                                       scale * (p_.F1->evaluate(v_) + p_.offset), eta_);
    Point next = composite_prox_map(p_.geometry, p_.anchor, v_,
                                    scale * (p_.F1->evaluate(h) + p_.offset), eta_);
    if (!next.all_finite()) fail_nonfinite(t);
    const double mv = bregman_divergence(p_.geometry, next, v_);
    v_ = std::move(next);
    return mv;
  }

  const Point& v() const { return v_; }

 private:
  const CompositeProblem& p_;
  double eta_;
  Point v_;
};

template <class Fn>
auto with_stepper(const CompositeProblem& p, const Point& v0, Fn&& fn) {
  if (p.geometry.kind == DgfKind::EntropySimplex) {
    EntropyStepper s(p, v0);
    return fn(s);
  }
  GenericStepper s(p, v0);
  return fn(s);
}

}  // namespace

Point composite_mp(const CompositeProblem& p, const Point& v0, std::size_t T, const InnerObserver& observer) {
  check_problem(p, v0);
  if (T < 1) throw ParameterError("composite MP needs T >= 1");
  return with_stepper(p, v0, [&](auto& s) {
    if (observer) observer(0, s.v());
    for (std::size_t t = 0; t < T; ++t) {
      s.step(t);
      if (observer) observer(t + 1, s.v());
    }
    return s.v();
  });
}

InnerResult composite_mp_until(const CompositeProblem& p, const Point& v0, std::size_t T_cap,
                               double movement_tol, std::size_t hard_cap) {
  check_problem(p, v0);
  const std::size_t cap = std::min(std::max<std::size_t>(T_cap, 1), std::max<std::size_t>(hard_cap, 1));
  return with_stepper(p, v0, [&](auto& s) {
    InnerResult r;
    for (std::size_t t = 0; t < cap; ++t) {
      r.movement = s.step(t);
      r.iterations = t + 1;
      if (r.movement <= movement_tol) {
        r.converged = true;
        break;
      }
    }
    if (!r.converged && cap < T_cap)
      throw InnerSolverError("composite MP hit its hard iteration cap", r.movement, r.iterations);
    r.v = s.v();
    return r;
  });
}

std::size_t iterations_needed(double L_F1, double delta, double V0, double eps) {
  if (!(L_F1 > 0.0) || !(delta > 0.0) || !(V0 > 0.0) || !(eps > 0.0))
    throw ParameterError("iterations_needed: arguments must be positive");
  if (eps >= V0) return 1;
  const double t = std::ceil(3.0 * L_F1 / delta * std::log(V0 / eps));
  if (t >= static_cast<double>(std::numeric_limits<std::size_t>::max() / 2))
    return std::numeric_limits<std::size_t>::max() / 2;
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

double movement_tolerance(double eps, double eta) { return eps * eta * eta / 4.0; }

}  // namespace simvi
