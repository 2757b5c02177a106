#pragma once

#include <string>
#include <vector>

#include "simvi/types.hpp"

namespace simvi {

enum class DgfKind { Euclidean, EntropySimplex, ANormBall };
enum class DomainKind { SimplexProduct, NormBall };

// Norm pairing a setup measures primal differences and duals in.
enum class NormTag { L1_Linf, L2_L2, Lq_Lqstar };

std::string to_string(NormTag t);

// DGF plus constraint set. Ball setups live on a single block; the DGF is
// w(z) = kappa * ||z - shift||_q^2 (q = 2, kappa = 1/2 for Euclidean).
struct GeometrySetup {
  DgfKind kind = DgfKind::EntropySimplex;
  DomainKind domain = DomainKind::SimplexProduct;
  std::vector<Eigen::Index> dims;

  double ball_p = 2.0;  // norm of the ball constraint
  double radius = 1.0;
  double q = 2.0;       // norm the DGF is built from
  double kappa = 0.5;
  Eigen::VectorXd shift;  // DGF center offset after recentering; empty = 0

  NormTag norm() const;
  Eigen::Index total_dim() const;
};

// exponent a = 2 ln d / (2 ln d - 1), natural log; needs d >= 3 so a <= 2
double a_exponent(Eigen::Index d);

GeometrySetup entropy_simplex(std::vector<Eigen::Index> dims);
GeometrySetup euclidean_simplex(std::vector<Eigen::Index> dims);
GeometrySetup euclidean_ball(Eigen::Index d, double radius);
// Picks the DGF by the ball's norm p: p = 1 gives ||z||_a^2/(2(a-1)),
// a <= p <= 2 gives ||z||_p^2/(p-1), p = 2 gives the Euclidean setup.
GeometrySetup anorm_ball(Eigen::Index d, double ball_p, double radius);

// Throws DomainError / ShapeError when z is not in the setup's domain.
void validate_point(const GeometrySetup& s, const Point& z);
bool in_domain(const GeometrySetup& s, const Point& z, double tol = 1e-12);

double primal_norm(const GeometrySetup& s, const Point& diff);
double dual_norm(const GeometrySetup& s, const DualVector& g);

double dgf_value(const GeometrySetup& s, const Point& z);
DualVector dgf_gradient(const GeometrySetup& s, const Point& z);
double bregman_divergence(const GeometrySetup& s, const Point& u, const Point& v);

// argmin_z  step*<g, z> + V(z, center)
Point prox_map(const GeometrySetup& s, const Point& center, const DualVector& g, double step);

// argmin_v  <g, v> + eta*V(v, anchor) + V(v, center)
Point composite_prox_map(const GeometrySetup& s, const Point& anchor, const Point& center,
                         const DualVector& g, double eta);

// argmax_z <theta, z> - w(z) over the domain
Point mirror_inverse(const GeometrySetup& s, const DualVector& theta);

// sup_z 2V(z, z0)/||z - z0||^2; finite only for ball setups, and for the
// non-Euclidean ones only when z0 is the DGF center.
double omega_d(const GeometrySetup& s, const Point& z0);

// DGF becomes w(z - shift_from + shift_to)
GeometrySetup recenter(const GeometrySetup& s, const Point& shift_from, const Point& shift_to);

// Minimizer of w over the domain: uniform for simplices, the shift for balls.
Point dgf_center(const GeometrySetup& s);

// Upper bound on V(z, z') over the domain, used to size inner loops.
// Simplices: 2 log d per entropy block (from interior starts), 1 per
// Euclidean block.
double divergence_scale(const GeometrySetup& s);

// Euclidean projection onto the probability simplex (sort and threshold).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

// KL term of one coordinate given both logs: exp(lu)(lu-lv) - exp(lu) + exp(lv),
// accurate when lu is close to lv.
double kl_term_from_logs(double lu, double lv);

}  // namespace simvi
