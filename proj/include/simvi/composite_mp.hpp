#pragma once

#include <cstddef>
#include <functional>

#include "simvi/geometry.hpp"
#include "simvi/operators.hpp"

namespace simvi {

// Proximal subproblem of a PAUS iteration: find u with
//   <gamma (F1(u) + offset) + grad w(u) - grad w(anchor), z - u> >= 0  for all z,
// offset = F(anchor) - F1(anchor).
struct CompositeProblem {
  double gamma = 1.0;
  Point anchor;
  OperatorShard F1;
  DualVector offset;
  GeometrySetup geometry;
  double L_F1 = 1.0;

  double eta() const { return 1.0 / (2.0 * gamma * L_F1); }
};

using InnerObserver = std::function<void(std::size_t t, const Point& v)>;

// Exactly T iterations; the observer sees v^0 .. v^T.
Point composite_mp(const CompositeProblem& p, const Point& v0, std::size_t T,
                   const InnerObserver& observer = {});

struct InnerResult {
  Point v;
  std::size_t iterations = 0;
  double movement = 0.0;  // V(v^T, v^{T-1})
  bool converged = false; // stopped by the movement test rather than the cap
};

// Runs until V(v^{t+1}, v^t) <= movement_tol or t reaches T_cap. Throws
// InnerSolverError only when hard_cap truncates a T_cap it could not reach.
InnerResult composite_mp_until(const CompositeProblem& p, const Point& v0, std::size_t T_cap,
                               double movement_tol, std::size_t hard_cap);

// ceil((3 L_F1/delta) log(V0/eps)), at least 1; 1 when eps >= V0
std::size_t iterations_needed(double L_F1, double delta, double V0, double eps);

// Movement threshold that puts the iterate within eps of the solution in
// Bregman distance given the (1+eta) contraction.
double movement_tolerance(double eps, double eta);

}  // namespace simvi
