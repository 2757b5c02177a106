#pragma once

#include "simvi/paus.hpp"

namespace simvi {

enum class BaselineKind { MirrorProx, EuclideanPaus };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::MirrorProx;
  double stepsize = 1.0;  // 1/L for Mirror Prox, 1/delta_2 for Euclidean PAUS
  std::size_t K = 1;
  GeometrySetup geometry;
  Point z0;
  double L_F1 = 1.0;   // Euclidean PAUS only, l2 pairing
  double delta = 0.0;  // Euclidean PAUS only, l2 pairing
  bool enforce_step_bound = true;
  InnerOptions inner;
  RunOptions run;
};

// Extragradient in the setup's geometry: two gathers per iteration,
// returns the average of the extrapolated points.
RunResult mirror_prox_run(const BaselineConfig& cfg, Cluster& cluster);

// PAUS with Euclidean projections on the simplex standing in for a
// Euclidean similarity method.
RunResult euclidean_paus_run(const BaselineConfig& cfg, Cluster& cluster);

}  // namespace simvi
