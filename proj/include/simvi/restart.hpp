#pragma once

#include <optional>
#include <vector>

#include "simvi/paus.hpp"

namespace simvi {

struct RestartConfig {
  double mu = 1.0;
  double delta = 1.0;
  double eps = 1e-6;       // target squared distance to the solution
  GeometrySetup geometry;  // ball setup
  Point z0;
  double R0_sq = 1.0;      // bound on ||z0 - z*||^2
  double L_F1 = 1.0;
  double gamma = 0.0;      // 0 means 1/delta
  InnerOptions inner;  // tightened per stage, see paus_r
  std::optional<Point> z_star;  // enables per-stage halving diagnostics
  double stall_slack = 1.05;
};

struct StageRecord {
  std::size_t stage = 0;
  std::size_t K = 0;
  double omega = 0.0;
  std::size_t rounds = 0;  // cumulative
  double distance = 0.0;   // ||u - z*||, NaN without z*
  double ratio = 0.0;      // distance / previous distance
};

struct RestartResult {
  Point z_hat;
  std::vector<StageRecord> stages;
  std::size_t rounds = 0;
  std::size_t iterations = 0;
  double initial_distance = 0.0;
};

// ceil(4 omega/(mu gamma))
std::size_t stage_length(double mu, double gamma, double omega);
// ceil(log2(R0_sq/eps)/2); 0 when eps >= R0_sq
std::size_t num_restarts(double R0_sq, double eps);

RestartResult paus_r(const RestartConfig& cfg, Cluster& cluster);

}  // namespace simvi
