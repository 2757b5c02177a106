#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "simvi/cluster.hpp"
#include "simvi/composite_mp.hpp"
#include "simvi/geometry.hpp"

namespace simvi {

struct RunRecord {
  std::size_t round = 0;
  double gap = 0.0;
  std::size_t inner_iters = 0;
  double elapsed_ms = 0.0;
};

using GapFn = std::function<double(const Point&)>;

// Every iteration while round <= dense_until, then only once the round
// count has grown by the factor since the last record. The final iteration
// is always recorded.
struct LogSchedule {
  std::size_t dense_until = 1000;
  double growth = 1.01;
};

struct RunOptions {
  GapFn gap;                          // evaluated on the running average
  LogSchedule schedule;
  bool keep_iterates = false;
  std::optional<double> stop_at_gap;  // stop once the logged gap reaches this
};

struct InnerOptions {
  double eps = 1e-10;  // target Bregman distance to the subproblem solution
  std::size_t hard_cap = 20'000'000;
  bool warm_start = true;
};

// eps_inner = min(1e-10, eps_target^2/100)
double inner_eps_for_target(double eps_target);

struct PausConfig {
  double gamma = 1.0;
  std::size_t K = 1;
  GeometrySetup geometry;
  Point z0;
  double L_F1 = 1.0;
  double delta = 0.0;  // when > 0 and enforce_step_bound, gamma must be <= 1/delta
  bool enforce_step_bound = true;
  InnerOptions inner;
  RunOptions run;
};

struct RunResult {
  Point average;
  std::vector<RunRecord> log;
  std::size_t iterations = 0;
  std::size_t total_inner = 0;
  std::size_t rounds = 0;
  std::vector<Point> u_iterates;  // filled when keep_iterates
  std::vector<Point> z_iterates;  // z^0 .. z^K when keep_iterates
};

RunResult paus_run(const PausConfig& cfg, Cluster& cluster);

// max_j (M^T x)_j - min_i (M y)_i
double duality_gap(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
GapFn matrix_game_gap(Eigen::MatrixXd m);

// Lower bound on max_z <F(z), u - z> from sampled points plus all vertex
// pairs of the product of simplices.
double gap_function_estimate(const Evaluator& f_avg, const Point& u, int samples, std::uint64_t seed);

namespace detail {

// Shared by the solvers: decides which iterations get a record.
class RunLogger {
 public:
  RunLogger(const RunOptions& opts, const Cluster& cluster);
  // returns true when the run should stop early
  bool after_iteration(const Point& average, std::size_t inner, bool last);
  void initial(const Point& z0);
  std::vector<RunRecord> take() { return std::move(log_); }
  std::size_t rounds() const;

 private:
  const RunOptions& opts_;
  const Cluster& cluster_;
  std::size_t base_rounds_;
  std::size_t next_mark_ = 0;
  std::int64_t t0_;
  std::vector<RunRecord> log_;
};

}  // namespace detail

}  // namespace simvi
