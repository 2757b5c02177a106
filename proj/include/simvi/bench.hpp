#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simvi/baselines.hpp"
#include "simvi/operators.hpp"
#include "simvi/paus.hpp"

namespace simvi {

// C_ij = w_i (1 - exp(-theta |i - j|)), w_i ~ U[w_min, w_max] from its own seed
struct SyntheticBase {
  double theta = 0.8;
  double w_min = 0.5;
  double w_max = 1.5;
  std::uint64_t seed = 7;
};

struct GameSpec {
  Eigen::Index d = 25;
  std::size_t T = 10000;
  std::size_t m = 5;
  std::uint64_t seed = 1;
  SyntheticBase synthetic;
  std::string base_file;   // when set, C is read from this file instead
  bool per_entry = false;  // one Rademacher per entry rather than per matrix

  void validate() const;
};

Eigen::MatrixXd synthetic_base(Eigen::Index d, const SyntheticBase& p);
// first line d, then d rows of d whitespace-separated decimals
Eigen::MatrixXd load_matrix_file(const std::string& path);
Eigen::MatrixXd base_matrix(const GameSpec& spec);

// A_t = (1 + xi_t) C, t = 1..T
std::vector<Eigen::MatrixXd> generate_game(const GameSpec& spec);
// Same values as shard_means(generate_game(spec), spec.m) without holding all T matrices.
std::vector<Eigen::MatrixXd> sample_shard_means(const GameSpec& spec);

SimilarityConstants estimate_constants(const std::vector<Eigen::MatrixXd>& matrices, std::size_t m);
SimilarityConstants constants_from_means(const std::vector<Eigen::MatrixXd>& means);
SimilarityConstants constants_from_means_l2(const std::vector<Eigen::MatrixXd>& means);
Eigen::MatrixXd global_mean(const std::vector<Eigen::MatrixXd>& means);

enum class SolverKind { Paus, MirrorProx, Euclidean };

std::string solver_name(SolverKind s);
SolverKind parse_solver(const std::string& s);

struct SolverSpec {
  SolverKind kind = SolverKind::Paus;
  double c = 1.0;     // stepsize multiplier on the theoretical value
  std::string label;  // file stem; defaults to the solver name
  bool euclidean_geometry = false;  // Mirror Prox only: projections instead of entropic steps
};

struct Budget {
  std::size_t K = 5000;                // outer iterations, two rounds each
  double eps = 1e-3;                   // sets the inner tolerance
  std::optional<double> stop_at_gap;
};

struct SeriesResult {
  std::string label;
  SolverKind kind = SolverKind::Paus;
  double c = 1.0;
  double gamma = 0.0;
  SimilarityConstants constants;
  std::vector<RunRecord> log;
  std::size_t total_inner = 0;
  std::string error;  // empty when the solver finished
};

struct ExperimentResult {
  GameSpec spec;
  SimilarityConstants constants;     // l1/linf, used by PAUS and Mirror Prox
  SimilarityConstants constants_l2;  // l2, used by the Euclidean solver
  std::vector<SeriesResult> series;
};

ExperimentResult run_comparison(const GameSpec& spec, const std::vector<SolverSpec>& solvers, const Budget& budget);
ExperimentResult run_comparison(const GameSpec& spec, const std::vector<Eigen::MatrixXd>& means,
                                const std::vector<SolverSpec>& solvers, const Budget& budget);

// Writes <label>.csv per series and constants.csv into dir. Elapsed times
// are written as 0 unless timing is set, so repeated runs are byte-identical.
void emit_csv(const ExperimentResult& result, const std::string& dir, bool timing = false);
std::vector<RunRecord> read_series_csv(const std::string& path);

std::string format_double(double v);

// Least-squares slope of log gap against log round over records in [lo, hi].
double loglog_slope(const std::vector<RunRecord>& log, double lo, double hi);
std::optional<std::size_t> rounds_to_gap(const std::vector<RunRecord>& log, double eps);

}  // namespace simvi
