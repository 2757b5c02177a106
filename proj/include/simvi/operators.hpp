#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "simvi/geometry.hpp"
#include "simvi/random.hpp"
#include "simvi/types.hpp"

namespace simvi {

class Operator {
 public:
  virtual ~Operator() = default;
  virtual DualVector evaluate(const Point& z) const = 0;
};

using OperatorShard = std::shared_ptr<const Operator>;
using Evaluator = std::function<DualVector(const Point&)>;

// F(x, y) = (M y, -M^T x) for min_x max_y x^T M y
class SaddleBilinear final : public Operator {
 public:
  explicit SaddleBilinear(Eigen::MatrixXd m) : m_(std::move(m)) {}
  DualVector evaluate(const Point& z) const override;
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// F(z) = A z + b on a single block
class AffineOperator final : public Operator {
 public:
  AffineOperator(Eigen::MatrixXd a, Eigen::VectorXd b) : a_(std::move(a)), b_(std::move(b)) {}
  DualVector evaluate(const Point& z) const override;
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& offset() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

// Wraps an arbitrary callable; mostly for tests and ad-hoc operators.
class FunctionOperator final : public Operator {
 public:
  explicit FunctionOperator(Evaluator f) : f_(std::move(f)) {}
  DualVector evaluate(const Point& z) const override { return f_(z); }

 private:
  Evaluator f_;
};

OperatorShard make_saddle_shard(Eigen::MatrixXd m);

DualVector evaluate_saddle(const SaddleBilinear& op, const Point& z);
DualVector average_operator(const std::vector<OperatorShard>& shards, const Point& z);

double lipschitz_matrix_game(const Eigen::MatrixXd& m);
double similarity_matrix_game(const Eigen::MatrixXd& global, const Eigen::MatrixXd& local);

// Same constants in the l2 pairing: spectral norms.
double lipschitz_matrix_game_l2(const Eigen::MatrixXd& m);
double similarity_matrix_game_l2(const Eigen::MatrixXd& global, const Eigen::MatrixXd& local);

struct SimilarityConstants {
  double L = 0.0;
  double L_F1 = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  NormTag norm = NormTag::L1_Linf;

  // Throws ParameterError when the invariants between the constants fail.
  void validate() const;
  // Throws ConfigError when used with a geometry measuring a different norm.
  void require_norm(const GeometrySetup& s) const;
};

struct SimilarityReport {
  double max_ratio = 0.0;
  bool pass = true;
  int trials = 0;
};

// Samples Dirichlet pairs on the product of simplices with the given block
// dims and reports max ||(F1-F)(u) - (F1-F)(v)||_inf / ||u - v||_1.
SimilarityReport empirical_similarity_check(const Operator& f1, const Evaluator& f_avg,
                                            const std::vector<Eigen::Index>& dims, double delta,
                                            int trials, std::uint64_t seed);

Point random_simplex_point(const std::vector<Eigen::Index>& dims, Rng& rng);

}  // namespace simvi
