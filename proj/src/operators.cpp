#include "simvi/operators.hpp"

#include <cmath>

#include "simvi/random.hpp"

namespace simvi {

DualVector SaddleBilinear::evaluate(const Point& z) const {
  if (z.num_blocks() != 2 || z[0].size() != m_.rows() || z[1].size() != m_.cols())
    throw ShapeError("saddle operator expects (x, y) matching the matrix");
  DualVector g = DualVector::zeros_like(z);
  g[0].noalias() = m_ * z[1];
  g[1].noalias() = -m_.transpose() * z[0];
  return g;
}

DualVector AffineOperator::evaluate(const Point& z) const {
  if (z.num_blocks() != 1 || z[0].size() != a_.cols()) throw ShapeError("affine operator: shape mismatch");
  return DualVector{Eigen::VectorXd(a_ * z[0] + b_)};
}

OperatorShard make_saddle_shard(Eigen::MatrixXd m) {
  return std::make_shared<const SaddleBilinear>(std::move(m));
}

DualVector evaluate_saddle(const SaddleBilinear& op, const Point& z) { return op.evaluate(z); }

DualVector average_operator(const std::vector<OperatorShard>& shards, const Point& z) {
  if (shards.empty()) throw ConfigError("average of zero shards");
  DualVector acc = shards[0]->evaluate(z);
  for (std::size_t i = 1; i < shards.size(); ++i) {
    DualVector gi = shards[i]->evaluate(z);
    if (!gi.same_shape(acc)) throw ShapeError("shards disagree on output shape");
    acc += gi;
  }
  return acc * (1.0 / static_cast<double>(shards.size()));
}

double lipschitz_matrix_game(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double similarity_matrix_game(const Eigen::MatrixXd& global, const Eigen::MatrixXd& local) {
  if (global.rows() != local.rows() || global.cols() != local.cols())
    throw ShapeError("similarity: matrices differ in shape");
  return lipschitz_matrix_game(global - local);
}

double lipschitz_matrix_game_l2(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double similarity_matrix_game_l2(const Eigen::MatrixXd& global, const Eigen::MatrixXd& local) {
  if (global.rows() != local.rows() || global.cols() != local.cols())
    throw ShapeError("similarity: matrices differ in shape");
  return lipschitz_matrix_game_l2(global - local);
}

void SimilarityConstants::validate() const {
  const double slack = 1e-12 * (1.0 + L + L_F1);
  if (!(delta >= 0.0) || !(mu >= 0.0) || !(L >= 0.0) || !(L_F1 >= 0.0))
    throw ParameterError("similarity constants must be non-negative");
  if (delta > L + L_F1 + slack) throw ParameterError("delta exceeds L + L_F1");
  if (mu > L + slack) throw ParameterError("mu exceeds L");
}

void SimilarityConstants::require_norm(const GeometrySetup& s) const {
  if (s.norm() != norm)
    throw ConfigError("constants measured in " + to_string(norm) + " used with a " + to_string(s.norm()) +
                      " geometry");
}

Point random_simplex_point(const std::vector<Eigen::Index>& dims, Rng& rng) {
  Point z = Point::zeros_like(dims);
  for (std::size_t b = 0; b < dims.size(); ++b) z[b] = rng.dirichlet(dims[b]);
  return z;
}

SimilarityReport empirical_similarity_check(const Operator& f1, const Evaluator& f_avg,
                                            const std::vector<Eigen::Index>& dims, double delta,
                                            int trials, std::uint64_t seed) {
  if (trials < 1) throw ParameterError("need at least one trial");
  Rng rng(seed);
  SimilarityReport r;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Point u = random_simplex_point(dims, rng);
    const Point v = random_simplex_point(dims, rng);
    const double den = (u - v).flatten().lpNorm<1>();
    if (den == 0.0) continue;
    const DualVector dev = (f1.evaluate(u) - f_avg(u)) - (f1.evaluate(v) - f_avg(v));
    r.max_ratio = std::max(r.max_ratio, dev.flatten().lpNorm<Eigen::Infinity>() / den);
  }
  r.pass = r.max_ratio <= delta * (1.0 + 1e-9) + (delta == 0.0 ? 1e-15 : 0.0);
  return r;
}

}  // namespace simvi
