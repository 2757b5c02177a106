#pragma once

#include <Eigen/Dense>

namespace simvi::detail {

// Smallest probability an entropic update may produce; keeps logs finite
// when large steps push coordinates toward zero.
inline constexpr double kProbFloor = 1e-300;

// exp(logits) normalized to the simplex, max-shifted, floored at kProbFloor
Eigen::VectorXd softmax_floored(Eigen::VectorXd logits);

}  // namespace simvi::detail
