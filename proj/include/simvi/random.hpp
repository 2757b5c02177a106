#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace simvi {

// Reproducible across standard libraries: only raw mt19937_64 output is
// consumed, never the implementation-defined distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform on (0, 1], safe for log
  double uniform_open() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

  int rademacher() { return (eng_() >> 63) ? 1 : -1; }

  // Dirichlet(1,...,1): normalized exponentials
  Eigen::VectorXd dirichlet(Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = -std::log(uniform_open());
    return v / v.sum();
  }

  Eigen::VectorXd uniform_vector(Eigen::Index d, double lo, double hi) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace simvi
