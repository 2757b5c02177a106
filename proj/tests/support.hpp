#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace testsupport {

// Golden-section minimum of a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// sum_i x_i log(x_i / c_i) on the simplex, with 0 log 0 = 0
inline double kl(const Eigen::VectorXd& x, const Eigen::VectorXd& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) s += x[i] * std::log(x[i] / c[i]);
  return s;
}

}  // namespace testsupport
