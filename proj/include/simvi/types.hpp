#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "simvi/errors.hpp"

namespace simvi {

// A list of coordinate blocks. Primal points and dual vectors share the
// layout but not the type, so a gradient can't be passed where a point is
// expected by accident.
template <class Tag>
class Blocks {
 public:
  Blocks() = default;
  explicit Blocks(std::vector<Eigen::VectorXd> blocks) : blocks_(std::move(blocks)) {}
  Blocks(std::initializer_list<Eigen::VectorXd> blocks) : blocks_(blocks) {}

  static Blocks zeros_like(const std::vector<Eigen::Index>& dims) {
    std::vector<Eigen::VectorXd> b;
    b.reserve(dims.size());
    for (auto n : dims) b.push_back(Eigen::VectorXd::Zero(n));
    return Blocks(std::move(b));
  }

  template <class Other>
  static Blocks zeros_like(const Blocks<Other>& shape) {
    return zeros_like(shape.dims());
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  Eigen::VectorXd& operator[](std::size_t i) { return blocks_[i]; }
  const Eigen::VectorXd& operator[](std::size_t i) const { return blocks_[i]; }
  const std::vector<Eigen::VectorXd>& blocks() const { return blocks_; }

  std::vector<Eigen::Index> dims() const {
    std::vector<Eigen::Index> d;
    d.reserve(blocks_.size());
    for (const auto& b : blocks_) d.push_back(b.size());
    return d;
  }

  Eigen::Index total_size() const {
    Eigen::Index n = 0;
    for (const auto& b : blocks_) n += b.size();
    return n;
  }

  template <class Other>
  bool same_shape(const Blocks<Other>& o) const {
    if (o.num_blocks() != num_blocks()) return false;
    for (std::size_t i = 0; i < num_blocks(); ++i)
      if (o[i].size() != blocks_[i].size()) return false;
    return true;
  }

  bool all_finite() const {
    for (const auto& b : blocks_)
      if (!b.allFinite()) return false;
    return true;
  }

  Eigen::VectorXd flatten() const {
    Eigen::VectorXd out(total_size());
    Eigen::Index off = 0;
    for (const auto& b : blocks_) {
      out.segment(off, b.size()) = b;
      off += b.size();
    }
    return out;
  }

  Blocks& operator+=(const Blocks& o) {
    check_shape(o);
    for (std::size_t i = 0; i < num_blocks(); ++i) blocks_[i] += o[i];
    return *this;
  }
  Blocks& operator-=(const Blocks& o) {
    check_shape(o);
    for (std::size_t i = 0; i < num_blocks(); ++i) blocks_[i] -= o[i];
    return *this;
  }
  Blocks& operator*=(double s) {
    for (auto& b : blocks_) b *= s;
    return *this;
  }

  friend Blocks operator+(Blocks a, const Blocks& b) { return a += b; }
  friend Blocks operator-(Blocks a, const Blocks& b) { return a -= b; }
  friend Blocks operator*(double s, Blocks a) { return a *= s; }
  friend Blocks operator*(Blocks a, double s) { return a *= s; }

 private:
  template <class Other>
  void check_shape(const Blocks<Other>& o) const {
    if (!same_shape(o)) throw ShapeError("block shapes differ");
  }

  std::vector<Eigen::VectorXd> blocks_;
};

struct PointTag {};
struct DualTag {};

using Point = Blocks<PointTag>;
using DualVector = Blocks<DualTag>;

// Reinterpret a layout; used where the math legitimately crosses spaces
// (e.g. a point difference fed to a linear map, or ∇w as a dual vector).
template <class To, class From>
Blocks<To> retag(const Blocks<From>& b) {
  return Blocks<To>(b.blocks());
}

inline double pairing(const DualVector& g, const Point& z) {
  if (!g.same_shape(z)) throw ShapeError("pairing: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < z.num_blocks(); ++i) s += g[i].dot(z[i]);
  return s;
}

}  // namespace simvi
