#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace forge {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr int kMaxGridDim = 8;
inline constexpr int kMinResolution = 8;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Tensor-product sample grid over a closed box. Nodes are linearised in
/// row-major order: the last axis varies fastest.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<Interval> box, std::vector<int> resolution);

  int dim() const noexcept { return static_cast<int>(box_.size()); }
  std::size_t node_count() const noexcept { return count_; }
  const std::vector<Interval>& box() const noexcept { return box_; }
  const std::vector<int>& resolution() const noexcept { return res_; }
  int resolution(int axis) const { return res_[axis]; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  double step(int axis) const { return step_[axis]; }
  double max_step() const;

  int coord(std::size_t node, int axis) const {
    return static_cast<int>((node / stride_[axis]) % static_cast<std::size_t>(res_[axis]));
  }
  std::size_t node(const std::array<int, kMaxGridDim>& idx) const;
  std::size_t node(const std::vector<int>& idx) const;
  std::vector<int> index(std::size_t node) const;

  double coordinate(int axis, int i) const { return box_[axis].lo + step_[axis] * i; }
  Vec point(std::size_t node) const;

  bool is_interior(std::size_t node) const;
  std::size_t center_node() const;

  /// Concatenates the axes of two grids (this grid's axes first).
  Grid product(const Grid& other) const;
  /// Same box with every resolution replaced.
  Grid with_resolution(int per_axis) const;

  bool same_shape(const Grid& other) const { return res_ == other.res_; }

 private:
  std::vector<Interval> box_;
  std::vector<int> res_;
  std::vector<std::size_t> stride_;
  std::vector<double> step_;
  std::size_t count_ = 0;
};

Grid uniform_grid(std::vector<Interval> box, int per_axis);

}  // namespace forge
