#include "forge/grid.hpp"

#include "forge/errors.hpp"

#include <algorithm>
#include <string>

namespace forge {

Grid::Grid(std::vector<Interval> box, std::vector<int> resolution)
    : box_(std::move(box)), res_(std::move(resolution)) {
  if (box_.empty() || box_.size() != res_.size())
    fail(ErrorCode::DimensionMismatch, "grid box and resolution must have the same non-zero length");
  if (box_.size() > static_cast<std::size_t>(kMaxGridDim))
    fail(ErrorCode::InvalidArgument, "grid dimension exceeds " + std::to_string(kMaxGridDim));
  const int n = dim();
  stride_.assign(n, 1);
  step_.assign(n, 0.0);
  for (int a = n - 1; a >= 0; --a) {
    if (res_[a] < kMinResolution)
      fail(ErrorCode::InvalidArgument, "resolution must be at least 8 on every axis");
    if (!(box_[a].hi > box_[a].lo))
      fail(ErrorCode::InvalidArgument, "degenerate box interval on axis " + std::to_string(a));
    step_[a] = (box_[a].hi - box_[a].lo) / (res_[a] - 1);
    if (a < n - 1) stride_[a] = stride_[a + 1] * static_cast<std::size_t>(res_[a + 1]);
  }
  count_ = stride_[0] * static_cast<std::size_t>(res_[0]);
}

double Grid::max_step() const { return *std::max_element(step_.begin(), step_.end()); }

std::size_t Grid::node(const std::array<int, kMaxGridDim>& idx) const {
  std::size_t lin = 0;
  for (int a = 0; a < dim(); ++a) lin += stride_[a] * static_cast<std::size_t>(idx[a]);
  return lin;
}

std::size_t Grid::node(const std::vector<int>& idx) const {
  std::size_t lin = 0;
  for (int a = 0; a < dim(); ++a) lin += stride_[a] * static_cast<std::size_t>(idx[a]);
  return lin;
}

std::vector<int> Grid::index(std::size_t node) const {
  std::vector<int> idx(dim());
  for (int a = 0; a < dim(); ++a) idx[a] = coord(node, a);
  return idx;
}

Vec Grid::point(std::size_t node) const {
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = coordinate(a, coord(node, a));
  return x;
}

bool Grid::is_interior(std::size_t node) const {
  for (int a = 0; a < dim(); ++a) {
    const int c = coord(node, a);
    if (c == 0 || c == res_[a] - 1) return false;
  }
  return true;
}

std::size_t Grid::center_node() const {
  std::vector<int> idx(dim());
  for (int a = 0; a < dim(); ++a) idx[a] = res_[a] / 2;
  return node(idx);
}

Grid Grid::product(const Grid& other) const {
  auto box = box_;
  box.insert(box.end(), other.box_.begin(), other.box_.end());
  auto res = res_;
  res.insert(res.end(), other.res_.begin(), other.res_.end());
  return Grid(std::move(box), std::move(res));
}

Grid Grid::with_resolution(int per_axis) const {
  return Grid(box_, std::vector<int>(box_.size(), per_axis));
}

Grid uniform_grid(std::vector<Interval> box, int per_axis) {
  const auto n = box.size();
  return Grid(std::move(box), std::vector<int>(n, per_axis));
}

}  // namespace forge
