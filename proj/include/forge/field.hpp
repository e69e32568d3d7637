#pragma once

#include "forge/grid.hpp"

#include <cmath>
#include <vector>

namespace forge {

/// Samples aligned with a grid. Each node holds a rows x cols block (column
/// major); scalar fields are 1x1, vector fields k x 1.
template <class Scalar>
class GridField {
 public:
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GridField() = default;
  GridField(Grid grid, int rows, int cols = 1)
      : grid_(std::move(grid)), rows_(rows), cols_(cols),
        data_(grid_.node_count() * static_cast<std::size_t>(rows * cols), Scalar(0)) {}

  const Grid& grid() const noexcept { return grid_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t node_count() const noexcept { return grid_.node_count(); }
  bool empty() const noexcept { return data_.empty(); }

  Eigen::Map<Block> operator()(std::size_t node) {
    return Eigen::Map<Block>(data_.data() + node * block(), rows_, cols_);
  }
  Eigen::Map<const Block> operator()(std::size_t node) const {
    return Eigen::Map<const Block>(data_.data() + node * block(), rows_, cols_);
  }

  Column column(std::size_t node) const {
    return Eigen::Map<const Column>(data_.data() + node * block(), rows_ * cols_);
  }

  Scalar& scalar(std::size_t node) { return data_[node * block()]; }
  Scalar scalar(std::size_t node) const { return data_[node * block()]; }

  const std::vector<Scalar>& data() const noexcept { return data_; }
  std::vector<Scalar>& data() noexcept { return data_; }

  bool all_finite() const {
    for (const auto& x : data_)
      if (!std::isfinite(std::abs(x))) return false;
    return true;
  }

 private:
  std::size_t block() const { return static_cast<std::size_t>(rows_ * cols_); }

  Grid grid_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Scalar> data_;
};

using RealField = GridField<double>;
using ComplexField = GridField<cdouble>;

}  // namespace forge
