#pragma once

#include "forge/grid.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace forge {

using PointMap = std::function<Vec(const Vec&)>;
using JacobianMap = std::function<Mat(const Vec&)>;
using NodeSampler = std::function<Vec(std::size_t)>;
using NodeJacobian = std::function<Mat(std::size_t)>;

/// A map from a grid's parameter box into R^N, sampled at grid nodes.
///
/// A chart always answers `sample(node)`. Charts built from closed forms can
/// additionally be evaluated off-grid (`eval`) and may carry an exact Jacobian;
/// charts produced by integration are sample-only. Copies share the underlying
/// immutable data.
class Chart {
 public:
  struct Parts {
    std::string name;
    Grid grid;
    int ambient = 0;
    NodeSampler sampler;
    NodeJacobian node_jacobian;  // optional
    PointMap eval;               // optional
    JacobianMap jacobian;        // optional
  };

  Chart() = default;
  explicit Chart(Parts parts);

  static Chart from_function(std::string name, Grid grid, int ambient, PointMap eval,
                             JacobianMap jacobian = {});
  static Chart from_samples(std::string name, Grid grid, Mat samples);
  /// Samples together with the differential at every node, e.g. the one-form
  /// a chart was integrated from.
  static Chart from_samples(std::string name, Grid grid, Mat samples, std::vector<Mat> jacobians);

  const std::string& name() const;
  const Grid& grid() const;
  int domain_dim() const { return grid().dim(); }
  int ambient_dim() const;
  bool valid() const noexcept { return static_cast<bool>(impl_); }

  Vec sample(std::size_t node) const;
  /// All samples as an N x node_count matrix.
  Mat samples() const;

  bool has_exact_jacobian() const;
  Mat exact_jacobian(std::size_t node) const;

  bool is_continuous() const;
  Vec eval(const Vec& x) const;
  bool has_continuous_jacobian() const;
  Mat jacobian_at(const Vec& x) const;

  /// Caches every node sample; closed-form capabilities are kept.
  Chart materialized() const;
  /// Drops the exact Jacobian and off-grid evaluation, keeping the samples.
  Chart samples_only() const;
  /// Re-samples a continuous chart on another grid over the same kind of box.
  Chart on_grid(const Grid& grid) const;
  Chart renamed(std::string name) const;

  const Parts& parts() const;

 private:
  std::shared_ptr<const Parts> impl_;
};

}  // namespace forge
