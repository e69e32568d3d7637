#include "forge/chart.hpp"

#include "forge/errors.hpp"

namespace forge {

Chart::Chart(Parts parts) {
  if (!parts.sampler) fail(ErrorCode::InvalidArgument, "chart needs a node sampler");
  if (parts.ambient < parts.grid.dim())
    fail(ErrorCode::DimensionMismatch, "ambient dimension smaller than domain dimension");
  impl_ = std::make_shared<const Parts>(std::move(parts));
}

Chart Chart::from_function(std::string name, Grid grid, int ambient, PointMap eval, JacobianMap jacobian) {
  Parts p;
  p.name = std::move(name);
  p.grid = grid;
  p.ambient = ambient;
  p.eval = eval;
  p.jacobian = jacobian;
  p.sampler = [grid, eval](std::size_t node) { return eval(grid.point(node)); };
  if (jacobian) p.node_jacobian = [grid, jacobian](std::size_t node) { return jacobian(grid.point(node)); };
  return Chart(std::move(p));
}

Chart Chart::from_samples(std::string name, Grid grid, Mat samples) {
  if (static_cast<std::size_t>(samples.cols()) != grid.node_count())
    fail(ErrorCode::DimensionMismatch, "sample count does not match grid");
  Parts p;
  p.name = std::move(name);
  p.grid = std::move(grid);
  p.ambient = static_cast<int>(samples.rows());
  auto data = std::make_shared<const Mat>(std::move(samples));
  p.sampler = [data](std::size_t node) -> Vec { return data->col(static_cast<Eigen::Index>(node)); };
  return Chart(std::move(p));
}

Chart Chart::from_samples(std::string name, Grid grid, Mat samples, std::vector<Mat> jacobians) {
  if (jacobians.size() != grid.node_count()) fail(ErrorCode::DimensionMismatch, "one Jacobian per node required");
  for (const Mat& J : jacobians)
    if (J.rows() != samples.rows() || J.cols() != grid.dim())
      fail(ErrorCode::DimensionMismatch, "Jacobian shape does not match the chart");
  Chart base = from_samples(std::move(name), std::move(grid), std::move(samples));
  Parts p = base.parts();
  auto data = std::make_shared<const std::vector<Mat>>(std::move(jacobians));
  p.node_jacobian = [data](std::size_t node) { return (*data)[node]; };
  return Chart(std::move(p));
}

const Chart::Parts& Chart::parts() const {
  if (!impl_) fail(ErrorCode::InvalidArgument, "empty chart");
  return *impl_;
}

const std::string& Chart::name() const { return parts().name; }
const Grid& Chart::grid() const { return parts().grid; }
int Chart::ambient_dim() const { return parts().ambient; }

Vec Chart::sample(std::size_t node) const { return parts().sampler(node); }

Mat Chart::samples() const {
  const auto& p = parts();
  Mat out(p.ambient, static_cast<Eigen::Index>(p.grid.node_count()));
  for (std::size_t k = 0; k < p.grid.node_count(); ++k) out.col(static_cast<Eigen::Index>(k)) = p.sampler(k);
  return out;
}

bool Chart::has_exact_jacobian() const { return static_cast<bool>(parts().node_jacobian); }
Mat Chart::exact_jacobian(std::size_t node) const { return parts().node_jacobian(node); }

bool Chart::is_continuous() const { return static_cast<bool>(parts().eval); }
Vec Chart::eval(const Vec& x) const {
  if (!is_continuous()) fail(ErrorCode::InvalidArgument, "chart '" + name() + "' is sample-only");
  return parts().eval(x);
}
bool Chart::has_continuous_jacobian() const { return static_cast<bool>(parts().jacobian); }
Mat Chart::jacobian_at(const Vec& x) const {
  if (!has_continuous_jacobian())
    fail(ErrorCode::InvalidArgument, "chart '" + name() + "' has no closed-form Jacobian");
  return parts().jacobian(x);
}

Chart Chart::materialized() const {
  Parts p = parts();
  auto data = std::make_shared<const Mat>(samples());
  p.sampler = [data](std::size_t node) -> Vec { return data->col(static_cast<Eigen::Index>(node)); };
  return Chart(std::move(p));
}

Chart Chart::samples_only() const { return from_samples(name(), grid(), samples()); }

Chart Chart::on_grid(const Grid& grid) const {
  const auto& p = parts();
  if (!p.eval) fail(ErrorCode::InvalidArgument, "chart '" + p.name + "' cannot be re-sampled");
  return from_function(p.name, grid, p.ambient, p.eval, p.jacobian);
}

Chart Chart::renamed(std::string name) const {
  Parts p = parts();
  p.name = std::move(name);
  return Chart(std::move(p));
}

}  // namespace forge
