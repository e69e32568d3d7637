#include "forge/deform.hpp"

#include "forge/errors.hpp"
#include "forge/geometry.hpp"
#include "forge/integrate.hpp"
#include "forge/parallel.hpp"
#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace forge {
namespace {

cdouble complex_param(const ChartParams& p, const std::string& key, cdouble fallback) {
  auto it = p.find(key);
  if (it == p.end() || it->second.empty()) return fallback;
  return {it->second[0], it->second.size() > 1 ? it->second[1] : 0.0};
}

void require_surface_grid(const Grid& grid, const char* what) {
  if (grid.dim() != 2) fail(ErrorCode::DimensionMismatch, std::string(what) + " needs a 2D grid");
}

}  // namespace

HolomorphicFunction holomorphic_named(const std::string& name, const ChartParams& params) {
  if (name == "z") return {name, [](cdouble z) { return z; }};
  if (name == "-iz") return {name, [](cdouble z) { return cdouble(0, -1) * z; }};
  if (name == "z^2" || name == "z2") return {"z^2", [](cdouble z) { return z * z; }};
  if (name == "exp") {
    const cdouble c = complex_param(params, "c", 1.0);
    return {name, [c](cdouble z) { return std::exp(c * z); }};
  }
  if (name == "constant") {
    const cdouble v = complex_param(params, "value", 0.0);
    return {name, [v](cdouble) { return v; }};
  }
  if (name == "affine") {
    const cdouble a = complex_param(params, "a", 1.0);
    const cdouble b = complex_param(params, "b", 0.0);
    return {name, [a, b](cdouble z) { return a * z + b; }};
  }
  fail(ErrorCode::UnknownExample, "unknown holomorphic function '" + name + "'");
}

HolomorphicData holomorphic_data(const HolomorphicFunction& fn, const Grid& grid) {
  require_surface_grid(grid, "holomorphic data");
  HolomorphicData d;
  d.values = ComplexField(grid, 1);
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const Vec x = grid.point(k);
    d.values.scalar(k) = fn.value(cdouble(x[0], x[1]));
  }
  if (!d.values.all_finite()) fail(ErrorCode::DomainViolation, "holomorphic function '" + fn.name + "' is not finite on the box");
  d.closed = fn;
  d.cr_residual = holomorphy_residual(d.values);
  return d;
}

HolomorphicData holomorphic_data(ComplexField samples) {
  require_surface_grid(samples.grid(), "holomorphic data");
  if (!samples.all_finite()) fail(ErrorCode::DomainViolation, "holomorphic samples are not finite");
  HolomorphicData d;
  d.values = std::move(samples);
  d.cr_residual = holomorphy_residual(d.values);
  return d;
}

ComplexField wirtinger_z(const RealField& field) {
  const Grid& grid = field.grid();
  require_surface_grid(grid, "wirtinger_z");
  ComplexField out(grid, field.rows() * field.cols());
  auto at = [&](std::size_t k) -> Vec { return field.column(k); };
  parallel_for(grid.node_count(), [&](std::size_t k) {
    const Vec du = fd_derivative(grid, k, 0, at);
    const Vec dv = fd_derivative(grid, k, 1, at);
    out(k) = 0.5 * (du.cast<cdouble>() - cdouble(0, 1) * dv.cast<cdouble>());
  });
  return out;
}

ComplexField wirtinger_z(const Chart& chart) {
  const Grid& grid = chart.grid();
  require_surface_grid(grid, "wirtinger_z");
  ComplexField out(grid, chart.ambient_dim());
  parallel_for(grid.node_count(), [&](std::size_t k) {
    const Mat J = jacobian_unchecked(chart, k);
    out(k) = 0.5 * (J.col(0).cast<cdouble>() - cdouble(0, 1) * J.col(1).cast<cdouble>());
  });
  return out;
}

double holomorphy_residual(const ComplexField& F) {
  const Grid& grid = F.grid();
  require_surface_grid(grid, "holomorphy_residual");
  auto at = [&](std::size_t k) -> CVec { return F.column(k); };
  return parallel_max(grid.node_count(), [&](std::size_t k) {
    if (!grid.is_interior(k)) return 0.0;
    const CVec du = fd_derivative(grid, k, 0, at);
    const CVec dv = fd_derivative(grid, k, 1, at);
    return (0.5 * (du + cdouble(0, 1) * dv)).cwiseAbs().maxCoeff();
  });
}

double h2_threshold(const Grid& grid, double scale, double factor) {
  double extent = 0.0;
  for (const auto& iv : grid.box()) extent = std::max(extent, iv.hi - iv.lo);
  const double r = grid.max_step() / extent;
  return factor * scale * r * r;
}

ConjugateResult harmonic_conjugate(const RealField& a, double offset, std::size_t base) {
  const Grid& grid = a.grid();
  require_surface_grid(grid, "harmonic_conjugate");
  if (a.rows() * a.cols() != 1) fail(ErrorCode::DimensionMismatch, "harmonic_conjugate needs a scalar field");
  auto at = [&](std::size_t k) { return a.scalar(k); };
  ConjugateResult out;
  double amax = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k) amax = std::max(amax, std::abs(a.scalar(k)));
  out.laplacian_residual = parallel_max(grid.node_count(), [&](std::size_t k) {
    if (!grid.is_interior(k)) return 0.0;
    return std::abs(fd_second_derivative(grid, k, 0, 0, at) + fd_second_derivative(grid, k, 1, 1, at));
  });
  double extent = 0.0;
  for (const auto& iv : grid.box()) extent = std::max(extent, iv.hi - iv.lo);
  if (out.laplacian_residual > h2_threshold(grid, (1.0 + amax) / (extent * extent)))
    fail(ErrorCode::NotHarmonic, "Laplacian residual " + std::to_string(out.laplacian_residual));
  OneFormAt form = [&](std::size_t k) {
    Mat w(1, 2);
    w(0, 0) = -fd_derivative(grid, k, 1, at);
    w(0, 1) = fd_derivative(grid, k, 0, at);
    return w;
  };
  const PathIntegral pi = integrate_sampled(grid, 1, form, base, Vec::Constant(1, offset));
  out.path_residual = pi.path_residual;
  out.conjugate = RealField(grid, 1);
  for (std::size_t k = 0; k < grid.node_count(); ++k) out.conjugate.scalar(k) = pi.values(0, static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace forge
