#include "forge/warped.hpp"

#include "forge/deform.hpp"
#include "forge/errors.hpp"
#include "forge/geometry.hpp"
#include "forge/parallel.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

namespace forge {
namespace {

constexpr std::size_t kMaxLines = 4096;
constexpr std::size_t kMaxGammaNodes = std::size_t{1} << 20;

// First node of the li-th grid line along `axis`.
std::size_t line_start(const Grid& grid, int axis, std::size_t li) {
  std::size_t node = 0;
  for (int a = grid.dim() - 1; a >= 0; --a) {
    if (a == axis) continue;
    const auto r = static_cast<std::size_t>(grid.resolution(a));
    node += (li % r) * grid.stride(a);
    li /= r;
  }
  return node;
}

// Central differences of a continuous Jacobian, Richardson-extrapolated.
Mat jacobian_derivative(const Chart& g, const Vec& p, int axis, double delta) {
  auto D = [&](double d) {
    Vec a = p, b = p;
    a[axis] += d;
    b[axis] -= d;
    return Mat((g.jacobian_at(a) - g.jacobian_at(b)) / (2 * d));
  };
  return (4.0 * D(0.5 * delta) - D(delta)) / 3.0;
}

}  // namespace

ConeData cone_vertex(const Chart& f, int axis) {
  const Grid& grid = f.grid();
  if (axis < 0 || axis >= grid.dim()) fail(ErrorCode::InvalidArgument, "ruling axis out of range");
  const int N = f.ambient_dim();
  const int r = grid.resolution(axis);
  const std::size_t lines = grid.node_count() / static_cast<std::size_t>(r);
  const std::size_t stride = (lines + kMaxLines - 1) / kMaxLines;
  std::vector<std::size_t> picked;
  for (std::size_t li = 0; li < lines; li += stride) picked.push_back(li);

  struct Line {
    Vec c, d;
    double bend = 0.0;
  };
  std::vector<Line> L(picked.size());
  Vec lo = Vec::Constant(N, std::numeric_limits<double>::infinity()), hi = -lo;
  std::mutex bbox;
  parallel_for(picked.size(), [&](std::size_t i) {
    const std::size_t s = line_start(grid, axis, picked[i]);
    Mat pts(N, r);
    for (int j = 0; j < r; ++j) pts.col(j) = f.sample(s + static_cast<std::size_t>(j) * grid.stride(axis));
    const Vec c = pts.rowwise().mean();
    const Mat centered = pts.colwise() - c;
    Eigen::SelfAdjointEigenSolver<Mat> es(centered * centered.transpose());
    const Vec d = es.eigenvectors().col(N - 1);
    const Mat perp = centered - d * (d.transpose() * centered);
    L[i] = {c, d, perp.colwise().norm().maxCoeff()};
    std::lock_guard<std::mutex> lock(bbox);
    lo = lo.cwiseMin(pts.rowwise().minCoeff());
    hi = hi.cwiseMax(pts.rowwise().maxCoeff());
  });
  const double diag = (hi - lo).norm();
  const double tol = 1e-6 * diag;
  double bend = 0.0;
  for (const auto& l : L) bend = std::max(bend, l.bend);
  if (bend > tol + 1e-12) fail(ErrorCode::NotRuled, "grid lines bend by " + std::to_string(bend));

  Mat M = Mat::Zero(N, N);
  Vec b = Vec::Zero(N);
  for (const auto& l : L) {
    const Mat P = Mat::Identity(N, N) - l.d * l.d.transpose();
    M += P;
    b += P * l.c;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  if (es.eigenvalues()[0] < 1e-9 * static_cast<double>(L.size()))
    fail(ErrorCode::NoCommonVertex, "ruling lines are parallel");
  ConeData out;
  out.vertex = M.ldlt().solve(b);
  for (const auto& l : L) {
    const Vec off = out.vertex - l.c;
    out.spread = std::max(out.spread, (off - l.d * l.d.dot(off)).norm());
  }
  if (out.spread > tol + 1e-12) fail(ErrorCode::NoCommonVertex, "ruling lines miss a common point by " + std::to_string(out.spread));

  // gamma from h = f + gamma^{-1} f_t being the vertex.
  const bool store = grid.node_count() <= kMaxGammaNodes;
  if (store) out.gamma = RealField(grid, 1);
  const std::size_t count = grid.node_count();
  const std::size_t step = store ? 1 : std::max<std::size_t>(1, count / kMaxGammaNodes);
  std::vector<double> res((count + step - 1) / step, 0.0);
  parallel_for(res.size(), [&](std::size_t i) {
    const std::size_t k = i * step;
    const Vec ft = jacobian_unchecked(f, k).col(axis);
    const Vec x = f.sample(k);
    const double inv = (out.vertex - x).dot(ft) / ft.squaredNorm();
    if (store) out.gamma.scalar(k) = 1.0 / inv;
    res[i] = (x + inv * ft - out.vertex).norm();
  });
  for (double v : res) out.residual = std::max(out.residual, v);
  return out;
}

CurvatureEllipse ellipse_of_curvature(const Chart& g, std::size_t node, double tol) {
  if (g.domain_dim() != 2) fail(ErrorCode::DimensionMismatch, "ellipse of curvature is defined for surfaces");
  const Mat J = jacobian(g, node);
  const Mat G = J.transpose() * J;
  // Orthonormal frame in coordinates: e1 along d_u, e2 completes it.
  Vec e1 = Vec::Unit(2, 0) / std::sqrt(G(0, 0));
  Vec e2 = Vec::Unit(2, 1) - (e1.transpose() * G * Vec::Unit(2, 1)).value() * e1;
  e2 /= std::sqrt((e2.transpose() * G * e2).value());
  const SecondFundForm s = second_fundamental_form(g, node);
  auto alpha = [&](const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(g.ambient_dim());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out += x[i] * y[j] * s.at(i, j);
    return out;
  };
  const Vec a11 = alpha(e1, e1), a22 = alpha(e2, e2), a12 = alpha(e1, e2);
  CurvatureEllipse out;
  out.center = 0.5 * (a11 + a22);
  const Vec a = 0.5 * (a11 - a22);
  const Vec& b = a12;
  Mat ab(g.ambient_dim(), 2);
  ab << a, b;
  Eigen::JacobiSVD<Mat> svd(ab);
  out.major = svd.singularValues()[0];
  out.minor = svd.singularValues()[1];
  const double scale = std::max(a.norm(), b.norm());
  out.is_circle = scale < 1e-12 || (std::abs(a.dot(b)) <= tol * scale * scale && std::abs(a.norm() - b.norm()) <= tol * scale);
  return out;
}

Chart SurfaceCone::associated(double theta) const {
  const Grid grid = F.grid();
  return Chart::from_function(
      F.name() + "-associated", grid, F.ambient_dim(),
      [base = F, theta](const Vec& x) {
        Vec y = x;
        y[3] += theta;
        return base.eval(y);
      },
      [base = F, theta](const Vec& x) {
        Vec y = x;
        y[3] += theta;
        return base.jacobian_at(y);
      });
}

SurfaceCone cone_from_surface(const Chart& g, Interval radial, Interval angle, int radial_res, int angle_res) {
  if (g.domain_dim() != 2) fail(ErrorCode::DimensionMismatch, "cone_from_surface needs a surface");
  if (!g.is_continuous() || !g.has_continuous_jacobian())
    fail(ErrorCode::InvalidArgument, "cone_from_surface needs a closed-form surface");
  if (!(radial.lo > 0)) fail(ErrorCode::DomainViolation, "radial range must stay away from the vertex");
  SurfaceCone out;
  out.surface = g;
  const Grid grid = g.grid().product(Grid({radial, angle}, {radial_res, angle_res}));
  double extent = 0.0;
  for (const auto& iv : g.grid().box()) extent = std::max(extent, iv.hi - iv.lo);
  const double delta = 1e-3 * extent;
  const int N = g.ambient_dim();
  out.F = Chart::from_function(
      "cone-" + g.name(), grid, N,
      [g](const Vec& x) -> Vec {
        const Vec v = (Vec(2) << std::cos(x[3]), std::sin(x[3])).finished();
        return x[2] * (g.jacobian_at(x.head(2)) * v);
      },
      [g, delta, N](const Vec& x) -> Mat {
        const Vec p = x.head(2);
        const Vec v = (Vec(2) << std::cos(x[3]), std::sin(x[3])).finished();
        const Vec w = (Vec(2) << -std::sin(x[3]), std::cos(x[3])).finished();
        const Mat Jg = g.jacobian_at(p);
        Mat J(N, 4);
        for (int a = 0; a < 2; ++a) J.col(a) = x[2] * (jacobian_derivative(g, p, a, delta) * v);
        J.col(2) = Jg * v;
        J.col(3) = x[2] * (Jg * w);
        return J;
      });
  out.regular = [F = out.F](std::size_t node) { return has_full_rank(F.exact_jacobian(node)); };

  const Grid& sg = g.grid();
  const double tol = std::max(1e-6, h2_threshold(sg, 1.0));
  const std::size_t step = std::max<std::size_t>(1, sg.node_count() / 64);
  out.circular = true;
  for (std::size_t k = 0; k < sg.node_count(); k += step) {
    const CurvatureEllipse e = ellipse_of_curvature(g, k, tol);
    if (e.major > 0) out.circularity = std::max(out.circularity, (e.major - e.minor) / e.major);
    out.circular = out.circular && e.is_circle;
  }
  return out;
}

Vec invert_sphere(const Vec& center, double radius, const Vec& p) {
  const Vec d = p - center;
  const double r2 = d.squaredNorm();
  if (r2 <= 1e-28 * (1.0 + center.squaredNorm())) fail(ErrorCode::AtCenter, "inversion at its own center");
  return center + radius * radius * d / r2;
}

namespace {

Mat inversion_differential(const Vec& center, double radius, const Vec& p) {
  const Vec d = p - center;
  const double r2 = d.squaredNorm();
  const Vec u = d / std::sqrt(r2);
  const auto N = d.size();
  return radius * radius / r2 * (Mat::Identity(N, N) - 2.0 * u * u.transpose());
}

}  // namespace

Chart invert_chart(const Chart& f, const Vec& center, double radius) {
  if (center.size() != f.ambient_dim()) fail(ErrorCode::DimensionMismatch, "inversion center has wrong dimension");
  Chart::Parts p;
  p.name = f.name() + "-inverted";
  p.grid = f.grid();
  p.ambient = f.ambient_dim();
  p.sampler = [f, center, radius](std::size_t k) { return invert_sphere(center, radius, f.sample(k)); };
  if (f.has_exact_jacobian())
    p.node_jacobian = [f, center, radius](std::size_t k) -> Mat {
      return inversion_differential(center, radius, f.sample(k)) * f.exact_jacobian(k);
    };
  if (f.is_continuous()) p.eval = [f, center, radius](const Vec& x) { return invert_sphere(center, radius, f.eval(x)); };
  if (f.is_continuous() && f.has_continuous_jacobian())
    p.jacobian = [f, center, radius](const Vec& x) -> Mat {
      return inversion_differential(center, radius, f.eval(x)) * f.jacobian_at(x);
    };
  return Chart(std::move(p));
}

DeformationPair cone_inversion_pair(const Chart& f, int ruling_axis, double theta, const SurfaceCone* cone) {
  const bool rotated = std::abs(theta) > 1e-15;
  if (rotated && cone == nullptr)
    fail(ErrorCode::AssociatedFamilyUnavailable, "theta != 0 needs a minimal cone with an associated family");
  ConeData cd;
  try {
    cd = cone_vertex(f, ruling_axis);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotRuled || e.code() == ErrorCode::NoCommonVertex) fail(ErrorCode::NotACone, e.what());
    throw;
  }
  const Chart ftheta = rotated ? cone->associated(theta) : f;
  DeformationPair pair;
  pair.f = f;
  pair.g = invert_chart(ftheta, cd.vertex, 1.0);
  pair.info["vertex_norm"] = cd.vertex.norm();
  pair.info["vertex_spread"] = cd.spread;
  pair.info["theta"] = theta;
  return pair;
}

}  // namespace forge
