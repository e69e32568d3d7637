#include "forge/geometry.hpp"

#include "forge/errors.hpp"
#include "forge/stencil.hpp"

#include <cmath>
#include <string>

namespace forge {

int TangentPlane::dim() const { return static_cast<int>(std::lround(projection.trace())); }

bool has_full_rank(const Mat& jacobian) {
  Eigen::JacobiSVD<Mat> svd(jacobian);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return false;
  return s[s.size() - 1] > kImmersionRankTol * s[0];
}

void require_full_rank(const Mat& jacobian, const char* what) {
  if (!has_full_rank(jacobian)) fail(ErrorCode::NonImmersion, std::string(what) + ": Jacobian lost rank");
}

Mat finite_difference_jacobian(const Chart& chart, std::size_t node) {
  const Grid& grid = chart.grid();
  Mat J(chart.ambient_dim(), grid.dim());
  auto at = [&](std::size_t k) { return chart.sample(k); };
  for (int a = 0; a < grid.dim(); ++a) J.col(a) = fd_derivative(grid, node, a, at);
  return J;
}

Mat jacobian_unchecked(const Chart& chart, std::size_t node) {
  return chart.has_exact_jacobian() ? chart.exact_jacobian(node) : finite_difference_jacobian(chart, node);
}

Mat jacobian(const Chart& chart, std::size_t node) {
  Mat J = jacobian_unchecked(chart, node);
  require_full_rank(J, chart.name().c_str());
  return J;
}

Mat first_fundamental_form(const Chart& chart, std::size_t node) {
  const Mat J = jacobian(chart, node);
  return J.transpose() * J;
}

TangentPlane tangent_plane(const Mat& jacobian) {
  require_full_rank(jacobian, "tangent plane");
  Eigen::HouseholderQR<Mat> qr(jacobian);
  const Mat Q = qr.householderQ() * Mat::Identity(jacobian.rows(), jacobian.cols());
  Mat P = Q * Q.transpose();
  P = 0.5 * (P + P.transpose());
  return {P};
}

TangentPlane gauss_plane(const Chart& chart, std::size_t node) { return tangent_plane(jacobian(chart, node)); }

double plane_distance(const TangentPlane& a, const TangentPlane& b) {
  if (a.projection.rows() != b.projection.rows() || a.dim() != b.dim())
    fail(ErrorCode::DimensionMismatch, "planes of different dimension or ambient space");
  return (a.projection - b.projection).norm();
}

Mat normal_frame(const TangentPlane& plane) {
  const int N = plane.ambient_dim();
  const int codim = N - plane.dim();
  Mat frame(N, codim);
  const Mat Q = Mat::Identity(N, N) - plane.projection;
  int found = 0;
  for (int axis = 0; axis < N && found < codim; ++axis) {
    Vec v = Q.col(axis);
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < found; ++k) v -= frame.col(k).dot(v) * frame.col(k);
    const double len = v.norm();
    if (len < 1e-6) continue;
    frame.col(found++) = v / len;
  }
  if (found < codim) fail(ErrorCode::DegenerateNormalFrame, "normal frame construction exhausted the axes");
  return frame;
}

std::vector<Vec> second_derivatives(const Chart& chart, std::size_t node) {
  const Grid& grid = chart.grid();
  const int n = grid.dim();
  auto at = [&](std::size_t k) { return chart.sample(k); };
  std::vector<Vec> h(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      h[i * n + j] = fd_second_derivative(grid, node, i, j, at);
      if (j != i) h[j * n + i] = h[i * n + j];
    }
  return h;
}

SecondFundForm second_fundamental_form(const Chart& chart, std::size_t node) {
  const Mat J = jacobian(chart, node);
  const TangentPlane plane = tangent_plane(J);
  const int n = chart.domain_dim();
  const int N = chart.ambient_dim();
  SecondFundForm sff;
  sff.n = n;
  sff.normal_frame = normal_frame(plane);
  const Mat normal_proj = Mat::Identity(N, N) - plane.projection;
  const auto h = second_derivatives(chart, node);
  sff.ambient.resize(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) sff.ambient[k] = normal_proj * h[k];
  sff.coefficients.assign(sff.codim(), Mat::Zero(n, n));
  for (int s = 0; s < sff.codim(); ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sff.coefficients[s](i, j) = sff.normal_frame.col(s).dot(sff.ambient[i * n + j]);
  return sff;
}

Vec mean_curvature_vector(const Chart& chart, std::size_t node) {
  const Mat J = jacobian(chart, node);
  const Mat Ginv = (J.transpose() * J).inverse();
  const SecondFundForm sff = second_fundamental_form(chart, node);
  const int n = sff.n;
  Vec H = Vec::Zero(chart.ambient_dim());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H += Ginv(i, j) * sff.at(i, j);
  return H / n;
}

Mat relative_nullity(const Chart& chart, std::size_t node, double tol) {
  const SecondFundForm sff = second_fundamental_form(chart, node);
  const int n = sff.n;
  if (sff.codim() == 0) return Mat::Identity(n, n);
  Mat stacked(sff.codim() * n, n);
  for (int s = 0; s < sff.codim(); ++s) stacked.block(s * n, 0, n, n) = sff.coefficients[s];
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

std::vector<Mat> christoffel_symbols(const Grid& grid, std::size_t node, const MatrixAt& metric) {
  const int n = grid.dim();
  std::vector<Mat> dG(n);
  for (int k = 0; k < n; ++k) dG[k] = fd_derivative(grid, node, k, metric);
  const Mat Ginv = metric(node).inverse();
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec lowered(n);
      for (int b = 0; b < n; ++b) lowered[b] = 0.5 * (dG[i](b, j) + dG[j](b, i) - dG[b](i, j));
      const Vec raised = Ginv * lowered;
      for (int a = 0; a < n; ++a) gamma[a](i, j) = raised[a];
    }
  return gamma;
}

MatrixAt metric_accessor(const Chart& chart) {
  return [chart](std::size_t node) -> Mat {
    const Mat J = jacobian_unchecked(chart, node);
    return J.transpose() * J;
  };
}

Alignment procrustes(const Mat& source, const Mat& target, bool allow_scale) {
  if (source.rows() != target.rows() || source.cols() != target.cols() || source.cols() == 0)
    fail(ErrorCode::DimensionMismatch, "procrustes needs equally shaped, non-empty point sets");
  const Vec cs = source.rowwise().mean();
  const Vec ct = target.rowwise().mean();
  const Mat S = source.colwise() - cs;
  const Mat T = target.colwise() - ct;
  Eigen::JacobiSVD<Mat> svd(T * S.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index d = source.rows();
  Vec signs = Vec::Ones(d);
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) signs[d - 1] = -1.0;
  Alignment al;
  al.rotation = svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
  const double var = S.squaredNorm();
  al.scale = (allow_scale && var > 0) ? svd.singularValues().dot(signs) / var : 1.0;
  al.translation = ct - al.scale * al.rotation * cs;
  const Mat residual = (al.scale * al.rotation * source).colwise() + al.translation - target;
  al.max_error = residual.colwise().norm().maxCoeff();
  al.rms_error = std::sqrt(residual.squaredNorm() / static_cast<double>(source.cols()));
  return al;
}

}  // namespace forge
