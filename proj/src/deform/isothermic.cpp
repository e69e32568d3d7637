#include "forge/deform.hpp"

#include "forge/errors.hpp"
#include "forge/geometry.hpp"
#include "forge/integrate.hpp"
#include "forge/parallel.hpp"
#include "forge/stencil.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace forge {
namespace {

struct PrincipalData {
  Mat G;
  Mat vectors;  // G-orthonormal eigenvectors, columns
  Vec kappa;
};

PrincipalData principal(const Chart& f, std::size_t k) {
  PrincipalData p;
  p.G = first_fundamental_form(f, k);
  const SecondFundForm s = second_fundamental_form(f, k);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(s.coefficients.front(), p.G);
  p.vectors = es.eigenvectors();
  p.kappa = es.eigenvalues();
  return p;
}

void fix_sign(Eigen::Ref<Vec> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
}

double extent(const Grid& grid) {
  double L = 0.0;
  for (const auto& iv : grid.box()) L = std::max(L, iv.hi - iv.lo);
  return L;
}

// (nabla_V V)^k = V^i d_i V^k + Gamma^k_ij V^i V^j.
Vec self_covariant(const Grid& grid, std::size_t k, const RealField& V, const MatrixAt& metric) {
  auto at = [&](std::size_t j) -> Vec { return V.column(j); };
  const Vec v = V.column(k);
  Vec out = Vec::Zero(v.size());
  for (int i = 0; i < grid.dim(); ++i) out += v[i] * fd_derivative(grid, k, i, at);
  const auto gamma = christoffel_symbols(grid, k, metric);
  for (int a = 0; a < grid.dim(); ++a) out[a] += v.dot(gamma[a] * v);
  return out;
}

}  // namespace

IsothermicFrame isothermic_frame(const Chart& f, std::optional<double> tol, std::optional<std::size_t> base_node) {
  const Grid& grid = f.grid();
  if (grid.dim() != 2) fail(ErrorCode::DimensionMismatch, "isothermic frame needs a surface chart");
  const std::size_t count = grid.node_count();
  std::vector<PrincipalData> pd(count);
  parallel_for(count, [&](std::size_t k) { pd[k] = principal(f, k); });

  double kmax = 0.0, gap = std::numeric_limits<double>::infinity();
  for (const auto& p : pd) {
    kmax = std::max(kmax, p.kappa.cwiseAbs().maxCoeff());
    gap = std::min(gap, std::abs(p.kappa[1] - p.kappa[0]));
  }
  const double r = grid.max_step() / extent(grid);
  const double threshold = tol.value_or(kmax * std::max(1e-6, r * r));
  if (!(gap > threshold))
    fail(ErrorCode::UmbilicPoint, "principal curvature gap " + std::to_string(gap) + " below " + std::to_string(threshold));

  IsothermicFrame fr;
  fr.base = base_node.value_or(grid.center_node());
  fr.min_gap = gap;
  fr.X = RealField(grid, 2);
  fr.Y = RealField(grid, 2);
  fr.kappa = RealField(grid, 2);

  // Breadth-first propagation from the base keeps the assignment and signs continuous.
  std::vector<char> seen(count, 0);
  std::deque<std::pair<std::size_t, std::size_t>> queue;  // (node, parent)
  {
    const auto& p = pd[fr.base];
    const int ix = std::abs(p.kappa[1]) >= std::abs(p.kappa[0]) ? 1 : 0;
    Vec X = p.vectors.col(ix), Y = p.vectors.col(1 - ix);
    fix_sign(X);
    fix_sign(Y);
    fr.X(fr.base) = X;
    fr.Y(fr.base) = Y;
    fr.kappa(fr.base) = Vec((Vec(2) << p.kappa[ix], p.kappa[1 - ix]).finished());
    seen[fr.base] = 1;
    queue.emplace_back(fr.base, fr.base);
  }
  while (!queue.empty()) {
    const std::size_t node = queue.front().first;
    queue.pop_front();
    for (int axis = 0; axis < 2; ++axis)
      for (int dir : {-1, 1}) {
        const int c = grid.coord(node, axis) + dir;
        if (c < 0 || c >= grid.resolution(axis)) continue;
        const std::size_t nb = dir > 0 ? node + grid.stride(axis) : node - grid.stride(axis);
        if (seen[nb]) continue;
        seen[nb] = 1;
        const auto& p = pd[nb];
        const Vec Xp = fr.X.column(node);
        const Vec Yp = fr.Y.column(node);
        const double a0 = (p.vectors.col(0).transpose() * p.G * Xp).value();
        const double a1 = (p.vectors.col(1).transpose() * p.G * Xp).value();
        const int ix = std::abs(a1) > std::abs(a0) ? 1 : 0;
        Vec X = p.vectors.col(ix), Y = p.vectors.col(1 - ix);
        if ((X.transpose() * p.G * Xp).value() < 0) X = -X;
        if ((Y.transpose() * p.G * Yp).value() < 0) Y = -Y;
        fr.X(nb) = X;
        fr.Y(nb) = Y;
        fr.kappa(nb) = Vec((Vec(2) << p.kappa[ix], p.kappa[1 - ix]).finished());
        queue.emplace_back(nb, node);
      }
  }

  const MatrixAt metric = metric_accessor(f);
  fr.eta_plus = RealField(grid, 2);
  fr.eta_minus = RealField(grid, 2);
  std::vector<double> ortho(count), cline(count);
  parallel_for(count, [&](std::size_t k) {
    fr.eta_plus(k) = self_covariant(grid, k, fr.X, metric);
    fr.eta_minus(k) = self_covariant(grid, k, fr.Y, metric);
    const Vec X = fr.X.column(k), Y = fr.Y.column(k);
    ortho[k] = std::abs((X.transpose() * pd[k].G * Y).value());
    const SecondFundForm s = second_fundamental_form(f, k);
    Vec axy = Vec::Zero(f.ambient_dim());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) axy += X[i] * Y[j] * s.at(i, j);
    cline[k] = axy.norm();
  });
  for (std::size_t k = 0; k < count; ++k) {
    fr.orthogonality = std::max(fr.orthogonality, ortho[k]);
    fr.curvature_line = std::max(fr.curvature_line, cline[k]);
  }
  return fr;
}

IsothermicDual isothermic_dual(const Chart& f, const DeformOptions& opt) {
  const Grid& grid = f.grid();
  IsothermicDual out;
  out.frame = isothermic_frame(f, {}, opt.base);
  const std::size_t base = out.frame.base;
  const std::size_t count = grid.node_count();
  const IsothermicFrame& fr = out.frame;
  std::vector<Mat> G(count);
  parallel_for(count, [&](std::size_t k) { G[k] = first_fundamental_form(f, k); });

  // d phi = p X^flat + q Y^flat with p = X(phi) = 2<eta_-, X>, q = Y(phi) = 2<eta_+, Y>.
  RealField dphi(grid, 1, 2);
  double dmax = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const Vec X = fr.X.column(k), Y = fr.Y.column(k);
    const double p = 2.0 * (fr.eta_minus.column(k).transpose() * G[k] * X).value();
    const double q = 2.0 * (fr.eta_plus.column(k).transpose() * G[k] * Y).value();
    dphi(k) = (p * G[k] * X + q * G[k] * Y).transpose();
    dmax = std::max(dmax, dphi.column(k).cwiseAbs().maxCoeff());
  }
  auto comp = [&](int i) { return [&, i](std::size_t k) { return dphi(k)(0, i); }; };
  out.integrability_residual = parallel_max(count, [&](std::size_t k) {
    if (!grid.is_interior(k)) return 0.0;
    return std::abs(fd_derivative(grid, k, 0, comp(1)) - fd_derivative(grid, k, 1, comp(0)));
  });
  const double int_tol = h2_threshold(grid, (1.0 + dmax) / extent(grid));
  if (out.integrability_residual > int_tol)
    fail(ErrorCode::NotIntegrable, "d(d phi) residual " + std::to_string(out.integrability_residual));

  const PathIntegral phi = integrate_sampled(grid, 1, [&](std::size_t k) -> Mat { return dphi(k); }, base, Vec::Zero(1));
  out.phi = RealField(grid, 1);
  out.Phi = RealField(grid, 2, 2);
  for (std::size_t k = 0; k < count; ++k) {
    out.phi.scalar(k) = phi.values(0, static_cast<Eigen::Index>(k));
    const Vec X = fr.X.column(k), Y = fr.Y.column(k);
    out.Phi(k) = std::exp(out.phi.scalar(k)) * (X * X.transpose() - Y * Y.transpose()) * G[k];
  }
  const Vec anchor = opt.anchor.value_or(f.sample(base));
  // With a closed-form Jacobian, Phi is interpolated between nodes and each
  // segment integrated by Gauss-Legendre.
  PathIntegral g =
      f.has_continuous_jacobian()
          ? integrate_continuous(
                grid, f.ambient_dim(),
                [&](const Vec& x) -> Mat { return f.jacobian_at(x) * interpolate_cubic(out.Phi, x); }, base, anchor)
          : integrate_sampled(
                grid, f.ambient_dim(), [&](std::size_t k) -> Mat { return jacobian_unchecked(f, k) * out.Phi(k); },
                base, anchor);
  out.path_residual = g.path_residual;
  double scale = 1.0;
  for (Eigen::Index c = 0; c < g.values.cols(); ++c) scale = std::max(scale, g.values.col(c).norm());
  const double tol = opt.path_tol.value_or(h2_threshold(grid, scale));
  if (!(out.path_residual <= tol))
    fail(ErrorCode::PathDependent, "dual path residual " + std::to_string(out.path_residual));
  std::vector<Mat> jac(count);
  parallel_for(count, [&](std::size_t k) { jac[k] = jacobian_unchecked(f, k) * out.Phi(k); });
  out.g = Chart::from_samples(f.name() + "-dual", grid, std::move(g.values), std::move(jac));
  return out;
}

}  // namespace forge
