#include "forge/deform.hpp"

#include "forge/errors.hpp"
#include "forge/geometry.hpp"
#include "forge/integrate.hpp"
#include "forge/parallel.hpp"

#include <cmath>
#include <numbers>

namespace forge {
namespace {

constexpr cdouble kI(0.0, 1.0);

// Columns d/du, d/dv of 2 Re(w f_z dz).
Mat weighted_form(const Mat& J, cdouble w) {
  const CVec fz = 0.5 * (J.col(0).cast<cdouble>() - kI * J.col(1).cast<cdouble>());
  const CVec gz = w * fz;
  Mat out(J.rows(), 2);
  out.col(0) = 2.0 * gz.real();
  out.col(1) = -2.0 * gz.imag();
  return out;
}

double max_abs(const ComplexField& F) {
  double m = 0.0;
  for (const auto& x : F.data()) m = std::max(m, std::abs(x));
  return m;
}

// Norm of the second fundamental form in an orthonormal frame.
double sff_norm(const Chart& f, std::size_t k) {
  const SecondFundForm s = second_fundamental_form(f, k);
  const Mat G = first_fundamental_form(f, k);
  const Mat Ginv = G.inverse();
  double total = 0.0;
  for (const Mat& B : s.coefficients) total += (Ginv * B * Ginv * B).trace();
  return std::sqrt(std::max(0.0, total));
}

void check_minimal_isothermal(const Chart& f, const DeformOptions& opt) {
  const Grid& grid = f.grid();
  const double Hmax = parallel_max(grid.node_count(), [&](std::size_t k) { return mean_curvature_vector(f, k).norm(); });
  const double kmax = parallel_max(grid.node_count(), [&](std::size_t k) { return sff_norm(f, k); });
  const double kappa = std::max(1.0, kmax);
  const double min_tol =
      opt.minimal_tol.value_or(10.0 * kappa * kappa * kappa * grid.max_step() * grid.max_step() + 1e-10);
  if (Hmax > min_tol)
    fail(ErrorCode::NotMinimal, "mean curvature " + std::to_string(Hmax) + " exceeds " + std::to_string(min_tol));
  const double iso_tol = opt.isothermal_tol.value_or(f.has_exact_jacobian() ? 1e-8 : h2_threshold(grid, 1.0));
  const double iso = parallel_max(grid.node_count(), [&](std::size_t k) {
    const Mat G = first_fundamental_form(f, k);
    const double E = 0.5 * (G(0, 0) + G(1, 1));
    return (std::abs(G(0, 0) - G(1, 1)) + 2 * std::abs(G(0, 1))) / E;
  });
  if (iso > iso_tol)
    fail(ErrorCode::NotIsothermal, "isothermal residual " + std::to_string(iso) + " exceeds " + std::to_string(iso_tol));
}

void check_holomorphic(const HolomorphicData& d, const DeformOptions& opt, const char* what) {
  const double tol = opt.holomorphic_tol.value_or(h2_threshold(d.values.grid(), 1.0 + max_abs(d.values)));
  if (d.cr_residual > tol)
    fail(ErrorCode::NotHolomorphic,
         std::string(what) + " Cauchy-Riemann residual " + std::to_string(d.cr_residual) + " exceeds " + std::to_string(tol));
}

HolomorphicData transform(const HolomorphicData& d, const std::function<cdouble(cdouble)>& op, const std::string& name) {
  const Grid& grid = d.values.grid();
  if (d.closed) {
    const auto inner = d.closed->value;
    return holomorphic_data(HolomorphicFunction{name, [inner, op](cdouble z) { return op(inner(z)); }}, grid);
  }
  ComplexField w(grid, 1);
  for (std::size_t k = 0; k < grid.node_count(); ++k) w.scalar(k) = op(d.values.scalar(k));
  return holomorphic_data(std::move(w));
}

}  // namespace

Deformation deform_weighted(const Chart& f, const HolomorphicData& w, const DeformOptions& opt) {
  const Grid& grid = f.grid();
  if (grid.dim() != 2) fail(ErrorCode::DimensionMismatch, "deformation needs a surface chart");
  if (!grid.same_shape(w.values.grid())) fail(ErrorCode::DimensionMismatch, "weight grid differs from chart grid");
  Deformation out;
  out.base = opt.base.value_or(grid.center_node());
  const Vec anchor = opt.anchor.value_or(f.sample(out.base));
  const int N = f.ambient_dim();
  PathIntegral pi;
  if (f.has_continuous_jacobian() && w.closed) {
    const auto wf = w.closed->value;
    pi = integrate_continuous(grid, N, [&](const Vec& x) { return weighted_form(f.jacobian_at(x), wf(cdouble(x[0], x[1]))); },
                              out.base, anchor);
  } else {
    pi = integrate_sampled(grid, N, [&](std::size_t k) { return weighted_form(jacobian_unchecked(f, k), w.at(k)); },
                           out.base, anchor);
  }
  out.path_residual = pi.path_residual;
  double scale = 1.0;
  for (Eigen::Index c = 0; c < pi.values.cols(); ++c) scale = std::max(scale, pi.values.col(c).norm());
  const double tol = opt.path_tol.value_or(h2_threshold(grid, scale));
  if (!(out.path_residual <= tol))
    fail(ErrorCode::PathDependent, "path residual " + std::to_string(out.path_residual) + " exceeds " + std::to_string(tol));
  std::vector<Mat> jac(grid.node_count());
  parallel_for(grid.node_count(), [&](std::size_t k) { jac[k] = weighted_form(jacobian_unchecked(f, k), w.at(k)); });
  out.g = Chart::from_samples(f.name() + "-deformed", grid, std::move(pi.values), std::move(jac));
  out.phi = RealField(grid, 1);
  for (std::size_t k = 0; k < grid.node_count(); ++k) out.phi.scalar(k) = std::log(std::abs(w.at(k)));
  return out;
}

Deformation deform_minimal(const Chart& f, const HolomorphicData& psi, const DeformOptions& opt) {
  if (f.domain_dim() != 2) fail(ErrorCode::DimensionMismatch, "deform_minimal needs a surface chart");
  check_minimal_isothermal(f, opt);
  check_holomorphic(psi, opt, "psi");
  const HolomorphicData w = transform(psi, [](cdouble p) { return std::exp(p); }, "exp-psi");
  Deformation out = deform_weighted(f, w, opt);
  for (std::size_t k = 0; k < f.grid().node_count(); ++k) out.phi.scalar(k) = psi.at(k).real();
  return out;
}

Deformation associated_family(const Chart& f, double theta, const DeformOptions& opt) {
  if (f.domain_dim() != 2) fail(ErrorCode::DimensionMismatch, "associated_family needs a surface chart");
  const cdouble psi(0.0, theta);
  return deform_minimal(f, holomorphic_data(HolomorphicFunction{"i-theta", [psi](cdouble) { return psi; }}, f.grid()), opt);
}

Deformation hyperbolic_isometric_deform(const Chart& f0, const HolomorphicData& A, const DeformOptions& opt) {
  const Grid& grid = f0.grid();
  if (grid.dim() != 2) fail(ErrorCode::DimensionMismatch, "hyperbolic deformation needs a surface profile");
  const int last = f0.ambient_dim() - 1;
  double amax = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double a = f0.sample(k)[last];
    if (!(a > 0)) fail(ErrorCode::NonPositiveHeight, "profile leaves the upper half-space");
    amax = std::max(amax, std::abs(A.at(k)));
  }
  check_minimal_isothermal(f0, opt);
  check_holomorphic(A, opt, "A");
  for (std::size_t k = 0; k < grid.node_count(); ++k)
    if (std::abs(A.at(k)) < 1e-10 * amax) fail(ErrorCode::ZeroCrossing, "A vanishes on the box");
  if (opt.check_profile) {
    double mismatch = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k)
      mismatch = std::max(mismatch, std::abs(A.at(k).real() - f0.sample(k)[last]));
    if (mismatch > 1e-8 * (1.0 + amax))
      fail(ErrorCode::ProfileMismatch, "Re A differs from the last profile coordinate by " + std::to_string(mismatch));
  }
  const HolomorphicData w = transform(A, [](cdouble a) { return -1.0 / (a * a); }, "minus-inverse-square");
  DeformOptions o = opt;
  o.base = opt.base.value_or(grid.center_node());
  if (!o.anchor) {
    Vec anchor = f0.sample(*o.base);
    anchor[last] = (1.0 / A.at(*o.base)).real();
    o.anchor = anchor;
  }
  Deformation out = deform_weighted(f0, w, o);
  out.g = out.g.renamed(f0.name() + "-hyperbolic");
  return out;
}

Deformation curve_deform(const Chart& alpha, double C) {
  const Grid& grid = alpha.grid();
  if (grid.dim() != 1) fail(ErrorCode::DimensionMismatch, "curve_deform needs a curve");
  if (!(C > 0)) fail(ErrorCode::InvalidArgument, "curve_deform needs C > 0");
  const int m = alpha.ambient_dim();
  for (std::size_t k = 0; k < grid.node_count(); ++k)
    if (!(alpha.sample(k)[m - 1] > 0)) fail(ErrorCode::NonPositiveHeight, "alpha_m must be positive");
  Vec anchor = alpha.sample(0);
  anchor[m - 1] = C / anchor[m - 1];
  PathIntegral pi;
  if (alpha.is_continuous() && alpha.has_continuous_jacobian()) {
    pi = integrate_continuous(grid, m, [&](const Vec& x) -> Mat {
      const double am = alpha.eval(x)[m - 1];
      return -C * alpha.jacobian_at(x) / (am * am);
    }, 0, anchor);
  } else {
    pi = integrate_sampled(grid, m, [&](std::size_t k) -> Mat {
      const double am = alpha.sample(k)[m - 1];
      return -C * jacobian_unchecked(alpha, k) / (am * am);
    }, 0, anchor);
  }
  Deformation out;
  out.base = 0;
  out.phi = RealField(grid, 1);
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double am = alpha.sample(k)[m - 1];
    out.phi.scalar(k) = std::log(C / (am * am));
  }
  std::vector<Mat> jac(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double am = alpha.sample(k)[m - 1];
    jac[k] = -C * jacobian_unchecked(alpha, k) / (am * am);
  }
  out.g = Chart::from_samples(alpha.name() + "-beta", grid, std::move(pi.values), std::move(jac));
  return out;
}

}  // namespace forge
