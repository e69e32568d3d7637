#include "forge/warped.hpp"

#include "forge/deform.hpp"
#include "forge/errors.hpp"
#include "forge/geometry.hpp"
#include "forge/parallel.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace forge {
namespace {

constexpr double kUnitTol = 1e-10;

void require_unit(const Vec& Y, const char* what) {
  if (std::abs(Y.norm() - 1.0) > kUnitTol) fail(ErrorCode::DomainViolation, std::string(what) + " is not on the unit sphere");
}

// Samples and node Jacobians of a factor chart, held in memory.
struct Factor {
  Mat values;
  std::vector<Mat> jac;
  std::size_t count = 0;
};

Factor materialize(const Chart& c) {
  Factor f;
  f.count = c.grid().node_count();
  f.values = c.samples();
  f.jac.resize(f.count);
  parallel_for(f.count, [&](std::size_t k) { f.jac[k] = jacobian_unchecked(c, k); });
  return f;
}

double relative_metric_gap(const Mat& Gf, const Mat& Gg, double rf, double rg) {
  const Mat hf = Gf / (rf * rf), hg = Gg / (rg * rg);
  return (hf - hg).norm() / hf.norm();
}

}  // namespace

Vec warped_rep_psi(const Vec& X, const Vec& Y) {
  const auto m = X.size();
  if (m < 1 || !(X[m - 1] > 0)) fail(ErrorCode::DomainViolation, "last profile coordinate must be positive");
  require_unit(Y, "sphere point");
  Vec out(m - 1 + Y.size());
  out.head(m - 1) = X.head(m - 1);
  out.tail(Y.size()) = X[m - 1] * Y;
  return out;
}

Vec warped_rep_psi2(const Vec& X, const Vec& Y1, const Vec& Y2) {
  const auto m = X.size();
  if (m < 2 || !(X[m - 2] > 0) || !(X[m - 1] > 0))
    fail(ErrorCode::DomainViolation, "last two profile coordinates must be positive");
  require_unit(Y1, "first sphere point");
  require_unit(Y2, "second sphere point");
  Vec out(m - 2 + Y1.size() + Y2.size());
  out.head(m - 2) = X.head(m - 2);
  out.segment(m - 2, Y1.size()) = X[m - 2] * Y1;
  out.tail(Y2.size()) = X[m - 1] * Y2;
  return out;
}

Chart warped_product(const WarpedProductSpec& spec, const Chart& profile, bool flip_last) {
  const bool triply = spec.kind == WarpedProductSpec::Kind::Triply;
  const std::size_t nsph = triply ? 2 : 1;
  if (spec.spheres.size() != nsph)
    fail(ErrorCode::InvalidArgument, triply ? "triply warped products need two sphere factors" : "one sphere factor expected");
  if (triply && profile.domain_dim() != 2)
    fail(ErrorCode::DimensionMismatch, "triply warped products need a surface profile (s1 + s2 = n - 2)");
  const int m = profile.ambient_dim();
  if (spec.m != 0 && spec.m != m) fail(ErrorCode::DimensionMismatch, "profile ambient dimension differs from m");
  const int lead = m - static_cast<int>(nsph);
  if (lead < 0) fail(ErrorCode::DimensionMismatch, "profile has too few coordinates");
  int N = lead;
  for (const Chart& s : spec.spheres) N += s.ambient_dim();
  if (spec.N != 0 && spec.N != N) fail(ErrorCode::DimensionMismatch, "sphere factors do not fill the ambient space");

  auto P = std::make_shared<Factor>(materialize(profile));
  for (std::size_t k = 0; k < P->count; ++k)
    for (int i = lead; i < m; ++i)
      if (!(P->values(i, static_cast<Eigen::Index>(k)) > 0))
        fail(ErrorCode::DomainViolation, "warping coordinate of the profile is not positive");
  std::vector<std::shared_ptr<Factor>> S;
  Grid grid = profile.grid();
  for (std::size_t i = 0; i < nsph; ++i) {
    S.push_back(std::make_shared<Factor>(materialize(spec.spheres[i])));
    for (std::size_t k = 0; k < S.back()->count; ++k)
      require_unit(S.back()->values.col(static_cast<Eigen::Index>(k)), "sphere factor");
    grid = grid.product(spec.spheres[i].grid());
  }
  const int pd = profile.domain_dim();
  std::vector<int> sd(nsph);
  for (std::size_t i = 0; i < nsph; ++i) sd[i] = spec.spheres[i].domain_dim();
  const std::size_t c_last = S.back()->count;
  const std::size_t c_first = S.front()->count;

  struct Split {
    std::size_t p, s[2];
  };
  auto split = [=](std::size_t node) {
    Split sp{};
    if (nsph == 1) {
      sp.s[0] = node % c_last;
      sp.p = node / c_last;
    } else {
      sp.s[1] = node % c_last;
      const std::size_t rest = node / c_last;
      sp.s[0] = rest % c_first;
      sp.p = rest / c_first;
    }
    return sp;
  };
  auto sphere_value = [=](const Split& sp, std::size_t i) -> Vec {
    Vec y = S[i]->values.col(static_cast<Eigen::Index>(sp.s[i]));
    if (flip_last && i + 1 == nsph) y = -y;
    return y;
  };

  Chart::Parts parts;
  parts.name = profile.name() + (flip_last ? "-warped-flipped" : "-warped");
  parts.grid = grid;
  parts.ambient = N;
  parts.sampler = [=](std::size_t node) -> Vec {
    const Split sp = split(node);
    const Vec X = P->values.col(static_cast<Eigen::Index>(sp.p));
    Vec out(N);
    out.head(lead) = X.head(lead);
    int row = lead;
    for (std::size_t i = 0; i < nsph; ++i) {
      const Vec y = sphere_value(sp, i);
      out.segment(row, y.size()) = X[lead + static_cast<int>(i)] * y;
      row += static_cast<int>(y.size());
    }
    return out;
  };
  parts.node_jacobian = [=](std::size_t node) -> Mat {
    const Split sp = split(node);
    const Vec X = P->values.col(static_cast<Eigen::Index>(sp.p));
    const Mat& J0 = P->jac[sp.p];
    int cols = pd;
    for (int d : sd) cols += d;
    Mat J = Mat::Zero(N, cols);
    J.block(0, 0, lead, pd) = J0.topRows(lead);
    int row = lead, col = pd;
    for (std::size_t i = 0; i < nsph; ++i) {
      const Vec y = sphere_value(sp, i);
      const double sign = (flip_last && i + 1 == nsph) ? -1.0 : 1.0;
      const int w = lead + static_cast<int>(i);
      J.block(row, 0, y.size(), pd) = y * J0.row(w);
      J.block(row, col, y.size(), sd[i]) = X[w] * sign * S[i]->jac[sp.s[i]];
      row += static_cast<int>(y.size());
      col += sd[i];
    }
    return J;
  };
  return Chart(std::move(parts));
}

ProfileCheck check_profiles(const Chart& f0, const Chart& g0, int positive) {
  const Grid& grid = f0.grid();
  if (!grid.same_shape(g0.grid()) || f0.ambient_dim() != g0.ambient_dim())
    fail(ErrorCode::DimensionMismatch, "profiles must share grid and ambient space");
  const int m = f0.ambient_dim();
  ProfileCheck out;
  std::vector<ProfileCheck> per(grid.node_count());
  parallel_for(grid.node_count(), [&](std::size_t k) {
    const Mat Jf = jacobian(f0, k), Jg = jacobian(g0, k);
    per[k].gauss = m > f0.domain_dim() ? plane_distance(tangent_plane(Jf), tangent_plane(Jg)) : 0.0;
    const Mat Gf = Jf.transpose() * Jf, Gg = Jg.transpose() * Jg;
    const Vec xf = f0.sample(k), xg = g0.sample(k);
    for (int i = m - positive; i < m; ++i)
      per[k].hyperbolic_metric = std::max(per[k].hyperbolic_metric, relative_metric_gap(Gf, Gg, xf[i], xg[i]));
  });
  for (const auto& p : per) {
    out.gauss = std::max(out.gauss, p.gauss);
    out.hyperbolic_metric = std::max(out.hyperbolic_metric, p.hyperbolic_metric);
  }
  return out;
}

namespace {

double profile_tolerance(const Chart& f0, const Chart& g0) {
  if (f0.has_exact_jacobian() && g0.has_exact_jacobian()) return 1e-8;
  return h2_threshold(f0.grid(), 1.0);
}

std::vector<int> trailing_axes(int first, int total) {
  std::vector<int> axes;
  for (int a = first; a < total; ++a) axes.push_back(a);
  return axes;
}

}  // namespace

DeformationPair build_pair_ordinary(const WarpedProductSpec& spec, const Chart& f0, const Chart& g0) {
  if (spec.kind != WarpedProductSpec::Kind::Ordinary) fail(ErrorCode::InvalidArgument, "ordinary spec expected");
  const ProfileCheck pc = check_profiles(f0, g0, 1);
  const double tol = profile_tolerance(f0, g0);
  if (pc.gauss > tol || pc.hyperbolic_metric > tol)
    fail(ErrorCode::ProfileMismatch, "profiles differ: gauss " + std::to_string(pc.gauss) + ", hyperbolic metric " +
                                         std::to_string(pc.hyperbolic_metric));
  DeformationPair pair;
  pair.f = warped_product(spec, f0);
  pair.g = warped_product(spec, g0);
  pair.fiber_axes = trailing_axes(f0.domain_dim(), pair.f.domain_dim());
  pair.info["profile_gauss"] = pc.gauss;
  pair.info["profile_hyperbolic_metric"] = pc.hyperbolic_metric;
  return pair;
}

DeformationPair build_pair_triply(const WarpedProductSpec& spec, const Chart& f0, const Chart& g0, const ComplexField& A) {
  if (spec.kind != WarpedProductSpec::Kind::Triply) fail(ErrorCode::InvalidArgument, "triply spec expected");
  const Grid& grid = f0.grid();
  const int m = f0.ambient_dim();
  if (grid.dim() != 2) fail(ErrorCode::DimensionMismatch, "triply warped profiles are surfaces");
  if (!grid.same_shape(A.grid())) fail(ErrorCode::DimensionMismatch, "A must live on the profile grid");
  if (m == 4) {
    // In R^4 the profile must be a holomorphic curve: (a1 + i a2) holomorphic or antiholomorphic.
    RealField lead(grid, 2);
    for (std::size_t k = 0; k < grid.node_count(); ++k) lead(k) = f0.sample(k).head(2);
    const ComplexField dz = wirtinger_z(lead);
    ComplexField w(grid, 1), wb(grid, 1);
    double scale = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      const Vec x = lead.column(k);
      w.scalar(k) = cdouble(x[0], x[1]);
      wb.scalar(k) = cdouble(x[0], -x[1]);
      scale = std::max(scale, dz.column(k).norm());
    }
    const double tol = h2_threshold(grid, 1.0 + scale);
    if (std::min(holomorphy_residual(w), holomorphy_residual(wb)) > tol)
      fail(ErrorCode::ProfileMismatch, "a profile in R^4 must be a holomorphic curve");
  }
  // calA from R o g0: its last two coordinates are (alpha, -abar).
  double calA = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const Vec y = g0.sample(k);
    const cdouble c(y[m - 2], -y[m - 1]);
    calA = std::max(calA, std::abs(c * A.scalar(k) - 1.0));
  }
  if (calA > 1e-8) fail(ErrorCode::HolomorphyViolation, "|calA A - 1| = " + std::to_string(calA));

  Chart rg0 = Chart::from_samples(
      g0.name() + "-reflected", grid,
      [&] {
        Mat s = g0.samples();
        s.row(m - 1) *= -1.0;
        return s;
      }(),
      [&] {
        std::vector<Mat> jac(grid.node_count());
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
          jac[k] = jacobian_unchecked(g0, k);
          jac[k].row(m - 1) *= -1.0;
        }
        return jac;
      }());
  ProfileCheck pc = check_profiles(f0, g0, 2);
  pc.gauss = m > 2 ? check_profiles(f0, rg0, 0).gauss : 0.0;
  const double tol = profile_tolerance(f0, g0);
  if (pc.gauss > tol || pc.hyperbolic_metric > tol)
    fail(ErrorCode::ProfileMismatch, "profiles differ: gauss " + std::to_string(pc.gauss) + ", warping " +
                                         std::to_string(pc.hyperbolic_metric));
  DeformationPair pair;
  pair.f = warped_product(spec, f0, false);
  pair.g = warped_product(spec, g0, true);
  pair.fiber_axes = trailing_axes(2, pair.f.domain_dim());
  pair.info["calA_residual"] = calA;
  pair.info["profile_gauss"] = pc.gauss;
  pair.info["profile_warping"] = pc.hyperbolic_metric;
  return pair;
}

}  // namespace forge
