#include "forge/charts.hpp"
#include "forge/deform.hpp"
#include "forge/errors.hpp"
#include "forge/geometry.hpp"
#include "forge/warped.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace forge;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

WarpedProductSpec ordinary(const Chart& sphere, int m, int N) {
  WarpedProductSpec s;
  s.kind = WarpedProductSpec::Kind::Ordinary;
  s.m = m;
  s.N = N;
  s.spheres = {sphere};
  return s;
}

// t (r cos s, r sin s, sqrt(1 - r^2)) over [t0, t1] x [s0, s1].
Chart circular_cone(int res, double r = 0.6) {
  const Grid line = uniform_grid({{1.0, 2.0}}, res);
  const Grid arc = uniform_grid({{0.0, 2.0}}, res);
  const Chart alpha = charts::line_curve(line, Vec::Zero(1), Vec::Ones(1));
  return warped_product(ordinary(charts::circle(arc, r), 1, 3), alpha);
}

}  // namespace

TEST_CASE("warped representation Psi") {
  const Vec Y = vec({0.6, 0.0, 0.8});
  CHECK((warped_rep_psi(vec({0, 0, 1}), Y) - vec({0, 0, 0.6, 0, 0.8})).norm() < 1e-15);
  const Vec a = warped_rep_psi(vec({0.3, 2.0}), Y), b = warped_rep_psi(vec({0.3, 5.0}), Y);
  CHECK((b.tail(3) - 2.5 * a.tail(3)).norm() < 1e-14);
  CHECK(code_of([&] { warped_rep_psi(vec({1, -1}), Y); }) == ErrorCode::DomainViolation);
  CHECK(code_of([&] { warped_rep_psi(vec({1, 1}), vec({1, 1, 0})); }) == ErrorCode::DomainViolation);
}

TEST_CASE("warped representation Psi2") {
  const Vec Y1 = vec({0.0, 1.0}), Y2 = vec({0.6, 0.8, 0.0});
  CHECK((warped_rep_psi2(vec({1, 1}), Y1, Y2) - vec({0, 1, 0.6, 0.8, 0})).norm() < 1e-15);
  const Vec out = warped_rep_psi2(vec({3, -4, 2, 5}), Y1, Y2);
  CHECK(std::abs(out.head(2).norm() - 5) < 1e-14);
  CHECK(std::abs(out.segment(2, 2).norm() - 2) < 1e-14);
  CHECK(std::abs(out.tail(3).norm() - 5) < 1e-14);
  CHECK(code_of([&] { warped_rep_psi2(vec({1, 0}), Y1, Y2); }) == ErrorCode::DomainViolation);
}

TEST_CASE("warped product metrics") {
  const Grid pg = uniform_grid({{-0.5, 0.5}, {0.5, 1.5}}, 17);
  const Grid sg = uniform_grid({{0.0, 1.5}}, 17);
  const Chart profile = Chart::from_function(
      "graph-profile", pg, 3, [](const Vec& x) { return vec({x[0], x[1], 1 + 0.2 * x[0] * x[0] + 0.3 * x[0] * x[1]}); },
      [](const Vec& x) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = J(1, 1) = 1;
        J(2, 0) = 0.4 * x[0] + 0.3 * x[1];
        J(2, 1) = 0.3 * x[0];
        return J;
      });
  const Chart ell = charts::circle(sg, 0.8);
  const Chart f = warped_product(ordinary(ell, 3, 5), profile);
  const Chart fs = f.samples_only();
  const double h2 = f.grid().max_step() * f.grid().max_step();
  for (std::size_t k = 0; k < f.grid().node_count(); k += 97) {
    const auto idx = f.grid().index(k);
    const std::size_t p = pg.node(std::vector<int>{idx[0], idx[1]});
    const std::size_t s = static_cast<std::size_t>(idx[2]);
    const double xm = profile.sample(p)[2];
    Mat expect = Mat::Zero(3, 3);
    expect.topLeftCorner(2, 2) = first_fundamental_form(profile, p);
    expect(2, 2) = xm * xm * first_fundamental_form(ell, s)(0, 0);
    CHECK((first_fundamental_form(f, k) - expect).norm() < 1e-12);
    CHECK((first_fundamental_form(fs, k) - expect).norm() < 20 * h2);
  }
}

TEST_CASE("triply warped product metric") {
  const Grid pg = uniform_grid({{-1, 1}, {-1, 1}}, 9);
  const Chart f0 = charts::graph(pg, 0, 0, 0);
  const Chart plane = Chart::from_function(
      "shifted-plane", pg, 2, [](const Vec& x) -> Vec { return x + Vec::Constant(2, 2.0); },
      [](const Vec&) -> Mat { return Mat::Identity(2, 2); });
  WarpedProductSpec s;
  s.kind = WarpedProductSpec::Kind::Triply;
  s.m = 2;
  s.N = 6;
  s.spheres = {charts::circle(uniform_grid({{0, 1}}, 9), 0.5), charts::circle(uniform_grid({{0, 1}}, 9), 0.7)};
  const Chart f = warped_product(s, plane);
  CHECK(f.ambient_dim() == 6);
  CHECK(f.domain_dim() == 4);
  for (std::size_t k = 0; k < f.grid().node_count(); k += 131) {
    const auto idx = f.grid().index(k);
    const Vec x = plane.sample(pg.node(std::vector<int>{idx[0], idx[1]}));
    Vec diag(4);
    diag << 1, 1, x[0] * x[0] * 0.25, x[1] * x[1] * 0.49;
    CHECK((first_fundamental_form(f, k) - Mat(diag.asDiagonal())).norm() < 1e-12);
  }
}

TEST_CASE("curve profile pair is a cone and its inversion") {
  const Chart f = circular_cone(17);
  const Grid line = uniform_grid({{1.0, 2.0}}, 17);
  const Chart alpha = charts::line_curve(line, Vec::Zero(1), Vec::Ones(1));
  const Chart beta = curve_deform(alpha, 1.0).g;
  const DeformationPair pair = build_pair_ordinary(ordinary(charts::circle(uniform_grid({{0.0, 2.0}}, 17), 0.6), 1, 3), alpha, beta);
  for (std::size_t k = 0; k < pair.f.grid().node_count(); ++k) {
    CHECK((pair.f.sample(k) - f.sample(k)).norm() < 1e-14);
    CHECK((pair.g.sample(k) - invert_sphere(Vec::Zero(3), 1.0, pair.f.sample(k))).norm() < 1e-12);
  }
  CHECK(pair.fiber_axes == std::vector<int>{1});
  // A profile not related by the curve rule is rejected.
  const Chart wrong = charts::line_curve(line, Vec::Constant(1, 0.5), Vec::Ones(1));
  CHECK(code_of([&] { build_pair_ordinary(ordinary(charts::circle(uniform_grid({{0.0, 2.0}}, 17), 0.6), 1, 3), alpha, wrong); }) ==
        ErrorCode::ProfileMismatch);
}

TEST_CASE("totally geodesic profile parallel to the boundary gives a cylinder") {
  const Grid pg = uniform_grid({{-0.5, 0.5}, {-0.5, 0.5}}, 17);
  const Chart f0 = Chart::from_function(
      "horizontal-plane", pg, 3, [](const Vec& x) { return vec({x[0], x[1], 1.0}); },
      [](const Vec&) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = J(1, 1) = 1;
        return J;
      });
  const HolomorphicData A = holomorphic_data(holomorphic_named("constant", {{"value", {1.0, 0.0}}}), pg);
  const Chart g0 = hyperbolic_isometric_deform(f0, A).g;
  const Chart ell = charts::circle(uniform_grid({{0.0, 2.0}}, 17), 0.6);
  const DeformationPair pair = build_pair_ordinary(ordinary(ell, 3, 5), f0, g0);
  for (std::size_t k = 0; k < pair.f.grid().node_count(); k += 7) {
    const Vec x = pair.f.sample(k);
    // A cylinder over the circle: the last three coordinates are l, independent of the profile point.
    CHECK(std::abs(x.tail(3).norm() - 1.0) < 1e-14);
    CHECK(std::abs(x.tail(3)[2] - 0.8) < 1e-14);
    CHECK(relative_nullity(pair.f, k, 1e-6).cols() >= 2);
  }
}

TEST_CASE("triply warped pair") {
  const Grid pg = uniform_grid({{-1, 1}, {-1, 1}}, 17);
  const Chart f0 = Chart::from_function(
      "shifted-plane", pg, 2, [](const Vec& x) -> Vec { return x + Vec::Constant(2, 2.0); },
      [](const Vec&) -> Mat { return Mat::Identity(2, 2); });
  const HolomorphicData A = holomorphic_data(holomorphic_named("affine", {{"a", {1, 0}}, {"b", {2, 2}}}), pg);
  DeformOptions o;
  o.check_profile = false;  // the real part of A is the first warping coordinate here
  Mat s(2, static_cast<Eigen::Index>(pg.node_count()));
  for (std::size_t k = 0; k < pg.node_count(); ++k) {
    const cdouble inv = 1.0 / A.at(k);
    s.col(static_cast<Eigen::Index>(k)) << inv.real(), -inv.imag();
  }
  std::vector<Mat> jac(pg.node_count());
  for (std::size_t k = 0; k < pg.node_count(); ++k) {
    const cdouble d = -1.0 / (A.at(k) * A.at(k));
    jac[k] = (Mat(2, 2) << d.real(), -d.imag(), -d.imag(), -d.real()).finished();
  }
  const Chart g0 = Chart::from_samples("g0", pg, s, jac);
  WarpedProductSpec spec;
  spec.kind = WarpedProductSpec::Kind::Triply;
  spec.m = 2;
  spec.N = 6;
  const Grid cg = uniform_grid({{0, 1.5}}, 9);
  spec.spheres = {charts::circle(cg, 0.6), charts::circle(cg, 0.8)};
  const DeformationPair pair = build_pair_triply(spec, f0, g0, A.values);
  CHECK(pair.info.at("calA_residual") < 1e-8);
  for (std::size_t k = 0; k < pair.f.grid().node_count(); k += 53) {
    const Mat Jf = jacobian(pair.f, k), Jg = jacobian(pair.g, k);
    CHECK(plane_distance(tangent_plane(Jf), tangent_plane(Jg)) < 1e-12);
    const Mat Gf = Jf.transpose() * Jf, Gg = Jg.transpose() * Jg;
    const double c = Gg.trace() / Gf.trace();
    CHECK((Gg - c * Gf).norm() < 1e-12 * Gg.norm());
  }
  // Perturbing g0 breaks calA = 1/A.
  const Chart bad = Chart::from_samples("bad", pg, s * 1.01, jac);
  CHECK(code_of([&] { build_pair_triply(spec, f0, bad, A.values); }) == ErrorCode::HolomorphyViolation);
}

TEST_CASE("four-dimensional triply profile must be a holomorphic curve") {
  const Grid pg = uniform_grid({{-0.5, 0.5}, {-0.5, 0.5}}, 17);
  // (u, -v, a, abar) with a + i abar = A is not holomorphic in its first pair.
  auto make = [&](double sign) {
    return Chart::from_function(
        "profile4", pg, 4,
        [sign](const Vec& x) { return vec({x[0], sign * x[1], x[0] + 2, x[1] + 2}); },
        [sign](const Vec&) {
          Mat J = Mat::Zero(4, 2);
          J(0, 0) = 1;
          J(1, 1) = sign;
          J(2, 0) = 1;
          J(3, 1) = 1;
          return J;
        });
  };
  WarpedProductSpec spec;
  spec.kind = WarpedProductSpec::Kind::Triply;
  spec.m = 4;
  spec.spheres = {charts::circle(uniform_grid({{0, 1}}, 9), 0.6), charts::circle(uniform_grid({{0, 1}}, 9), 0.8)};
  const HolomorphicData A = holomorphic_data(holomorphic_named("affine", {{"a", {1, 0}}, {"b", {2, 2}}}), pg);
  const Chart f0 = make(1.0);
  Mat s = f0.samples();
  for (std::size_t k = 0; k < pg.node_count(); ++k) {
    const cdouble inv = 1.0 / A.at(k);
    s(2, static_cast<Eigen::Index>(k)) = inv.real();
    s(3, static_cast<Eigen::Index>(k)) = -inv.imag();
  }
  const Chart wiggly = Chart::from_function(
      "wiggly", pg, 4, [](const Vec& x) { return vec({x[0] * x[0], x[1], x[0] + 2, x[1] + 2}); });
  CHECK(code_of([&] { build_pair_triply(spec, wiggly, Chart::from_samples("g0", pg, s), A.values); }) ==
        ErrorCode::ProfileMismatch);
}

TEST_CASE("cones from surfaces") {
  const Grid sg = uniform_grid({{0.3, 0.8}, {0.2, 0.7}}, 9);
  const Chart g = charts::holomorphic_curve(sg, {1, 2, 3});
  const SurfaceCone cone = cone_from_surface(g, {0.5, 1.5}, {0.0, 1.0}, 9, 9);
  CHECK(cone.circular);
  const Vec x = (Vec(4) << 0.5, 0.4, 0.7, 0.3).finished();
  Vec y = x;
  y[2] *= 1.8;
  CHECK((cone.F.eval(y) - 1.8 * cone.F.eval(x)).norm() < 1e-14);
  const ConeData cd = cone_vertex(cone.F, 2);
  CHECK(cd.vertex.norm() < 1e-8);
  CHECK(cd.residual < 1e-8);
  // FD Jacobian of F agrees with its closed form.
  for (std::size_t k = 0; k < cone.F.grid().node_count(); k += 211) {
    CHECK(cone.regular(k));
    CHECK((finite_difference_jacobian(cone.F, k) - cone.F.exact_jacobian(k)).norm() < 0.05);
  }
  auto Hmax = [&](int res) {
    const SurfaceCone c = cone_from_surface(charts::holomorphic_curve(uniform_grid({{0.3, 0.8}, {0.2, 0.7}}, res), {1, 2, 3}),
                                            {0.5, 1.5}, {0.0, 1.0}, res, res);
    double m = 0;
    for (std::size_t k = 0; k < c.F.grid().node_count(); ++k)
      if (c.F.grid().is_interior(k)) m = std::max(m, mean_curvature_vector(c.F, k).norm());
    return m;
  };
  // F is polynomial of low degree in each variable, so the stencils are exact.
  CHECK(Hmax(9) < 1e-9);
  CHECK(Hmax(17) < 1e-9);
}

TEST_CASE("sphere inversion") {
  const Vec c = vec({0.5, -1, 2});
  const double r = 1.7;
  const Vec p = vec({1.2, 0.3, -0.4});
  const Vec q = invert_sphere(c, r, p);
  CHECK(std::abs((q - c).norm() * (p - c).norm() - r * r) < 1e-12);
  const Vec on = c + r * vec({0.6, 0, 0.8});
  CHECK((invert_sphere(c, r, on) - on).norm() < 1e-14);
  CHECK((invert_sphere(c, r, q) - p).norm() < 1e-12);
  CHECK(code_of([&] { invert_sphere(c, r, c); }) == ErrorCode::AtCenter);
  // Numerical differential = r^2/|p-c|^2 times the reflection across (p - c)^perp.
  const Grid g = uniform_grid({{0.2, 0.6}, {0.1, 0.5}}, 65);
  const Chart s = charts::sphere(g, 0.9);
  const Chart inv = invert_chart(s, c, r);
  for (std::size_t k = 0; k < g.node_count(); k += 301) {
    const Mat fd = finite_difference_jacobian(inv, k);
    const Mat exact = inv.exact_jacobian(k);
    CHECK((fd - exact).norm() < 1e-3 * exact.norm());
  }
}

TEST_CASE("cone vertex") {
  const Chart f = circular_cone(17);
  const ConeData cd = cone_vertex(f, 0);
  CHECK(cd.vertex.norm() < 1e-10);
  const auto idx = f.grid().index(40);
  CHECK(std::abs(cd.gamma.scalar(40) + 1.0 / f.grid().coordinate(0, idx[0])) < 1e-10);
  const Vec shift = vec({1, -2, 3});
  const Chart moved = Chart::from_samples("moved", f.grid(), f.samples().colwise() + shift);
  CHECK((cone_vertex(moved, 0).vertex - shift).norm() < 1e-8);
  const Chart cyl = charts::cylinder(uniform_grid({{0, 2}, {0, 1}}, 17));
  CHECK(code_of([&] { cone_vertex(cyl, 1); }) == ErrorCode::NoCommonVertex);
  CHECK(code_of([&] { cone_vertex(cyl, 0); }) == ErrorCode::NotRuled);
}

TEST_CASE("ellipse of curvature") {
  const Grid g = uniform_grid({{0.2, 0.8}, {0.1, 0.7}}, 33);
  const CurvatureEllipse p = ellipse_of_curvature(charts::plane(g), 100, 1e-6);
  CHECK(p.is_circle);
  CHECK(p.major < 1e-12);
  const double tol = 1e-3;
  for (std::size_t k = 0; k < g.node_count(); k += 101)
    CHECK(ellipse_of_curvature(charts::holomorphic_curve(g, {2, 3}), k, tol).is_circle);
  for (std::size_t k = 0; k < g.node_count(); k += 101)
    CHECK_FALSE(ellipse_of_curvature(charts::graph(g, 1.0, 0.3, 0.2), k, tol).is_circle);
}

TEST_CASE("cone inversion pairs") {
  const Chart f = circular_cone(17);
  const DeformationPair pair = cone_inversion_pair(f, 0, 0.0);
  const double tb = std::tan(std::asin(0.6));
  for (std::size_t k = 0; k < f.grid().node_count(); k += 5) {
    const Vec y = pair.g.sample(k);
    // The image stays on the cone x^2 + y^2 = tan^2(b) z^2.
    CHECK(std::abs(std::hypot(y[0], y[1]) - tb * y[2]) < 1e-12);
    CHECK(plane_distance(gauss_plane(pair.f, k), gauss_plane(pair.g, k)) < 1e-12);
  }
  CHECK(code_of([&] { cone_inversion_pair(f, 0, 0.5); }) == ErrorCode::AssociatedFamilyUnavailable);
  const Chart cyl = charts::cylinder(uniform_grid({{0, 2}, {0, 1}}, 17));
  CHECK(code_of([&] { cone_inversion_pair(cyl, 1, 0.0); }) == ErrorCode::NotACone);

  const SurfaceCone cone = cone_from_surface(charts::holomorphic_curve(uniform_grid({{0.3, 0.8}, {0.2, 0.7}}, 9), {1, 2, 3}),
                                             {0.5, 1.5}, {0.0, 1.0}, 9, 9);
  const DeformationPair kp = cone_inversion_pair(cone.F, 2, kPi / 2, &cone);
  double lo = 1e300, hi = 0;
  for (std::size_t k = 0; k < kp.f.grid().node_count(); k += 17) {
    const Mat Jf = jacobian(kp.f, k), Jg = jacobian(kp.g, k);
    CHECK(plane_distance(tangent_plane(Jf), tangent_plane(Jg)) < 1e-9);
    const double c = (Jg.transpose() * Jg).trace() / (Jf.transpose() * Jf).trace();
    CHECK(((Jg.transpose() * Jg) - c * (Jf.transpose() * Jf)).norm() < 1e-9 * c * (Jf.transpose() * Jf).norm());
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi / lo > 1.5);
}
