#include "forge/charts.hpp"
#include "forge/errors.hpp"
#include "forge/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace forge;

namespace {

Grid square(double lo, double hi, int res) { return uniform_grid({{lo, hi}, {lo, hi}}, res); }

std::size_t node_at(const Grid& g, std::vector<int> idx) { return g.node(idx); }

// Scales an existing closed-form chart.
Chart scaled(const Chart& c, double s) {
  return Chart::from_function(
      c.name(), c.grid(), c.ambient_dim(), [c, s](const Vec& x) -> Vec { return s * c.eval(x); },
      [c, s](const Vec& x) -> Mat { return s * c.jacobian_at(x); });
}

}  // namespace

TEST_CASE("jacobian of affine and critical-point charts") {
  const Grid g = square(-1, 1, 9);
  const Chart p = charts::plane(g);
  Mat expect = Mat::Zero(3, 2);
  expect(0, 0) = expect(1, 1) = 1;
  for (std::size_t k = 0; k < g.node_count(); k += 7) CHECK((jacobian(p, k) - expect).norm() < 1e-14);
  CHECK((finite_difference_jacobian(p, 0) - expect).norm() < 1e-12);

  const Chart para = charts::graph(g, 1, 1, 0);
  const std::size_t origin = node_at(g, {4, 4});
  CHECK((jacobian(para, origin) - expect).norm() < 1e-14);
  // FD is exact for quadratics with central stencils.
  CHECK((finite_difference_jacobian(para.samples_only(), origin) - expect).norm() < 1e-12);
}

TEST_CASE("catenoid jacobian at the origin") {
  const Grid g = square(-1, 1, 33);
  const Chart cat = charts::catenoid(g);
  const std::size_t origin = node_at(g, {16, 16});
  Mat expect = Mat::Zero(3, 2);
  expect(1, 0) = 1;
  expect(2, 1) = 1;
  CHECK((jacobian(cat, origin) - expect).norm() < 1e-14);
  CHECK((finite_difference_jacobian(cat, origin) - expect).norm() < 1e-3);
}

TEST_CASE("first fundamental forms") {
  const Grid g = square(-1, 1, 17);
  CHECK((first_fundamental_form(charts::plane(g), 5) - Mat::Identity(2, 2)).norm() < 1e-14);
  const Chart cat = charts::catenoid(g);
  for (int j = 0; j < 17; ++j) {
    const std::size_t k = node_at(g, {8, j});
    const double v = g.coordinate(1, j);
    const Mat G = first_fundamental_form(cat, k);
    CHECK(std::abs(G(0, 0) - std::cosh(v) * std::cosh(v)) < 1e-12);
    CHECK(std::abs(G(1, 1) - std::cosh(v) * std::cosh(v)) < 1e-12);
    CHECK(std::abs(G(0, 1)) < 1e-12);
  }
  const Chart big = scaled(cat, 2.0);
  CHECK((first_fundamental_form(big, 40) - 4 * first_fundamental_form(cat, 40)).norm() < 1e-12);
}

TEST_CASE("non-immersion is rejected") {
  const Grid g = square(-1, 1, 9);
  const Chart flat = Chart::from_function(
      "degenerate", g, 3, [](const Vec& x) { return Vec((Vec(3) << x[0], x[0], x[0]).finished()); });
  CHECK_THROWS_AS(jacobian(flat, 10), Error);
  try {
    jacobian(flat, 10);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonImmersion);
  }
}

TEST_CASE("gauss planes") {
  const Grid g = square(-1, 1, 33);
  const TangentPlane P = gauss_plane(charts::plane(g), 3);
  CHECK((P.projection - Vec((Vec(3) << 1, 1, 0).finished()).asDiagonal().toDenseMatrix()).norm() < 1e-14);
  const TangentPlane C = gauss_plane(charts::catenoid(g), node_at(g, {16, 16}));
  CHECK((C.projection - Vec((Vec(3) << 0, 1, 1).finished()).asDiagonal().toDenseMatrix()).norm() < 1e-14);

  // Basis reorder and sign flip give the same projector.
  const Mat J = jacobian(charts::enneper(g), 100);
  Mat J2(3, 2);
  J2.col(0) = -J.col(1);
  J2.col(1) = 3 * J.col(0) + J.col(1);
  CHECK(plane_distance(tangent_plane(J), tangent_plane(J2)) < 1e-13);
  const TangentPlane T = tangent_plane(J);
  CHECK(T.dim() == 2);
  CHECK((T.projection * T.projection - T.projection).norm() < 1e-10);
  CHECK((T.projection - T.projection.transpose()).norm() < 1e-12);
  CHECK(std::abs(T.projection.trace() - 2) < 1e-8);
}

TEST_CASE("plane distances") {
  Mat a = Mat::Zero(3, 3), b = Mat::Zero(3, 3);
  a(0, 0) = 1;
  b(1, 1) = 1;
  CHECK(plane_distance({a}, {a}) == 0.0);
  CHECK(std::abs(plane_distance({a}, {b}) - std::sqrt(2.0)) < 1e-15);
  Mat c = Mat::Identity(3, 3);
  CHECK_THROWS_AS(plane_distance({a}, {c}), Error);
  CHECK_THROWS_AS(plane_distance({a}, {Mat::Identity(2, 2) * 0.5}), Error);
}

TEST_CASE("second fundamental form of plane and sphere") {
  const Grid g = square(-1, 1, 17);
  const SecondFundForm flat = second_fundamental_form(charts::plane(g), 40);
  for (const auto& blk : flat.coefficients) CHECK(blk.norm() < 1e-12);

  const double r = 1.5;
  const Grid sg = uniform_grid({{0.6, 2.2}, {0.0, 1.5}}, 65);
  const Chart sph = charts::sphere(sg, r);
  for (std::size_t k : {sg.center_node(), std::size_t{70}, sg.node_count() - 3}) {
    const SecondFundForm s = second_fundamental_form(sph, k);
    REQUIRE(s.codim() == 1);
    const Mat G = first_fundamental_form(sph, k);
    // Shape operator G^{-1} B has both eigenvalues 1/r up to sign.
    const Mat S = G.inverse() * s.coefficients[0];
    Eigen::EigenSolver<Mat> es(S);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(std::abs(es.eigenvalues()[i].real()) - 1 / r) < 2e-3);
    // alpha(X, X) = -(1/r)|X|^2 * outward normal.
    const Vec outward = sph.sample(k) / r;
    for (int i = 0; i < 2; ++i) {
      const double lenX2 = G(i, i);
      CHECK((s.at(i, i) + lenX2 / r * outward).norm() < 2e-3 * lenX2);
    }
    CHECK((s.normal_frame.transpose() * s.normal_frame - Mat::Identity(1, 1)).norm() < 1e-8);
    CHECK((jacobian(sph, k).transpose() * s.normal_frame).norm() < 1e-8);
  }
}

TEST_CASE("second fundamental form is exactly symmetric") {
  const Grid g = uniform_grid({{0.3, 1.2}, {-0.5, 0.9}}, 21);
  for (const Chart& c : {charts::enneper(g), charts::torus(g), charts::graph(g, 1, -2, 0.7)})
    for (std::size_t k = 0; k < g.node_count(); k += 13) {
      const SecondFundForm s = second_fundamental_form(c, k);
      for (const Mat& blk : s.coefficients) CHECK((blk - blk.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("mean curvature") {
  const Grid g = square(-0.5, 0.5, 17);
  CHECK(mean_curvature_vector(charts::plane(g), 30).norm() < 1e-12);

  auto cat_h = [](int res) {
    const Grid gg = square(-0.5, 0.5, res);
    const Chart c = charts::catenoid(gg);
    double m = 0;
    for (std::size_t k = 0; k < gg.node_count(); ++k)
      if (gg.is_interior(k)) m = std::max(m, mean_curvature_vector(c, k).norm());
    return m;
  };
  const double h32 = cat_h(32), h64 = cat_h(64);
  const double step = 1.0 / 31;
  CHECK(h32 < 0.5 * step * step);
  CHECK(h32 / h64 > 3.5);
  CHECK(h32 / h64 < 4.5);

  const Grid sg = uniform_grid({{0.8, 2.0}, {0.0, 1.0}}, 64);
  const Chart sph = charts::sphere(sg, 2.0);
  for (std::size_t k = 0; k < sg.node_count(); k += 101)
    if (sg.is_interior(k)) CHECK(std::abs(mean_curvature_vector(sph, k).norm() - 0.5) < 1e-3);
}

TEST_CASE("relative nullity") {
  const Grid g = square(-1, 1, 17);
  CHECK(relative_nullity(charts::plane(g), 20, 1e-6).cols() == 2);
  const Chart cyl = charts::cylinder(uniform_grid({{0, 2}, {0, 1}}, 33));
  const Mat K = relative_nullity(cyl, 200, 1e-6);
  REQUIRE(K.cols() == 1);
  CHECK(std::abs(std::abs(K(1, 0)) - 1) < 1e-8);
  CHECK(relative_nullity(charts::catenoid(g), 100, 1e-6).cols() == 0);
}

TEST_CASE("gauss plane reproduces jacobian columns on every catalog chart") {
  const Grid g = uniform_grid({{0.3, 1.2}, {0.2, 0.9}}, 12);
  const Grid line = uniform_grid({{0.1, 1.0}}, 12);
  for (const auto& name : chart_names()) {
    const bool curve = name == "circle" || name == "line" || name == "arc";
    const Grid& grid = curve ? line : g;
    const Chart c = make_chart(name, grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      const Mat J = jacobian(c, k);
      const TangentPlane P = tangent_plane(J);
      for (int a = 0; a < J.cols(); ++a) CHECK((P.projection * J.col(a) - J.col(a)).norm() <= 1e-8 * J.col(a).norm());
      Eigen::SelfAdjointEigenSolver<Mat> es(J.transpose() * J);
      CHECK(es.eigenvalues().minCoeff() > 0);
    }
  }
}

TEST_CASE("finite-difference jacobian converges at second order") {
  for (const auto& name : {"catenoid", "enneper", "torus", "sphere"}) {
    auto err = [&](int res) {
      const Grid g = uniform_grid({{0.3, 1.1}, {0.2, 1.0}}, res);
      const Chart c = make_chart(name, g);
      double m = 0;
      for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.is_interior(k)) m = std::max(m, (finite_difference_jacobian(c, k) - c.exact_jacobian(k)).norm());
      return m;
    };
    const double ratio = err(33) / err(65);
    INFO(name);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("christoffel symbols of the sphere") {
  const Grid g = uniform_grid({{0.5, 1.5}, {0.0, 1.0}}, 65);
  const Chart s = charts::sphere(g);
  const std::size_t k = g.center_node();
  const double th = g.point(k)[0];
  const auto gam = christoffel_symbols(g, k, metric_accessor(s));
  // Gamma^theta_{phi phi} = -sin cos, Gamma^phi_{theta phi} = cot.
  CHECK(std::abs(gam[0](1, 1) + std::sin(th) * std::cos(th)) < 1e-3);
  CHECK(std::abs(gam[1](0, 1) - std::cos(th) / std::sin(th)) < 1e-3);
  CHECK(std::abs(gam[0](0, 0)) < 1e-10);
}

TEST_CASE("procrustes recovers a rigid motion") {
  Mat pts = Mat::Random(3, 20);
  const Mat R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(0.2, 0.5, 0.8).normalized()).toRotationMatrix();
  const Vec t = (Vec(3) << 1, -2, 0.5).finished();
  const Mat moved = (1.5 * R * pts).colwise() + t;
  const Alignment a = procrustes(pts, moved, true);
  CHECK(a.max_error < 1e-12);
  CHECK(std::abs(a.scale - 1.5) < 1e-12);
  CHECK(procrustes(pts, moved, false).max_error > 0.1);
}

TEST_CASE("chart json loader") {
  const Chart c = chart_from_json(R"({"name":"sphere","params":{"radius":2},"box":[[0.5,1.5],[0,1]],"resolution":9})");
  CHECK(c.ambient_dim() == 3);
  CHECK(std::abs(c.sample(0).norm() - 2) < 1e-14);
  CHECK_THROWS_AS(chart_from_json("{"), Error);
  CHECK_THROWS_AS(chart_from_json(R"({"name":"nope","box":[[0,1]],"resolution":9})"), Error);
  CHECK_THROWS_AS(chart_from_json(R"({"name":"plane","box":[[0,1],[1,1]],"resolution":9})"), Error);
}
