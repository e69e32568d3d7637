#include "forge/catalog.hpp"

#include "forge/charts.hpp"
#include "forge/deform.hpp"
#include "forge/errors.hpp"
#include "forge/warped.hpp"

#include <cmath>
#include <numbers>

namespace forge {
namespace {

constexpr double kPi = std::numbers::pi;

WarpedProductSpec ordinary_spec(Chart sphere, int m, int N) {
  WarpedProductSpec s;
  s.kind = WarpedProductSpec::Kind::Ordinary;
  s.m = m;
  s.N = N;
  s.spheres = {std::move(sphere)};
  return s;
}

DeformationPair make_pair(std::string id, Chart f, Chart g) {
  DeformationPair p;
  p.id = std::move(id);
  p.f = std::move(f);
  p.g = std::move(g);
  return p;
}

DeformationPair catenoid_helicoid(int res) {
  const Chart f = charts::catenoid(uniform_grid({{-0.5, 0.5}, {-0.5, 0.5}}, res));
  auto p = make_pair("catenoid-helicoid", f, associated_family(f, kPi / 2).g);
  p.info["theta"] = kPi / 2;
  return p;
}

DeformationPair hyperbolic_halfplane(int res) {
  const Grid grid = uniform_grid({{-1.0, 1.0}, {0.5, 2.0}}, res);
  const Chart f0 = charts::vertical_halfplane(grid);
  const Deformation d = hyperbolic_isometric_deform(f0, holomorphic_data(holomorphic_named("-iz"), grid));
  return make_pair("hyperbolic-halfplane", f0, d.g);
}

DeformationPair curve_cone_n3(int res) {
  const Chart alpha = charts::line_curve(uniform_grid({{1.0, 2.0}}, res), Vec::Zero(1), Vec::Ones(1));
  const Chart beta = curve_deform(alpha, 1.0).g;
  const Chart ell = charts::sphere_factor(uniform_grid({{0.6, 1.6}, {0.0, 1.5}}, res), 0.6);
  auto p = build_pair_ordinary(ordinary_spec(ell, 1, 4), alpha, beta);
  p.id = "curve-cone-n3";
  return p;
}

DeformationPair hyperbolic_warped_n3(int res) {
  const Grid grid = uniform_grid({{0.25, 1.25}, {0.5, 1.5}}, res);
  const Chart f0 = charts::vertical_halfplane(grid);
  const Chart g0 = hyperbolic_isometric_deform(f0, holomorphic_data(holomorphic_named("-iz"), grid)).g;
  const Chart ell = charts::circle(uniform_grid({{0.0, 2.0}}, res), 0.6);
  auto p = build_pair_ordinary(ordinary_spec(ell, 3, 5), f0, g0);
  p.id = "hyperbolic-warped-n3";
  return p;
}

DeformationPair triply_warped_r6(int res) {
  const Grid grid = uniform_grid({{-1.0, 1.0}, {-1.0, 1.0}}, res);
  const cdouble shift(2.0, 2.0);
  const Chart f0 = Chart::from_function(
      "shifted-plane", grid, 2, [](const Vec& x) -> Vec { return x + Vec::Constant(2, 2.0); },
      [](const Vec&) -> Mat { return Mat::Identity(2, 2); });
  // R o g0 = (Re 1/A, Im 1/A), so g0 = (Re 1/A, -Im 1/A) with A = z + 2 + 2i.
  const Chart g0 = Chart::from_function(
      "triply-profile", grid, 2,
      [shift](const Vec& x) -> Vec {
        const cdouble inv = 1.0 / (cdouble(x[0], x[1]) + shift);
        return (Vec(2) << inv.real(), -inv.imag()).finished();
      },
      [shift](const Vec& x) -> Mat {
        const cdouble A = cdouble(x[0], x[1]) + shift;
        const cdouble d = -1.0 / (A * A);
        return (Mat(2, 2) << d.real(), -d.imag(), -d.imag(), -d.real()).finished();
      });
  const HolomorphicData A = holomorphic_data(holomorphic_named("affine", {{"a", {1, 0}}, {"b", {2, 2}}}), grid);
  WarpedProductSpec spec;
  spec.kind = WarpedProductSpec::Kind::Triply;
  spec.m = 2;
  spec.N = 6;
  const Grid arc = uniform_grid({{0.0, 1.5}}, res);
  spec.spheres = {charts::circle(arc, 0.6), charts::circle(arc, 0.8)};
  auto p = build_pair_triply(spec, f0, g0, A.values);
  p.id = "triply-warped-r6";
  return p;
}

DeformationPair cylinder_dual(int res) {
  const Chart f = charts::cylinder(uniform_grid({{0.0, kPi}, {0.0, 1.0}}, res));
  return make_pair("cylinder-dual", f, isothermic_dual(f).g);
}

DeformationPair circular_cone_inversion(int res) {
  const Chart alpha = charts::line_curve(uniform_grid({{1.0, 2.0}}, res), Vec::Zero(1), Vec::Ones(1));
  const Chart ell = charts::circle(uniform_grid({{0.0, 2.0}}, res), 0.6);
  const Chart f = warped_product(ordinary_spec(ell, 1, 3), alpha).renamed("circular-cone");
  auto p = cone_inversion_pair(f, 0, 0.0);
  p.id = "circular-cone-inversion";
  return p;
}

DeformationPair kaehler_cone_inversion(int res) {
  const Chart surface = charts::holomorphic_curve(uniform_grid({{0.3, 0.8}, {0.2, 0.7}}, res), {1, 2, 3});
  const SurfaceCone cone = cone_from_surface(surface, {0.5, 1.5}, {0.0, 1.0}, res, res);
  auto p = cone_inversion_pair(cone.F, 2, kPi / 2, &cone);
  p.id = "kaehler-cone-inversion";
  return p;
}

std::vector<CatalogEntry> make_catalog() {
  std::vector<CatalogEntry> c;
  auto add = [&](std::string name, std::string summary, int n, int N, int res, std::array<int, 3> pattern,
                 bool everywhere, std::map<std::string, double> constants, double cluster,
                 DeformationPair (*build)(int)) {
    CatalogEntry e;
    e.name = std::move(name);
    e.summary = std::move(summary);
    e.domain_dim = n;
    e.ambient_dim = N;
    e.default_resolution = res;
    e.rank_pattern = pattern;
    e.pattern_everywhere = everywhere;
    e.constants = std::move(constants);
    e.cluster_constant = cluster;
    e.build = build;
    c.push_back(std::move(e));
  };
  // C = 3 x the largest residual / h^2 seen at resolutions 16, 32 and 64.
#include "catalog_constants.inc"
  return c;
}

}  // namespace

VerifyOptions CatalogEntry::verify_options() const {
  VerifyOptions o;
  o.constants = constants;
  o.cluster_constant = cluster_constant;
  return o;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = make_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  fail(ErrorCode::UnknownExample, "no catalog example named '" + name + "'");
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& e : catalog()) out.push_back(e.name);
  return out;
}

}  // namespace forge
