#pragma once

#include "forge/chart.hpp"
#include "forge/field.hpp"
#include "forge/pair.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace forge {

/// (x_1, ..., x_{m-1}, x_m Y). Throws DomainViolation unless x_m > 0 and |Y| = 1.
Vec warped_rep_psi(const Vec& X, const Vec& Y);
/// (x_1, ..., x_{m-2}, x_{m-1} Y1, x_m Y2).
Vec warped_rep_psi2(const Vec& X, const Vec& Y1, const Vec& Y2);

struct WarpedProductSpec {
  enum class Kind { Ordinary, Triply };
  Kind kind = Kind::Ordinary;
  int m = 0;
  int N = 0;
  std::vector<Chart> spheres;  // one factor (ordinary) or two (triply), into unit spheres
};

/// Psi o (profile x spheres) on the product grid (profile axes first). With
/// `flip_last`, the last sphere factor is replaced by its antipodal image.
/// Samples and Jacobians are evaluated lazily from the factors.
Chart warped_product(const WarpedProductSpec& spec, const Chart& profile, bool flip_last = false);

/// f = Psi(f0 x l), g = Psi(g0 x l). Throws ProfileMismatch unless f0, g0
/// share Gauss lines/planes and the hyperbolic metric.
DeformationPair build_pair_ordinary(const WarpedProductSpec& spec, const Chart& f0, const Chart& g0);

/// f = Psi(f0 x l1 x l2), g = Psi(g0 x l1 x (-l2)). `A` is a + i abar of f0,
/// sampled on the profile grid. Throws HolomorphyViolation if |calA A - 1|
/// exceeds 1e-8 and ProfileMismatch if R o g0 fails the profile checks.
DeformationPair build_pair_triply(const WarpedProductSpec& spec, const Chart& f0, const Chart& g0, const ComplexField& A);

/// Profile-level checks shared by the builders: max Gauss-plane distance and
/// max relative hyperbolic-metric mismatch.
struct ProfileCheck {
  double gauss = 0.0;
  double hyperbolic_metric = 0.0;
};
ProfileCheck check_profiles(const Chart& f0, const Chart& g0, int positive_coordinates = 1);

// --- cones -----------------------------------------------------------------

struct ConeData {
  Vec vertex;
  RealField gamma;  // filled only when the grid is small enough to hold it
  double residual = 0.0;
  double spread = 0.0;
};

/// Least-squares common point of the grid lines along `ruling_axis`.
ConeData cone_vertex(const Chart& f, int ruling_axis);

struct CurvatureEllipse {
  Vec center;
  bool is_circle = false;
  double major = 0.0;
  double minor = 0.0;
};
CurvatureEllipse ellipse_of_curvature(const Chart& g, std::size_t node, double tol = 1e-6);

/// F(p, t, s) = t J_g(p) (cos s, sin s) over grid(g) x [t0, t1] x [s0, s1].
struct SurfaceCone {
  Chart surface;
  Chart F;
  bool circular = false;       // ellipse of curvature is a circle at every sampled node
  double circularity = 0.0;    // worst relative circle defect
  std::function<bool(std::size_t)> regular;

  /// Associated family member F(p, t, s + theta).
  Chart associated(double theta) const;
};

SurfaceCone cone_from_surface(const Chart& g, Interval radial, Interval angle, int radial_res, int angle_res);

/// center + r^2 (p - center) / |p - center|^2. Throws AtCenter.
Vec invert_sphere(const Vec& center, double radius, const Vec& p);
/// Composition of a chart with the inversion, with the exact differential
/// when the chart has one.
Chart invert_chart(const Chart& f, const Vec& center, double radius);

/// g = I o f_theta with the unit sphere at the common vertex. theta != 0
/// needs `cone` (an associated family); otherwise AssociatedFamilyUnavailable.
DeformationPair cone_inversion_pair(const Chart& f, int ruling_axis, double theta, const SurfaceCone* cone = nullptr);

}  // namespace forge
