#pragma once

#include "forge/chart.hpp"
#include "forge/charts.hpp"
#include "forge/field.hpp"

#include <functional>
#include <optional>
#include <string>

namespace forge {

/// Closed-form holomorphic function of z = u + iv.
struct HolomorphicFunction {
  std::string name;
  std::function<cdouble(cdouble)> value;
};

/// Named closed forms: "z", "-iz", "z^2", "exp" (exp(c z), param c = [re, im]),
/// "constant" (param value = [re, im]), "affine" (a z + b).
HolomorphicFunction holomorphic_named(const std::string& name, const ChartParams& params = {});

/// Samples of a holomorphic function on a 2D grid with their Cauchy-Riemann residual.
struct HolomorphicData {
  ComplexField values;
  std::optional<HolomorphicFunction> closed;
  double cr_residual = 0.0;

  cdouble at(std::size_t node) const { return values.scalar(node); }
};

HolomorphicData holomorphic_data(const HolomorphicFunction& fn, const Grid& grid);
HolomorphicData holomorphic_data(ComplexField samples);

/// f_z = (f_u - i f_v) / 2 by the grid stencils.
ComplexField wirtinger_z(const RealField& field);
/// Same for a chart; uses the exact Jacobian when available.
ComplexField wirtinger_z(const Chart& chart);

/// Max over interior nodes and components of |dF/dzbar|.
double holomorphy_residual(const ComplexField& F);

/// 10 x scale x (h / L)^2, the default threshold for O(h^2) residuals on a grid.
double h2_threshold(const Grid& grid, double scale, double factor = 10.0);

struct ConjugateResult {
  RealField conjugate;
  double laplacian_residual = 0.0;
  double path_residual = 0.0;
};

/// Harmonic conjugate with d(abar) = -a_v du + a_u dv, abar(base) = offset.
ConjugateResult harmonic_conjugate(const RealField& a, double offset, std::size_t base);

struct DeformOptions {
  std::optional<std::size_t> base;  // default: grid centre
  std::optional<Vec> anchor;        // default: f(base)
  std::optional<double> minimal_tol;
  std::optional<double> isothermal_tol;
  std::optional<double> holomorphic_tol;
  std::optional<double> path_tol;
  bool check_profile = true;
};

struct Deformation {
  Chart g;
  RealField phi;  // conformal factor log|weight|; empty when not defined
  double path_residual = 0.0;
  std::size_t base = 0;
};

/// g with g_z = w f_z for a holomorphic weight w, realised as 2 Re of the
/// path integral. Does not check minimality.
Deformation deform_weighted(const Chart& f, const HolomorphicData& weight, const DeformOptions& opt = {});

/// g_z = e^psi f_z for minimal isothermal f.
Deformation deform_minimal(const Chart& f, const HolomorphicData& psi, const DeformOptions& opt = {});
Deformation associated_family(const Chart& f, double theta, const DeformOptions& opt = {});

/// Unit principal directions of the first shape operator. X carries the
/// larger |principal curvature| at the base node.
struct IsothermicFrame {
  RealField X, Y;                  // coordinate components, unit for the metric of f
  RealField eta_plus, eta_minus;   // nabla_X X and nabla_Y Y, coordinate components
  RealField kappa;                 // principal curvatures (2 x 1 per node)
  double orthogonality = 0.0;      // max |<X, Y>|
  double curvature_line = 0.0;     // max |alpha(X, Y)|
  double min_gap = 0.0;
  std::size_t base = 0;
};

IsothermicFrame isothermic_frame(const Chart& f, std::optional<double> tol = {}, std::optional<std::size_t> base = {});

struct IsothermicDual {
  Chart g;
  RealField phi;
  RealField Phi;  // e^phi T, 2 x 2 per node
  IsothermicFrame frame;
  double integrability_residual = 0.0;
  double path_residual = 0.0;
};

IsothermicDual isothermic_dual(const Chart& f, const DeformOptions& opt = {});

/// g = 2 Re of -(1/A^2) f_z dz for f in the upper half-space with A = a + i abar.
/// The last coordinate of g is anchored to Re(1/A) at the base node.
Deformation hyperbolic_isometric_deform(const Chart& f0, const HolomorphicData& A, const DeformOptions& opt = {});

/// beta = -C * integral of alpha' / alpha_m^2 from the left endpoint, anchored
/// so that beta_m = C / alpha_m there and the other coordinates start at alpha.
Deformation curve_deform(const Chart& alpha, double C);

}  // namespace forge
