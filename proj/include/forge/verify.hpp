#pragma once

#include "forge/chart.hpp"
#include "forge/field.hpp"
#include "forge/geometry.hpp"
#include "forge/pair.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace forge {

/// Nodes at which residuals are evaluated. Small grids use every node at least
/// `margin` away from the faces, and at least `fraction` of each axis extent;
/// larger grids use a per-axis strided subset that keeps the first and last
/// admissible index on each axis.
std::vector<std::size_t> sample_nodes(const Grid& grid, std::size_t max_nodes, int margin, double fraction = 0.0);

struct PhiResult {
  Mat Phi;
  double residual = 0.0;  // |J_f Phi - J_g| / |J_g|
};

/// Least-squares solution of J_f Phi = J_g from stencil Jacobians of both
/// charts. Throws GaussMapMismatch when the residual exceeds tol.
PhiResult phi_tensor(const Chart& f, const Chart& g, std::size_t node, double tol);

struct ConformalResult {
  double phi = 0.0;
  double residual = 0.0;  // |G_g - e^{2 phi} G_f| / |G_f|
};

/// phi = log det(G_f^{-1} G_g) / 2n. Throws NotConformal above tol.
ConformalResult conformal_factor(const Chart& f, const Chart& g, std::size_t node, double tol);

/// Node-local views of the quantities extracted from a pair, all computed
/// from stencil Jacobians of the samples.
struct PairFields {
  MatrixAt jf, jg;
  MatrixAt metric_f;
  MatrixAt Phi;
  MatrixAt T;
  ScalarAt phi;
};

PairFields pair_fields(const Chart& f, const Chart& g);

/// Matrix field accessor over a RealField of n x n blocks.
MatrixAt field_accessor(const RealField& field);
ScalarAt scalar_accessor(const RealField& field);

/// max_{nodes, i<j} |(nabla_i Phi) d_j - (nabla_j Phi) d_i| in f's metric, with
/// Christoffel symbols from stencils of f's metric. Nodes should keep a
/// margin of two from the faces.
double codazzi_residual(const Chart& f, const MatrixAt& Phi, const std::vector<std::size_t>& nodes);
double codazzi_residual(const Chart& f, const RealField& Phi);

/// max_{nodes, i, j} |alpha_f(d_i, Phi d_j) - alpha_f(Phi d_i, d_j)|.
double commute_residual(const Chart& f, const MatrixAt& Phi, const std::vector<std::size_t>& nodes);
double commute_residual(const Chart& f, const RealField& Phi);

/// max_{nodes} |T^t G T - G| / |G| with G = metric of f.
double orthogonality_residual(const Chart& f, const MatrixAt& T, const std::vector<std::size_t>& nodes);

/// max_{nodes, i, j} |(nabla_i T) d_j - (d_j phi) T d_i + G_ij T grad phi| in
/// f's metric. Throws NotOrthogonal when T fails orthogonality by more than
/// orthogonality_tol at any of the nodes.
double vergasta_residual(const Chart& f, const MatrixAt& T, const ScalarAt& phi,
                         const std::vector<std::size_t>& nodes, double orthogonality_tol);
double vergasta_residual(const Chart& f, const RealField& T, const RealField& phi, double orthogonality_tol);

/// max_{nodes, i, j} |alpha_g(d_i, d_j) - alpha_f(Phi d_i, d_j)|, both in the
/// normal space of f.
double second_form_residual(const Chart& f, const Chart& g, const MatrixAt& Phi,
                            const std::vector<std::size_t>& nodes);

/// Spectrum of T at one node, clustered into L+, L- and conjugate pairs.
struct SpectralEntry {
  CVec eigenvalues;
  std::array<int, 3> ranks{0, 0, 0};  // (dim L+, dim L-, dim L_c)
  CMat plus, minus, complex;          // eigenvectors in coordinates, one cluster per block
  double modulus_deviation = 0.0;     // max ||lambda| - 1|
  double bilinear_residual = 0.0;     // max |<Z, W>| over eigenvectors with lambda mu != 1
};

/// T must be orthogonal for the metric G. Eigenvectors are normalised in G.
/// Throws UnpairedComplexEigenvalue when an eigenvalue is neither within
/// cluster_tol of +-1 nor matched by its conjugate, or when its modulus is
/// off by more than cluster_tol.
SpectralEntry eigen_decompose_T(const Mat& T, const Mat& G, double cluster_tol);

struct SpectralSplit {
  std::array<int, 3> pattern{0, 0, 0};  // most frequent rank pattern
  bool mixed = false;
  std::map<std::array<int, 3>, std::size_t> counts;
  double modulus_deviation = 0.0;
  double bilinear_residual = 0.0;
  std::size_t nodes = 0;
};

SpectralSplit spectral_split(const PairFields& fields, const std::vector<std::size_t>& nodes, double cluster_tol);

struct OneFormIntegral {
  Chart g;
  double path_residual = 0.0;
};

/// Integrates the R^N-valued form J_f Phi from `base` (default centre node),
/// anchored at f(base) unless `anchor` is given. Throws NotClosed when the two
/// path orders disagree by more than the h^2 model.
OneFormIntegral integrate_one_form(const Chart& f, const MatrixAt& Phi, std::optional<std::size_t> base = {},
                                   std::optional<Vec> anchor = {});
OneFormIntegral integrate_one_form(const Chart& f, const RealField& Phi, std::optional<std::size_t> base = {},
                                   std::optional<Vec> anchor = {});

/// Names of the residuals in a report, in a fixed order.
const std::vector<std::string>& residual_names();

struct VerifyOptions {
  /// C per residual: a residual passes when it is at most C h^2 (h = grid max step).
  std::map<std::string, double> constants;
  /// Cluster tolerance is max(1e-6, cluster_constant h^2).
  double cluster_constant = 10.0;
  std::size_t max_sample_nodes = 40000;
  /// Codazzi and Vergasta residuals use the sub-box whose faces are this
  /// fraction of each extent inside the grid box (and at least two nodes in),
  /// so refinement compares the same region.
  double interior_fraction = 1.0 / 16.0;
  /// Absolute ceiling for the Gauss residual when no constant is given.
  double gauss_tol = 1e-2;
  bool spectrum = true;
};

struct VerificationReport {
  std::string pair_id;
  Grid grid;
  double h = 0.0;
  std::size_t sampled_nodes = 0;
  std::map<std::string, double> residuals;
  std::map<std::string, double> thresholds;
  std::array<int, 3> rank_pattern{0, 0, 0};
  bool mixed_pattern = false;
  double cluster_tol = 0.0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  bool passed() const { return failures.empty(); }
};

VerificationReport verify_pair(const DeformationPair& pair, const VerifyOptions& options = {});

/// Throws the error matching the first failing residual (GaussMapMismatch,
/// NotConformal, NotOrthogonal, else ResidualAboveThreshold).
void require_passed(const VerificationReport& report);

struct ConvergenceStudy {
  std::vector<VerificationReport> reports;
  /// factors[name][k] = residual at reports[k] / residual at reports[k + 1].
  std::map<std::string, std::vector<double>> factors;
  /// Residuals whose finer value is at round-off level are exempt from the law.
  std::map<std::string, std::vector<bool>> at_floor;
};

/// Residual magnitude below which a refinement factor is not meaningful.
inline constexpr double kMachineFloor = 1e-10;

ConvergenceStudy convergence_study(const std::function<DeformationPair(int)>& build,
                                   const std::vector<int>& resolutions, const VerifyOptions& options = {});

/// True when every non-exempt factor lies in [lo, hi].
bool convergence_within(const ConvergenceStudy& study, const std::vector<std::string>& names, double lo = 3.0,
                        double hi = 5.0);

}  // namespace forge
