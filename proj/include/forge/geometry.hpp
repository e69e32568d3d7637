#pragma once

#include "forge/chart.hpp"
#include "forge/field.hpp"

#include <functional>
#include <vector>

namespace forge {

/// Unoriented n-plane in R^N, stored as the orthogonal projector onto it.
struct TangentPlane {
  Mat projection;

  int ambient_dim() const { return static_cast<int>(projection.rows()); }
  int dim() const;
};

/// Second fundamental form in coordinates: coeff(i, j, s) = <alpha(d_i, d_j), nu_s>
/// for the deterministic normal frame nu.
struct SecondFundForm {
  int n = 0;
  Mat normal_frame;                 // N x (N - n)
  std::vector<Vec> ambient;         // alpha(d_i, d_j) in R^N, index i * n + j
  std::vector<Mat> coefficients;    // one symmetric n x n block per normal

  int codim() const { return static_cast<int>(normal_frame.cols()); }
  double coeff(int i, int j, int s) const { return coefficients[s](i, j); }
  const Vec& at(int i, int j) const { return ambient[i * n + j]; }
};

inline constexpr double kImmersionRankTol = 1e-8;

/// Throws NonImmersion unless the smallest singular value is above
/// kImmersionRankTol times the largest.
void require_full_rank(const Mat& jacobian, const char* what = "chart");
bool has_full_rank(const Mat& jacobian);

Mat finite_difference_jacobian(const Chart& chart, std::size_t node);
/// Exact Jacobian when the chart carries one, otherwise second-order finite
/// differences. Throws NonImmersion on rank loss.
Mat jacobian(const Chart& chart, std::size_t node);
Mat jacobian_unchecked(const Chart& chart, std::size_t node);

Mat first_fundamental_form(const Chart& chart, std::size_t node);

TangentPlane tangent_plane(const Mat& jacobian);
TangentPlane gauss_plane(const Chart& chart, std::size_t node);

/// Frobenius distance between the projectors.
double plane_distance(const TangentPlane& a, const TangentPlane& b);

/// Gram-Schmidt on the ambient axes projected to the normal space, in axis
/// order, skipping near-degenerate axes.
Mat normal_frame(const TangentPlane& plane);

/// Second derivatives d_i d_j f at a node, index i * n + j.
std::vector<Vec> second_derivatives(const Chart& chart, std::size_t node);

SecondFundForm second_fundamental_form(const Chart& chart, std::size_t node);
Vec mean_curvature_vector(const Chart& chart, std::size_t node);
/// Basis (n x k, coordinate vectors) of the kernel of the stacked shape operators.
Mat relative_nullity(const Chart& chart, std::size_t node, double tol);

using MatrixAt = std::function<Mat(std::size_t)>;
using ScalarAt = std::function<double(std::size_t)>;

/// Christoffel symbols at a node from finite differences of the metric.
/// Returned as gamma[a](i, j) = Gamma^a_{ij}.
std::vector<Mat> christoffel_symbols(const Grid& grid, std::size_t node, const MatrixAt& metric);

MatrixAt metric_accessor(const Chart& chart);

struct Alignment {
  Mat rotation;
  Vec translation;
  double scale = 1.0;
  double max_error = 0.0;
  double rms_error = 0.0;
};

/// Best proper rigid motion (optionally with uniform scale) taking the
/// columns of `source` onto the columns of `target`.
Alignment procrustes(const Mat& source, const Mat& target, bool allow_scale);

}  // namespace forge
