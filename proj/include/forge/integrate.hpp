#pragma once

#include "forge/field.hpp"
#include "forge/grid.hpp"

#include <functional>
#include <vector>

namespace forge {

/// An R^N-valued one-form: at a node (or point) an N x n matrix whose column a
/// is the form evaluated on the coordinate vector d_a.
using OneFormAt = std::function<Mat(std::size_t node)>;
using OneFormMap = std::function<Mat(const Vec& x)>;

struct PathIntegral {
  Mat values;                 // N x node_count
  double path_residual = 0.0; // max |axis-order path - reverse-order path|
};

/// Cumulative fourth-order quadrature of sampled data along one grid line
/// (spacing h), starting from index `from`. Returns offsets relative to `from`.
std::vector<double> cumulative_line_integral(const std::vector<double>& samples, double h, int from);

/// Integrates a sampled one-form from `base` along grid lines: first along
/// axis 0, then axis 1, and so on. The reverse axis order is also computed and
/// the maximal disagreement reported.
PathIntegral integrate_sampled(const Grid& grid, int ambient, const OneFormAt& form, std::size_t base,
                               const Vec& anchor);

/// As integrate_sampled, but each grid segment is integrated with 8-point
/// Gauss-Legendre on a closed-form one-form.
PathIntegral integrate_continuous(const Grid& grid, int ambient, const OneFormMap& form, std::size_t base,
                                  const Vec& anchor);

/// Tensor-product cubic Lagrange interpolation of a field at an arbitrary
/// point of its box, on the 4 nearest nodes per axis.
Mat interpolate_cubic(const RealField& field, const Vec& x);

}  // namespace forge
