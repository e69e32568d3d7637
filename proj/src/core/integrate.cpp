#include "forge/integrate.hpp"

#include "forge/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace forge {
namespace {

constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Integral over each interval [k, k+1] of the cubic through four neighbouring samples.
std::vector<double> interval_integrals(const std::vector<double>& f, double h) {
  const int r = static_cast<int>(f.size());
  std::vector<double> out(r - 1);
  const double c = h / 24.0;
  for (int k = 0; k < r - 1; ++k) {
    if (k == 0)
      out[k] = c * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    else if (k == r - 2)
      out[k] = c * (f[r - 4] - 5 * f[r - 3] + 19 * f[r - 2] + 9 * f[r - 1]);
    else
      out[k] = c * (-f[k - 1] + 13 * f[k] + 13 * f[k + 1] - f[k + 2]);
  }
  return out;
}

// Interval integrals of all N components along the line through `seed` on `axis`.
using LineRule = std::function<Mat(std::size_t seed, int axis)>;

Mat integrate_order(const Grid& grid, int ambient, const LineRule& rule, std::size_t base, const Vec& anchor,
                    const std::vector<int>& order) {
  const std::size_t count = grid.node_count();
  Mat values(ambient, static_cast<Eigen::Index>(count));
  values.col(static_cast<Eigen::Index>(base)) = anchor;
  const auto base_idx = grid.index(base);
  for (std::size_t step = 0; step < order.size(); ++step) {
    const int axis = order[step];
    const int r = grid.resolution(axis);
    const int b = base_idx[axis];
    for (std::size_t node = 0; node < count; ++node) {
      bool seed = true;
      for (std::size_t later = step; later < order.size() && seed; ++later)
        seed = grid.coord(node, order[later]) == base_idx[order[later]];
      if (!seed) continue;
      const Mat intervals = rule(node, axis);  // ambient x (r-1)
      const std::size_t line0 = node - static_cast<std::size_t>(b) * grid.stride(axis);
      const Vec start = values.col(static_cast<Eigen::Index>(node));
      Vec acc = start;
      for (int i = b + 1; i < r; ++i) {
        acc += intervals.col(i - 1);
        values.col(static_cast<Eigen::Index>(line0 + static_cast<std::size_t>(i) * grid.stride(axis))) = acc;
      }
      acc = start;
      for (int i = b - 1; i >= 0; --i) {
        acc -= intervals.col(i);
        values.col(static_cast<Eigen::Index>(line0 + static_cast<std::size_t>(i) * grid.stride(axis))) = acc;
      }
    }
  }
  return values;
}

PathIntegral integrate_both(const Grid& grid, int ambient, const LineRule& rule, std::size_t base,
                            const Vec& anchor) {
  if (anchor.size() != ambient) fail(ErrorCode::DimensionMismatch, "anchor has wrong dimension");
  std::vector<int> order(grid.dim());
  std::iota(order.begin(), order.end(), 0);
  PathIntegral out;
  out.values = integrate_order(grid, ambient, rule, base, anchor, order);
  if (grid.dim() > 1) {
    std::vector<int> reversed(order.rbegin(), order.rend());
    const Mat other = integrate_order(grid, ambient, rule, base, anchor, reversed);
    out.path_residual = (out.values - other).cwiseAbs().maxCoeff();
  }
  return out;
}

}  // namespace

std::vector<double> cumulative_line_integral(const std::vector<double>& samples, double h, int from) {
  if (samples.size() < 4) fail(ErrorCode::InvalidArgument, "line quadrature needs at least four samples");
  const auto iv = interval_integrals(samples, h);
  const int r = static_cast<int>(samples.size());
  std::vector<double> out(r, 0.0);
  for (int i = from + 1; i < r; ++i) out[i] = out[i - 1] + iv[i - 1];
  for (int i = from - 1; i >= 0; --i) out[i] = out[i + 1] - iv[i];
  return out;
}

PathIntegral integrate_sampled(const Grid& grid, int ambient, const OneFormAt& form, std::size_t base,
                               const Vec& anchor) {
  LineRule rule = [&](std::size_t seed, int axis) {
    const int r = grid.resolution(axis);
    const std::size_t line0 = seed - static_cast<std::size_t>(grid.coord(seed, axis)) * grid.stride(axis);
    Mat comp(ambient, r);
    for (int i = 0; i < r; ++i) comp.col(i) = form(line0 + static_cast<std::size_t>(i) * grid.stride(axis)).col(axis);
    Mat out(ambient, r - 1);
    std::vector<double> line(r);
    for (int c = 0; c < ambient; ++c) {
      for (int i = 0; i < r; ++i) line[i] = comp(c, i);
      const auto iv = interval_integrals(line, grid.step(axis));
      for (int i = 0; i < r - 1; ++i) out(c, i) = iv[i];
    }
    return out;
  };
  return integrate_both(grid, ambient, rule, base, anchor);
}

PathIntegral integrate_continuous(const Grid& grid, int ambient, const OneFormMap& form, std::size_t base,
                                  const Vec& anchor) {
  LineRule rule = [&](std::size_t seed, int axis) {
    const int r = grid.resolution(axis);
    const double h = grid.step(axis);
    Vec x = grid.point(seed);
    Mat out(ambient, r - 1);
    for (int i = 0; i < r - 1; ++i) {
      const double x0 = grid.coordinate(axis, i);
      Vec acc = Vec::Zero(ambient);
      for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
        x[axis] = x0 + 0.5 * h * (1.0 + kGaussNodes[q]);
        acc += kGaussWeights[q] * form(x).col(axis);
      }
      out.col(i) = 0.5 * h * acc;
    }
    return out;
  };
  return integrate_both(grid, ambient, rule, base, anchor);
}

Mat interpolate_cubic(const RealField& field, const Vec& x) {
  const Grid& grid = field.grid();
  const int n = grid.dim();
  if (x.size() != n) fail(ErrorCode::DimensionMismatch, "interpolation point has wrong dimension");
  std::vector<std::array<double, 4>> w(n);
  std::vector<int> first(n);
  for (int a = 0; a < n; ++a) {
    const double t = (x[a] - grid.box()[a].lo) / grid.step(a);
    const int i0 = std::clamp(static_cast<int>(std::floor(t)) - 1, 0, grid.resolution(a) - 4);
    first[a] = i0;
    for (int i = 0; i < 4; ++i) {
      double l = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i) l *= (t - (i0 + j)) / static_cast<double>(i - j);
      w[a][i] = l;
    }
  }
  Mat out = Mat::Zero(field.rows(), field.cols());
  std::vector<int> idx(n), local(n, 0);
  while (true) {
    double weight = 1.0;
    for (int a = 0; a < n; ++a) {
      weight *= w[a][local[a]];
      idx[a] = first[a] + local[a];
    }
    if (weight != 0.0) out += weight * field(grid.node(idx));
    int a = n - 1;
    while (a >= 0 && ++local[a] == 4) local[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

}  // namespace forge

