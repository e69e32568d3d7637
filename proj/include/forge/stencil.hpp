#pragma once

#include "forge/grid.hpp"

#include <array>
#include <cstddef>
#include <type_traits>

namespace forge {

/// Finite-difference weights along one axis. Offsets are in linear node units.
struct Stencil {
  int count = 0;
  std::array<std::ptrdiff_t, 4> offset{};
  std::array<double, 4> weight{};
};

// Second-order accurate everywhere: central in the interior, one-sided
// three-point at the faces.
inline Stencil first_derivative_stencil(const Grid& grid, std::size_t node, int axis) {
  const int i = grid.coord(node, axis);
  const int last = grid.resolution(axis) - 1;
  const auto s = static_cast<std::ptrdiff_t>(grid.stride(axis));
  const double inv = 1.0 / (2.0 * grid.step(axis));
  Stencil st;
  st.count = 3;
  if (i == 0) {
    st.offset = {0, s, 2 * s, 0};
    st.weight = {-3.0 * inv, 4.0 * inv, -1.0 * inv, 0.0};
  } else if (i == last) {
    st.offset = {0, -s, -2 * s, 0};
    st.weight = {3.0 * inv, -4.0 * inv, 1.0 * inv, 0.0};
  } else {
    st.count = 2;
    st.offset = {-s, s, 0, 0};
    st.weight = {-inv, inv, 0.0, 0.0};
  }
  return st;
}

inline Stencil second_derivative_stencil(const Grid& grid, std::size_t node, int axis) {
  const int i = grid.coord(node, axis);
  const int last = grid.resolution(axis) - 1;
  const auto s = static_cast<std::ptrdiff_t>(grid.stride(axis));
  const double inv = 1.0 / (grid.step(axis) * grid.step(axis));
  Stencil st;
  if (i == 0 || i == last) {
    const std::ptrdiff_t d = (i == 0) ? s : -s;
    st.count = 4;
    st.offset = {0, d, 2 * d, 3 * d};
    st.weight = {2.0 * inv, -5.0 * inv, 4.0 * inv, -1.0 * inv};
  } else {
    st.count = 3;
    st.offset = {-s, 0, s, 0};
    st.weight = {inv, -2.0 * inv, inv, 0.0};
  }
  return st;
}

template <class T>
using stencil_value_t = std::decay_t<decltype(std::declval<T>() * 1.0)>;

/// Applies a stencil to any node-valued functor (double, complex, Eigen types).
template <class F>
auto apply_stencil(const Stencil& st, std::size_t node, F&& at) {
  using R = std::decay_t<decltype(at(node))>;
  const auto base = static_cast<std::ptrdiff_t>(node);
  R acc = at(static_cast<std::size_t>(base + st.offset[0])) * st.weight[0];
  for (int k = 1; k < st.count; ++k) acc += at(static_cast<std::size_t>(base + st.offset[k])) * st.weight[k];
  return acc;
}

template <class F>
auto fd_derivative(const Grid& grid, std::size_t node, int axis, F&& at) {
  return apply_stencil(first_derivative_stencil(grid, node, axis), node, at);
}

/// Second derivative along (a, b). Mixed terms use the tensor product of the
/// two one-dimensional first-derivative stencils, so (a,b) and (b,a) agree.
template <class F>
auto fd_second_derivative(const Grid& grid, std::size_t node, int a, int b, F&& at) {
  if (a == b) return apply_stencil(second_derivative_stencil(grid, node, a), node, at);
  if (a > b) std::swap(a, b);
  const Stencil sa = first_derivative_stencil(grid, node, a);
  using R = std::decay_t<decltype(at(node))>;
  const auto base = static_cast<std::ptrdiff_t>(node);
  auto inner = [&](int k) {
    const auto shifted = static_cast<std::size_t>(base + sa.offset[k]);
    return apply_stencil(first_derivative_stencil(grid, shifted, b), shifted, at);
  };
  R acc = inner(0) * sa.weight[0];
  for (int k = 1; k < sa.count; ++k) acc += inner(k) * sa.weight[k];
  return acc;
}

}  // namespace forge
