#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fraclap {

/// Periodic field on the torus [0, L)^n sampled at x_j = j L / P per axis.
/// Values are row-major with the first axis slowest.
struct GridFunction {
  int n = 1;
  double period = 1.0;
  int points = 1;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double spacing() const { return period / points; }
  std::size_t index_of(std::span<const int> multi) const;
  std::array<int, 3> multi_index(std::size_t flat) const;
  std::array<double, 3> coordinates(std::size_t flat) const;
  double mean() const;
};

/// Zero field with validated shape.
GridFunction make_grid(int n, double period, int points);

/// Samples f(x) with x a span of n coordinates.
template <class F>
GridFunction sample_grid(int n, double period, int points, F&& f) {
  GridFunction g = make_grid(n, period, points);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coordinates(i);
    g.values[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
  }
  return g;
}

/// Throws std::invalid_argument on NaN or infinity.
void require_finite(const GridFunction& u);

/// Grid frequency index m in [0, P) mapped to the symmetric range
/// [-P/2, P/2); the Nyquist index P/2 maps to -P/2.
int signed_frequency(int m, int points);

}  // namespace fraclap
