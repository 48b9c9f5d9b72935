#include "fraclap/grid_function.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclap {

GridFunction make_grid(int n, double period, int points) {
  if (n < 1 || n > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (!(period > 0.0) || !std::isfinite(period))
    throw std::invalid_argument("grid period must be positive");
  if (points < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  GridFunction g;
  g.n = n;
  g.period = period;
  g.points = points;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(points);
  g.values.assign(total, 0.0);
  return g;
}

std::size_t GridFunction::index_of(std::span<const int> multi) const {
  if (multi.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("grid index has the wrong dimension");
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    if (multi[i] < 0 || multi[i] >= points)
      throw std::out_of_range("grid index out of range: " + std::to_string(multi[i]));
    idx = idx * static_cast<std::size_t>(points) + static_cast<std::size_t>(multi[i]);
  }
  return idx;
}

std::array<int, 3> GridFunction::multi_index(std::size_t flat) const {
  std::array<int, 3> m{0, 0, 0};
  const auto p = static_cast<std::size_t>(points);
  for (int i = n - 1; i >= 0; --i) {
    m[i] = static_cast<int>(flat % p);
    flat /= p;
  }
  return m;
}

std::array<double, 3> GridFunction::coordinates(std::size_t flat) const {
  const auto m = multi_index(flat);
  const double dx = spacing();
  return {m[0] * dx, n > 1 ? m[1] * dx : 0.0, n > 2 ? m[2] * dx : 0.0};
}

double GridFunction::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

void require_finite(const GridFunction& u) {
  for (double v : u.values)
    if (!std::isfinite(v)) throw std::invalid_argument("grid function has non-finite values");
}

int signed_frequency(int m, int points) { return 2 * m < points ? m : m - points; }

}  // namespace fraclap
