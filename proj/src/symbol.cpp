#include "fraclap/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "gauss_rule.hpp"

namespace fraclap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Direction {
  std::array<double, 3> theta;
  double weight;
  double coarse_weight;  // weight in the coarse rule, 0 if not a member
};

struct RadialResult {
  double value = 0.0;
  double inner_bound = 0.0;
  double outer_bound = 0.0;
};

void validate(int n, double alpha, const SymbolConfig& c) {
  if (n < 1 || n > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0, 2)");
  if (!(c.inner_cutoff > 0.0)) throw std::invalid_argument("inner cutoff must be positive");
  if (!(c.inner_cutoff < c.outer_cutoff))
    throw std::invalid_argument("inner cutoff must be smaller than the outer cutoff");
  if (c.angular_nodes < 0 || c.angular_nodes % 2 != 0)
    throw std::invalid_argument("angular node count must be even");
  if (c.min_oscillations < 1) throw std::invalid_argument("min_oscillations must be >= 1");
}

std::vector<Direction> directions(int n, int angular) {
  std::vector<Direction> dirs;
  if (n == 1) {
    dirs.push_back({{-1.0, 0.0, 0.0}, 1.0, 1.0});
    dirs.push_back({{1.0, 0.0, 0.0}, 1.0, 1.0});
    return dirs;
  }
  const int m = angular > 0 ? angular : (n == 2 ? 1024 : 128);
  const double w = kTwoPi / m;
  if (n == 2) {
    for (int j = 0; j < m; ++j) {
      const double phi = w * (j + 0.5);
      dirs.push_back({{std::cos(phi), std::sin(phi), 0.0}, w, j % 2 == 0 ? 2.0 * w : 0.0});
    }
    return dirs;
  }
  // Midpoint bands are not nested, so the coarse rule (half the bands and
  // azimuths) is a separate node set carrying zero fine weight.
  auto add_sphere = [&dirs](int azimuths, bool fine) {
    const int bands = std::max(1, azimuths / 2);
    const double du = 2.0 / bands, dphi = kTwoPi / azimuths;
    for (int i = 0; i < bands; ++i) {
      const double u = -1.0 + du * (i + 0.5);
      const double rho = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int j = 0; j < azimuths; ++j) {
        const double phi = dphi * (j + 0.5);
        const double w = du * dphi;
        dirs.push_back({{rho * std::cos(phi), rho * std::sin(phi), u}, fine ? w : 0.0,
                        fine ? 0.0 : w});
      }
    }
  };
  add_sphere(m, true);
  add_sphere(std::max(2, m / 2), false);
  return dirs;
}

// ∫_0^∞ (1 − cos(s r)) r^{-1-α} dr for one direction, split as documented
// on SymbolConfig.
RadialResult radial_integral(double s, double alpha, const SymbolConfig& c) {
  RadialResult out;
  if (s == 0.0) return out;
  static const auto rule = detail::gauss_legendre<16>();
  const double eps = c.inner_cutoff;

  // 0 <= s²r²/2 − (1 − cos sr) <= s⁴r⁴/24
  out.value = s * s * std::pow(eps, 2.0 - alpha) / (2.0 * (2.0 - alpha));
  out.inner_bound = std::pow(s, 4) * std::pow(eps, 4.0 - alpha) / (24.0 * (4.0 - alpha));

  const double r_end = std::max(c.outer_cutoff, kTwoPi * c.min_oscillations / s);
  const double max_width = kTwoPi / s;
  double a = eps;
  double body = 0.0;
  while (a < r_end) {
    const double b = std::min({2.0 * a, a + max_width, r_end});
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double panel = 0.0;
    for (const auto& p : rule) {
      const double r = mid + half * p.x;
      const double sn = std::sin(0.5 * s * r);
      panel += p.w * 2.0 * sn * sn * std::pow(r, -1.0 - alpha);
    }
    body += half * panel;
    a = b;
  }
  out.value += body;

  const double tail = std::pow(r_end, -alpha) / alpha;
  out.value += tail;
  out.outer_bound = std::min(tail, 2.0 * std::pow(r_end, -1.0 - alpha) / s);
  return out;
}

using CacheKey = std::tuple<int, double, double, double, int, int>;

}  // namespace

SymbolEvaluation symbol_from_kernel(std::span<const double> xi, int n, double alpha,
                                    const SymbolConfig& config) {
  validate(n, alpha, config);
  if (xi.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("frequency vector has the wrong dimension");

  SymbolEvaluation ev;
  ev.xi.assign(xi.begin(), xi.end());
  double fine = 0.0, coarse = 0.0;
  for (const auto& d : directions(n, config.angular_nodes)) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += xi[i] * d.theta[i];
    const RadialResult r = radial_integral(std::abs(dot), alpha, config);
    fine += d.weight * r.value;
    coarse += d.coarse_weight * r.value;
    ev.inner_bound += d.weight * r.inner_bound;
    ev.outer_bound += d.weight * r.outer_bound;
  }
  ev.value = fine;
  ev.angular_estimate = std::abs(fine - coarse);
  ev.error_estimate = ev.inner_bound + ev.outer_bound + ev.angular_estimate;
  return ev;
}

SymbolEvaluation symbol_from_kernel(std::span<const double> xi, const KernelSpec& spec,
                                    const SymbolConfig& config) {
  return symbol_from_kernel(xi, spec.n, spec.alpha, config);
}

ConstantEstimate a_constant(int n, double alpha, const SymbolConfig& config) {
  validate(n, alpha, config);
  static std::mutex mutex;
  static std::map<CacheKey, ConstantEstimate> cache;
  const CacheKey key{n, alpha, config.inner_cutoff, config.outer_cutoff, config.angular_nodes,
                     config.min_oscillations};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::vector<double> e1(static_cast<std::size_t>(n), 0.0);
  e1[0] = 1.0;
  const auto ev = symbol_from_kernel(e1, n, alpha, config);
  const ConstantEstimate est{ev.value, ev.error_estimate};
  std::lock_guard lock(mutex);
  cache.emplace(key, est);
  return est;
}

HomogeneityReport verify_homogeneity(int n, double alpha,
                                     const std::vector<std::vector<double>>& xi_set,
                                     const SymbolConfig& config) {
  HomogeneityReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.a = a_constant(n, alpha, config);
  rep.pass = true;
  for (const auto& xi : xi_set) {
    double m2 = 0.0;
    for (double v : xi) m2 += v * v;
    if (m2 == 0.0) throw std::invalid_argument("homogeneity check needs nonzero frequencies");
    HomogeneityRow row;
    row.xi = xi;
    row.magnitude = std::sqrt(m2);
    const auto ev = symbol_from_kernel(xi, n, alpha, config);
    row.value = ev.value;
    row.error_estimate = ev.error_estimate;
    const double scale = std::pow(row.magnitude, alpha);
    const double expected = rep.a.value * scale;
    row.ratio = ev.value / expected;
    row.deviation = std::abs(row.ratio - 1.0);
    row.allowed = (ev.error_estimate + scale * rep.a.error_estimate) / expected;
    if (row.deviation > row.allowed) rep.pass = false;
    rep.max_deviation = std::max(rep.max_deviation, row.deviation);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

RotationReport verify_rotation(int n, double alpha, std::span<const double> xi,
                               std::span<const double> rotation, const SymbolConfig& config,
                               double tolerance_factor) {
  if (n < 2) throw std::invalid_argument("rotation check needs n >= 2");
  const auto nn = static_cast<std::size_t>(n);
  if (xi.size() != nn || rotation.size() != nn * nn)
    throw std::invalid_argument("rotation check: wrong vector or matrix size");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dot = 0.0;
      for (int k = 0; k < n; ++k) dot += rotation[k * n + i] * rotation[k * n + j];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-12)
        throw std::invalid_argument("rotation matrix is not orthogonal");
    }
  RotationReport rep;
  rep.xi.assign(xi.begin(), xi.end());
  rep.rotated.assign(nn, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rep.rotated[i] += rotation[i * n + j] * xi[j];
  const auto a = symbol_from_kernel(rep.xi, n, alpha, config);
  const auto b = symbol_from_kernel(rep.rotated, n, alpha, config);
  rep.value = a.value;
  rep.rotated_value = b.value;
  rep.difference = std::abs(a.value - b.value);
  rep.combined_error = a.error_estimate + b.error_estimate;
  rep.tolerance_factor = tolerance_factor;
  rep.pass = rep.difference <= tolerance_factor * rep.combined_error;
  return rep;
}

}  // namespace fraclap
