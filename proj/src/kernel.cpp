#include "fraclap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fraclap {

namespace {

void check_dimension(int n) {
  if (n < 1 || n > kMaxDimension)
    throw std::invalid_argument("dimension must be 1, 2 or 3 (got " + std::to_string(n) + ")");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2) (got " + std::to_string(alpha) + ")");
}

// Number of lattice points on each shell |k|^2 = q, q = 0..radius^2.
// Only used for n >= 2; in n = 1 every shell k^2 holds exactly two points.
std::vector<std::uint32_t> shell_counts(int n, std::int64_t radius) {
  const std::int64_t r2 = radius * radius;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(r2) + 1, 0);
  if (n == 2) {
    for (std::int64_t a = -radius; a <= radius; ++a)
      for (std::int64_t b = -radius; b <= radius; ++b) {
        const std::int64_t q = a * a + b * b;
        if (q <= r2) ++counts[static_cast<std::size_t>(q)];
      }
  } else {
    for (std::int64_t a = -radius; a <= radius; ++a)
      for (std::int64_t b = -radius; b <= radius; ++b) {
        const std::int64_t qab = a * a + b * b;
        if (qab > r2) continue;
        for (std::int64_t c = -radius; c <= radius; ++c) {
          const std::int64_t q = qab + c * c;
          if (q <= r2) ++counts[static_cast<std::size_t>(q)];
        }
      }
  }
  counts[0] = 0;
  return counts;
}

// Neumaier-compensated running sum; order-dependent, hence reproducible.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Visits (|k|^2, multiplicity) for 0 < |k| <= radius in ascending order.
// Adding a shell's common term `multiplicity` times in a row reproduces the
// sorted-vector summation bit for bit.
template <class Fn>
void for_each_shell(int n, std::int64_t radius, Fn&& fn) {
  if (n == 1) {
    for (std::int64_t k = 1; k <= radius; ++k) fn(static_cast<double>(k) * static_cast<double>(k), 2u);
    return;
  }
  const auto counts = shell_counts(n, radius);
  for (std::size_t q = 1; q < counts.size(); ++q)
    if (counts[q] != 0) fn(static_cast<double>(q), counts[q]);
}

}  // namespace

double norm_squared(const LatticeVector& k) {
  double s = 0.0;
  for (auto c : k) s += static_cast<double>(c) * static_cast<double>(c);
  return s;
}

double euclidean_norm(const LatticeVector& k) { return std::sqrt(norm_squared(k)); }

LatticeVector negate(const LatticeVector& k) { return {-k[0], -k[1], -k[2]}; }

double unit_sphere_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: check_dimension(n);
  }
  return 0.0;
}

double kernel_value(const LatticeVector& k, int n, double alpha) {
  const double r2 = norm_squared(k);
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, -0.5 * (n + alpha));
}

double kernel_value(const LatticeVector& k, const KernelSpec& spec) {
  return kernel_value(k, spec.n, spec.alpha);
}

std::vector<LatticeVector> ball_vectors(int n, std::int64_t radius) {
  check_dimension(n);
  std::vector<LatticeVector> out;
  const std::int64_t r2 = radius * radius;
  const std::int64_t rb = n >= 2 ? radius : 0;
  const std::int64_t rc = n >= 3 ? radius : 0;
  for (std::int64_t a = -radius; a <= radius; ++a)
    for (std::int64_t b = -rb; b <= rb; ++b)
      for (std::int64_t c = -rc; c <= rc; ++c) {
        const std::int64_t q = a * a + b * b + c * c;
        if (q > 0 && q <= r2) out.push_back({a, b, c});
      }
  std::sort(out.begin(), out.end(), [](const LatticeVector& x, const LatticeVector& y) {
    const double qx = norm_squared(x), qy = norm_squared(y);
    if (qx != qy) return qx < qy;
    return x < y;
  });
  return out;
}

// Tail bound. For |k| > R let Q_k be the unit cube centred at k. Every y in
// Q_k satisfies |k| - √n/2 <= |y| <= |k| + √n/2, so with f(r) = r^{-(n+α)}
// decreasing,
//   f(|k|) <= f(|y|) * ((|k| + √n/2)/|k|)^{n+α} <= f(|y|) * (1 + √n/(2R))^{n+α}.
// The cubes are disjoint and lie in {|y| > R - √n/2}, hence
//   Σ_{|k|>R} f(|k|) <= (1 + √n/(2R))^{n+α} ∫_{|y| > R-√n/2} |y|^{-(n+α)} dy
//                    = (1 + √n/(2R))^{n+α} ω_n (R - √n/2)^{-α} / α,
// with ω_n the area of S^{n-1}. R >= 1 keeps R - √n/2 > 0 for n <= 3.
double lattice_tail_bound(int n, double alpha, std::int64_t radius) {
  const double half_diag = 0.5 * std::sqrt(static_cast<double>(n));
  const double r = static_cast<double>(radius);
  return std::pow(1.0 + half_diag / r, n + alpha) * unit_sphere_area(n) *
         std::pow(r - half_diag, -alpha) / alpha;
}

KernelSpec build_spec(int n, double alpha, std::int64_t trunc_radius) {
  check_dimension(n);
  check_alpha(alpha);
  if (trunc_radius < 1) throw std::invalid_argument("truncation radius must be >= 1");

  KernelSpec spec;
  spec.n = n;
  spec.alpha = alpha;
  spec.trunc_radius = trunc_radius;

  const double expo = -0.5 * (n + alpha);
  CompensatedSum z;
  for_each_shell(n, trunc_radius, [&](double q, std::uint32_t mult) {
    const double v = std::pow(q, expo);
    for (std::uint32_t i = 0; i < mult; ++i) z.add(v);
  });
  spec.normalization = z.value();
  spec.truncated_mass_bound = lattice_tail_bound(n, alpha, trunc_radius);
  return spec;
}

std::vector<double> beta_moment_partials(const KernelSpec& spec, double beta,
                                         std::span<const std::int64_t> radii) {
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  std::vector<double> out;
  out.reserve(radii.size());
  if (radii.empty()) return out;
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() < 1)
    throw std::invalid_argument("moment radii must be >= 1 and ascending");

  const double expo = 0.5 * (beta - spec.n - spec.alpha);
  const double inv_z = 1.0 / spec.normalization;
  CompensatedSum sum;
  std::size_t next = 0;
  for_each_shell(spec.n, radii.back(), [&](double q, std::uint32_t mult) {
    while (next < radii.size() && q > static_cast<double>(radii[next] * radii[next])) {
      out.push_back(sum.value());
      ++next;
    }
    const double v = std::pow(q, expo) * inv_z;
    for (std::uint32_t i = 0; i < mult; ++i) sum.add(v);
  });
  while (out.size() < radii.size()) out.push_back(sum.value());
  return out;
}

double beta_moment_partial(const KernelSpec& spec, double beta, std::int64_t radius) {
  if (radius < 1) throw std::invalid_argument("moment radius must be >= 1");
  const std::int64_t r[] = {radius};
  return beta_moment_partials(spec, beta, r).front();
}

MomentClass classify_moment(const KernelSpec& spec, double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  return beta < spec.alpha ? MomentClass::convergent : MomentClass::divergent;
}

const char* to_string(MomentClass c) {
  return c == MomentClass::convergent ? "CONVERGENT" : "DIVERGENT";
}

JumpSamplerTable build_sampler(const KernelSpec& spec) {
  JumpSamplerTable table{spec, {}};
  const auto jumps = ball_vectors(spec.n, spec.trunc_radius);
  table.entries.reserve(jumps.size());
  double cumulative = 0.0;
  for (const auto& k : jumps) {
    const double p = kernel_value(k, spec) / spec.normalization;
    cumulative += p;
    table.entries.push_back({k, p, cumulative});
  }
  return table;
}

}  // namespace fraclap
