#include "fraclap/fraclap_ops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"
#include "fraclap/kernel.hpp"
#include "gauss_rule.hpp"

namespace fraclap {

namespace {

using cvec = std::vector<std::complex<double>>;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0, 2)");
}

detail::FftPlan make_plan(const GridFunction& u) {
  return detail::FftPlan(std::vector<int>(static_cast<std::size_t>(u.n), u.points));
}

cvec to_complex(const GridFunction& u) {
  cvec c(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) c[i] = {u.values[i], 0.0};
  return c;
}

// Drops the imaginary part after checking it is round-off.
GridFunction to_real(const GridFunction& shape, const cvec& c, double scale_hint) {
  GridFunction out = shape;
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.values[i] = c[i].real();
    max_re = std::max(max_re, std::abs(c[i].real()));
    max_im = std::max(max_im, std::abs(c[i].imag()));
  }
  if (max_im > 1e-10 * std::max({max_re, scale_hint, 1e-300}))
    throw std::runtime_error("spectral operator left a non-negligible imaginary part");
  return out;
}

double max_abs(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

// Multiplies the spectrum of u by g(ξ magnitude), pointwise in DFT order.
template <class G>
GridFunction apply_radial_multiplier(const GridFunction& u, double alpha, G&& g) {
  require_finite(u);
  const SpectralMultiplier mult = build_multiplier(u.n, u.period, u.points, alpha);
  const detail::FftPlan plan = make_plan(u);
  cvec c = to_complex(u);
  plan.forward(c);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= g(mult.multiplier[i]);
  plan.inverse(c);
  return to_real(u, c, max_abs(u));
}

// 2n ∫_{[-1,1]^{n-1}} (1 + |v|^2)^{-(n+α)/2} dv: the kernel integrated over
// the boundary of the unit cube with the cone measure.
double cube_surface_constant(int n, double alpha) {
  if (n == 1) return 2.0;
  const auto rule = detail::gauss_legendre<32>();
  const double s = 0.5 * (n + alpha);
  double acc = 0.0;
  if (n == 2) {
    for (const auto& a : rule) acc += a.w * std::pow(1.0 + a.x * a.x, -s);
  } else {
    for (const auto& a : rule)
      for (const auto& b : rule) acc += a.w * b.w * std::pow(1.0 + a.x * a.x + b.x * b.x, -s);
  }
  return 2.0 * n * acc;
}

int default_image_shells(int n) { return n == 1 ? 32 : (n == 2 ? 8 : 4); }

std::size_t wrapped_index(const GridFunction& u, std::span<const int> x,
                          const std::array<int, 3>& offset, int sign) {
  std::size_t idx = 0;
  const int p = u.points;
  for (int i = 0; i < u.n; ++i) {
    int c = (x[i] + sign * offset[i]) % p;
    if (c < 0) c += p;
    idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(c);
  }
  return idx;
}

void check_nodes_match(const GridFunction& u, const QuadratureNodes& nodes) {
  if (u.n != nodes.n || u.points != nodes.points || u.period != nodes.period)
    throw std::invalid_argument("quadrature nodes were built for a different grid");
}

std::array<int, 3> grid_point_of(const GridFunction& u, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(u.n))
    throw std::invalid_argument("point has the wrong dimension");
  std::array<int, 3> m{0, 0, 0};
  const double dx = u.spacing();
  for (int i = 0; i < u.n; ++i) {
    const double s = x[i] / dx;
    const double r = std::round(s);
    if (!std::isfinite(s) || std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)))
      throw std::invalid_argument("x is not a grid point");
    long long k = static_cast<long long>(r) % u.points;
    if (k < 0) k += u.points;
    m[i] = static_cast<int>(k);
  }
  return m;
}

}  // namespace

SpectralMultiplier build_multiplier(int n, double period, int points, double alpha) {
  check_alpha(alpha);
  const GridFunction shape = make_grid(n, period, points);
  SpectralMultiplier m;
  m.n = n;
  m.period = period;
  m.points = points;
  m.alpha = alpha;
  m.magnitude.resize(shape.size());
  m.multiplier.resize(shape.size());
  const double base = 2.0 * std::numbers::pi / period;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const auto idx = shape.multi_index(i);
    double s = 0.0;
    for (int d = 0; d < n; ++d) {
      const double xi = base * signed_frequency(idx[d], points);
      s += xi * xi;
    }
    m.magnitude[i] = std::sqrt(s);
    m.multiplier[i] = s == 0.0 ? 0.0 : std::pow(m.magnitude[i], alpha);
  }
  return m;
}

GridFunction fraclap_spectral(const GridFunction& u, double alpha) {
  return apply_radial_multiplier(u, alpha, [](double s) { return s; });
}

GridFunction heat_evolve_spectral(const GridFunction& u0, double alpha, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be nonnegative");
  if (t == 0.0) {
    check_alpha(alpha);
    require_finite(u0);
    return u0;
  }
  return apply_radial_multiplier(u0, alpha, [t](double s) { return std::exp(-s * t); });
}

std::vector<GridFunction> spectral_gradient(const GridFunction& u) {
  require_finite(u);
  const detail::FftPlan plan = make_plan(u);
  cvec hat = to_complex(u);
  plan.forward(hat);
  const double base = 2.0 * std::numbers::pi / u.period;
  std::vector<GridFunction> grad;
  for (int d = 0; d < u.n; ++d) {
    cvec c = hat;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const int m = u.multi_index(i)[d];
      const int k = signed_frequency(m, u.points);
      const bool nyquist = 2 * m == u.points;
      c[i] *= nyquist ? std::complex<double>{0.0, 0.0} : std::complex<double>{0.0, base * k};
    }
    plan.inverse(c);
    grad.push_back(to_real(u, c, max_abs(u) * base * u.points));
  }
  return grad;
}

// Sum over images j with |j|_∞ <= J directly; the rest, i.e. the region
// outside the cube of half-width a = (J + 1/2)L, by its integral
//   (1/L^n) ∫_{|z|_∞ > a} |z + y|^{-(n+α)} dz ≈ S_n a^{-α} / (α L^n)
//     + (n+α) S'_n a^{-α-2} / L^n × [|y|^2 / (2n) − L^2 / 24],
// with S_n = ∫_{∂[-1,1]^n} |w|^{-(n+α)} dS and S'_n the same at exponent
// n+α+2. The second term is the |y|^2 shift (the cube's symmetry kills the
// linear one) plus the cell-midpoint correction; ∇²|z|^{-(n+α)} =
// (n+α)(α+2)|z|^{-(n+α+2)}.
namespace {

double periodized_kernel_impl(std::span<const double> y, int n, double period, double alpha,
                              int image_shells, double surface, double surface2) {
  const int J = image_shells;
  const double s = -0.5 * (n + alpha);
  double direct = 0.0;
  const int jb = n >= 2 ? J : 0, jc = n >= 3 ? J : 0;
  for (int a = -J; a <= J; ++a)
    for (int b = -jb; b <= jb; ++b)
      for (int c = -jc; c <= jc; ++c) {
        const int j[3] = {a, b, c};
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) {
          const double z = y[d] + j[d] * period;
          r2 += z * z;
        }
        if (r2 > 0.0) direct += std::pow(r2, s);
      }
  double y2 = 0.0;
  for (double v : y) y2 += v * v;
  const double a = (J + 0.5) * period;
  const double ln = std::pow(period, n);
  const double leading = surface * std::pow(a, -alpha) / (alpha * ln);
  const double second = (n + alpha) * surface2 * std::pow(a, -alpha - 2.0) / ln *
                        (y2 / (2.0 * n) - period * period / 24.0);
  return direct + leading + second;
}

}  // namespace

double periodized_kernel(std::span<const double> y, int n, double period, double alpha,
                         int image_shells) {
  check_alpha(alpha);
  if (y.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("bad displacement");
  if (image_shells < 0) throw std::invalid_argument("image shell count must be nonnegative");
  return periodized_kernel_impl(y, n, period, alpha, image_shells,
                                cube_surface_constant(n, alpha),
                                cube_surface_constant(n, alpha + 2.0));
}

QuadratureNodes build_quadrature_nodes(int n, double period, int points, double alpha,
                                       const QuadratureConfig& config) {
  check_alpha(alpha);
  make_grid(n, period, points);  // validates the shape
  QuadratureNodes q;
  q.n = n;
  q.period = period;
  q.points = points;
  q.alpha = alpha;
  q.config = config;
  q.split_radius = config.split_radius > 0.0 ? config.split_radius : std::min(1.0, period / 4.0);
  const double dx = period / points;
  const double cell = std::pow(dx, n);
  const double expo = -(n + alpha);

  auto add_node = [&](std::array<int, 3> o, double factor, double kernel) {
    QuadratureNode node{o, {o[0] * dx, o[1] * dx, o[2] * dx}, 0.0, 0.0};
    node.radius = std::sqrt(node.y[0] * node.y[0] + node.y[1] * node.y[1] + node.y[2] * node.y[2]);
    node.weight = cell * factor * kernel;
    q.nodes.push_back(node);
  };

  if (config.tail == TailMode::periodic_images) {
    const int shells = config.image_shells > 0 ? config.image_shells : default_image_shells(n);
    const double surface = cube_surface_constant(n, alpha);
    const double surface2 = cube_surface_constant(n, alpha + 2.0);
    const int hi = points / 2;
    const bool even = points % 2 == 0;
    const int bb = n >= 2 ? hi : 0, bc = n >= 3 ? hi : 0;
    for (int a = -hi; a <= hi; ++a)
      for (int b = -bb; b <= bb; ++b)
        for (int c = -bc; c <= bc; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          const std::array<int, 3> o{a, b, c};
          double factor = 1.0;
          for (int d = 0; d < n; ++d)
            if (even && std::abs(o[d]) == hi) factor *= 0.5;
          const double y[3] = {a * dx, b * dx, c * dx};
          add_node(o, factor,
                   periodized_kernel_impl(std::span<const double>(y, static_cast<std::size_t>(n)),
                                          n, period, alpha, shells, surface, surface2));
        }
  } else {
    const double r_out = config.r_out > 0.0 ? config.r_out : 0.5 * period;
    const int reach = static_cast<int>(std::floor(r_out / dx + 1e-9));
    const int bb = n >= 2 ? reach : 0, bc = n >= 3 ? reach : 0;
    for (int a = -reach; a <= reach; ++a)
      for (int b = -bb; b <= bb; ++b)
        for (int c = -bc; c <= bc; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          const double r = dx * std::sqrt(static_cast<double>(a * a + b * b + c * c));
          if (r > r_out * (1.0 + 1e-12)) continue;
          const double factor = std::abs(r - r_out) <= 1e-12 * r_out ? 0.5 : 1.0;
          add_node({a, b, c}, factor, std::pow(r, expo));
        }
    if (config.tail == TailMode::mean_field)
      q.tail_coefficient = unit_sphere_area(n) * std::pow(r_out, -alpha) / alpha;
  }
  return q;
}

double fraclap_quadrature(const GridFunction& u, std::span<const int> x,
                          const QuadratureNodes& nodes) {
  check_nodes_match(u, nodes);
  const double ux = u.values[u.index_of(x)];
  double acc = 0.0;
  for (const auto& node : nodes.nodes) {
    const double plus = u.values[wrapped_index(u, x, node.offset, +1)];
    const double minus = u.values[wrapped_index(u, x, node.offset, -1)];
    acc += node.weight * (2.0 * ux - plus - minus);
  }
  double out = 0.5 * acc;
  if (nodes.tail_coefficient != 0.0) out += nodes.tail_coefficient * (ux - u.mean());
  return out;
}

double fraclap_quadrature(const GridFunction& u, std::span<const double> x, double alpha,
                          const QuadratureConfig& config) {
  const auto m = grid_point_of(u, x);
  const auto nodes = build_quadrature_nodes(u.n, u.period, u.points, alpha, config);
  return fraclap_quadrature(u, std::span<const int>(m.data(), static_cast<std::size_t>(u.n)),
                            nodes);
}

GridFunction fraclap_quadrature_field(const GridFunction& u, const QuadratureNodes& nodes) {
  check_nodes_match(u, nodes);
  require_finite(u);
  GridFunction out = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto m = u.multi_index(i);
    out.values[i] =
        fraclap_quadrature(u, std::span<const int>(m.data(), static_cast<std::size_t>(u.n)), nodes);
  }
  return out;
}

double fraclap_pv_gradient_form(const GridFunction& u, std::span<const int> x,
                                std::span<const double> gradient, const QuadratureNodes& nodes) {
  check_nodes_match(u, nodes);
  if (gradient.size() != static_cast<std::size_t>(u.n))
    throw std::invalid_argument("gradient has the wrong dimension");
  const double ux = u.values[u.index_of(x)];
  double acc = 0.0;
  for (const auto& node : nodes.nodes) {
    double diff = u.values[wrapped_index(u, x, node.offset, +1)] - ux;
    if (node.radius < nodes.split_radius) {
      double gy = 0.0;
      for (int d = 0; d < u.n; ++d) gy += gradient[d] * node.y[d];
      diff -= gy;
    }
    acc += node.weight * diff;
  }
  double out = -acc;
  if (nodes.tail_coefficient != 0.0) out += nodes.tail_coefficient * (ux - u.mean());
  return out;
}

double fraclap_pv_gradient_form(const GridFunction& u, std::span<const int> x, double alpha,
                                const QuadratureConfig& config) {
  const auto nodes = build_quadrature_nodes(u.n, u.period, u.points, alpha, config);
  const auto grad = spectral_gradient(u);
  const std::size_t idx = u.index_of(x);
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (int d = 0; d < u.n; ++d) g[d] = grad[d].values[idx];
  return fraclap_pv_gradient_form(u, x, std::span<const double>(g.data(), std::size_t(u.n)),
                                  nodes);
}

GridFunction fraclap_pv_gradient_form_field(const GridFunction& u, const QuadratureNodes& nodes) {
  check_nodes_match(u, nodes);
  const auto grad = spectral_gradient(u);
  GridFunction out = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto m = u.multi_index(i);
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (int d = 0; d < u.n; ++d) g[d] = grad[d].values[i];
    out.values[i] = fraclap_pv_gradient_form(
        u, std::span<const int>(m.data(), static_cast<std::size_t>(u.n)),
        std::span<const double>(g.data(), static_cast<std::size_t>(u.n)), nodes);
  }
  return out;
}

double odd_correction_sum(const QuadratureNodes& nodes, std::span<const double> gradient) {
  if (gradient.size() != static_cast<std::size_t>(nodes.n))
    throw std::invalid_argument("gradient has the wrong dimension");
  double acc = 0.0;
  for (const auto& node : nodes.nodes) {
    if (node.radius >= nodes.split_radius) continue;
    double gy = 0.0;
    for (int d = 0; d < nodes.n; ++d) gy += gradient[d] * node.y[d];
    acc += node.weight * gy;
  }
  return acc;
}

}  // namespace fraclap
