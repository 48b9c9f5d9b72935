#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "fraclap/fraclap_ops.hpp"
#include "fraclap/io.hpp"
#include "fraclap/symbol.hpp"
#include "gauss_rule.hpp"

using namespace fraclap;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction cos_mode(int n, double L, int P) {
  return sample_grid(n, L, P, [L](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return std::cos(2.0 * kPi * s / L);
  });
}

GridFunction smooth_field(int n, double L, int P, double phase) {
  return sample_grid(n, L, P, [=](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::sin(2.0 * kPi * x[i] / L + phase + i);
    return std::exp(0.7 * s);
  });
}

GridFunction random_field(int n, double L, int P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  GridFunction u = make_grid(n, L, P);
  for (auto& v : u.values) v = g(rng);
  return u;
}

double sup_diff(const GridFunction& a, const GridFunction& b, double scale = 1.0) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values[i] / scale - b.values[i]));
  return m;
}

double sup_norm(const GridFunction& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

// Relative sup distance between quadrature/A and the spectral operator.
double operator_gap(const GridFunction& u, double alpha) {
  const auto a = a_constant(u.n, alpha).value;
  const auto q = fraclap_quadrature_field(u, build_quadrature_nodes(u.n, u.period, u.points, alpha));
  const auto s = fraclap_spectral(u, alpha);
  return sup_diff(q, s, a) / sup_norm(s);
}

}  // namespace

TEST_CASE("gauss rule sanity") {
  const auto r = detail::gauss_legendre<16>();
  REQUIRE(r.size() == 16);
  double w = 0.0, m2 = 0.0, m30 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0) CHECK(r[i].x > r[i - 1].x);
    w += r[i].w;
    m2 += r[i].w * r[i].x * r[i].x;
    m30 += r[i].w * std::pow(r[i].x, 30);
  }
  CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(m30 == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
  CHECK(detail::gauss_legendre<5>().size() == 5);
}

TEST_CASE("multiplier shape") {
  const auto m = build_multiplier(2, 3.0, 8, 1.3);
  CHECK(m.multiplier[0] == 0.0);
  for (double v : m.multiplier) CHECK(v >= 0.0);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const double v = m.multiplier[a * 8 + b];
      CHECK(v == m.multiplier[b * 8 + a]);
      CHECK(v == m.multiplier[((8 - a) % 8) * 8 + b]);
      const double xa = 2 * kPi / 3.0 * signed_frequency(a, 8);
      const double xb = 2 * kPi / 3.0 * signed_frequency(b, 8);
      CHECK(v == doctest::Approx(std::pow(std::hypot(xa, xb), 1.3)).epsilon(1e-14));
    }
  CHECK(signed_frequency(4, 8) == -4);
  CHECK(signed_frequency(3, 8) == 3);
  CHECK(signed_frequency(5, 8) == -3);
}

TEST_CASE("spectral operator on constants and plane waves") {
  GridFunction c = make_grid(1, 2.0, 64);
  std::fill(c.values.begin(), c.values.end(), 3.5);
  CHECK(sup_norm(fraclap_spectral(c, 0.8)) <= 1e-13);

  const double L = 3.0;
  for (double alpha : {0.4, 1.0, 1.7}) {
    const auto u = cos_mode(1, L, 128);
    auto expected = u;
    for (auto& v : expected.values) v *= std::pow(2 * kPi / L, alpha);
    CHECK(sup_diff(fraclap_spectral(u, alpha), expected) <= 1e-11);
  }
}

TEST_CASE("every grid mode is an eigenfunction") {
  const int P = 16;
  const double L = 5.0, alpha = 1.3;
  for (int m = 0; m <= P / 2; ++m)
    for (int kind = 0; kind < 2; ++kind) {
      if (kind == 1 && (m == 0 || m == P / 2)) continue;  // sin vanishes on the grid
      const auto u = sample_grid(1, L, P, [&](std::span<const double> x) {
        const double t = 2 * kPi * m * x[0] / L;
        return kind == 0 ? std::cos(t) : std::sin(t);
      });
      auto expected = u;
      for (auto& v : expected.values) v *= std::pow(2 * kPi * m / L, alpha);
      CAPTURE(m);
      CHECK(sup_diff(fraclap_spectral(u, alpha), expected) <= 1e-12);
    }
}

TEST_CASE("alpha near two approaches minus the second derivative") {
  const double L = 2.0;
  const auto u = cos_mode(1, L, 64);
  auto second = u;
  for (auto& v : second.values) v *= std::pow(2 * kPi / L, 2.0);
  CHECK(sup_diff(fraclap_spectral(u, 1.999), second) <= 0.01 * sup_norm(second));
}

TEST_CASE("non-finite input is rejected") {
  auto u = cos_mode(1, 1.0, 8);
  u.values[3] = std::nan("");
  CHECK_THROWS_AS(fraclap_spectral(u, 1.0), std::invalid_argument);
  u.values[3] = INFINITY;
  CHECK_THROWS_AS(fraclap_quadrature_field(u, build_quadrature_nodes(1, 1.0, 8, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("heat semigroup") {
  const auto u = random_field(2, 4.0, 32, 1);
  const auto id = heat_evolve_spectral(u, 1.2, 0.0);
  CHECK(sup_diff(id, u) <= 1e-14);
  const auto two = heat_evolve_spectral(heat_evolve_spectral(u, 1.2, 0.3), 1.2, 0.45);
  const auto once = heat_evolve_spectral(u, 1.2, 0.75);
  CHECK(sup_diff(two, once) <= 1e-12);
  CHECK_THROWS_AS(heat_evolve_spectral(u, 1.2, -0.1), std::invalid_argument);

  const double L = 2 * kPi;
  const auto c = cos_mode(1, L, 64);
  auto decayed = c;
  for (auto& v : decayed.values) v *= std::exp(-1.0);
  CHECK(sup_diff(heat_evolve_spectral(c, 1.0, 1.0), decayed) <= 1e-14);
}

TEST_CASE("heat flow preserves the mean and dissipates energy") {
  auto u = random_field(1, 1.0, 64, 2);
  for (auto& v : u.values) v = std::abs(v);
  const double mu = u.mean();
  for (auto& v : u.values) v /= mu;
  CHECK(heat_evolve_spectral(u, 0.6, 0.2).mean() == doctest::Approx(1.0).epsilon(1e-14));

  auto z = random_field(1, 1.0, 64, 3);
  const double zm = z.mean();
  for (auto& v : z.values) v -= zm;
  double prev = INFINITY;
  for (double t : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    double e = 0.0;
    for (double v : heat_evolve_spectral(z, 0.6, t).values) e += v * v;
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("quadrature vanishes on constants") {
  for (int n : {1, 2}) {
    GridFunction c = make_grid(n, 2.0, 16);
    std::fill(c.values.begin(), c.values.end(), 1.7);
    for (auto tail : {TailMode::none, TailMode::periodic_images}) {
      QuadratureConfig cfg;
      cfg.tail = tail;
      const auto nodes = build_quadrature_nodes(n, 2.0, 16, 0.9, cfg);
      for (double v : fraclap_quadrature_field(c, nodes).values) CHECK(v == 0.0);
      for (double v : fraclap_pv_gradient_form_field(c, nodes).values) CHECK(std::abs(v) <= 1e-12);
    }
    QuadratureConfig mf;
    mf.tail = TailMode::mean_field;
    const auto nodes = build_quadrature_nodes(n, 2.0, 16, 0.9, mf);
    for (double v : fraclap_quadrature_field(c, nodes).values) CHECK(std::abs(v) <= 1e-13);
  }
}

TEST_CASE("quadrature over A matches the spectral operator on a cosine") {
  const double L = 2 * kPi;
  const auto u = cos_mode(1, L, 1024);
  const double a = a_constant(1, 1.0).value;
  const auto q = fraclap_quadrature_field(u, build_quadrature_nodes(1, L, 1024, 1.0));
  const auto s = fraclap_spectral(u, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    REQUIRE(std::abs(q.values[i] / a - s.values[i]) <= 0.01 * sup_norm(s));
}

TEST_CASE("operator gap shrinks as the grid is refined") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    double prev = INFINITY;
    for (int P : {256, 512, 1024}) {
      const double gap = operator_gap(smooth_field(1, 2 * kPi, P, 0.3), alpha);
      CAPTURE(alpha);
      CAPTURE(P);
      CHECK(gap < prev);
      prev = gap;
    }
  }
  const double g64 = operator_gap(smooth_field(2, 2 * kPi, 64, 0.1), 1.0);
  const double g128 = operator_gap(smooth_field(2, 2 * kPi, 128, 0.1), 1.0);
  CHECK(g128 < g64);
  CHECK(g128 < 0.05);
}

TEST_CASE("quadrature is linear") {
  const auto nodes = build_quadrature_nodes(1, 3.0, 128, 1.1);
  const auto u = smooth_field(1, 3.0, 128, 0.0), v = smooth_field(1, 3.0, 128, 1.0);
  auto w = u;
  for (std::size_t i = 0; i < w.size(); ++i) w.values[i] = 2.5 * u.values[i] - 0.75 * v.values[i];
  const auto qu = fraclap_quadrature_field(u, nodes), qv = fraclap_quadrature_field(v, nodes);
  const auto qw = fraclap_quadrature_field(w, nodes);
  for (std::size_t i = 0; i < w.size(); ++i)
    CHECK(qw.values[i] ==
          doctest::Approx(2.5 * qu.values[i] - 0.75 * qv.values[i]).epsilon(1e-10).scale(
              sup_norm(qw)));
}

TEST_CASE("gradient-corrected form equals the second-difference form") {
  for (int n : {1, 2}) {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const int P = n == 1 ? 256 : 32;
      const auto u = smooth_field(n, 2 * kPi, P, 0.4);
      const auto nodes = build_quadrature_nodes(n, 2 * kPi, P, alpha);
      const auto q = fraclap_quadrature_field(u, nodes);
      const auto g = fraclap_pv_gradient_form_field(u, nodes);
      CHECK(sup_diff(g, q) <= 1e-10 * sup_norm(q));
      const double grad[3] = {0.3, -1.7, 0.0};
      CHECK(std::abs(odd_correction_sum(nodes, std::span<const double>(grad, n))) <= 1e-12);
    }
  }
}

TEST_CASE("physical-coordinate evaluation") {
  const double L = 2.0;
  const auto u = smooth_field(1, L, 64, 0.2);
  const auto nodes = build_quadrature_nodes(1, L, 64, 0.8);
  const int j[] = {10};
  const double x[] = {10 * L / 64};
  CHECK(fraclap_quadrature(u, x, 0.8) == doctest::Approx(fraclap_quadrature(u, j, nodes)));
  CHECK(fraclap_pv_gradient_form(u, j, 0.8) == doctest::Approx(fraclap_quadrature(u, j, nodes)));
  const double off[] = {10.5 * L / 64};
  CHECK_THROWS_AS(fraclap_quadrature(u, off, 0.8), std::invalid_argument);
}

TEST_CASE("periodized kernel matches brute-force image sums") {
  const double L = 1.5, alpha = 0.7;
  for (double y0 : {0.05, 0.4, 0.75}) {
    const double y[] = {y0};
    const long J = 2000000;
    double brute = 0.0;
    for (long j = J; j >= 1; --j)
      brute += std::pow(std::abs(y0 + j * L), -1 - alpha) + std::pow(std::abs(y0 - j * L), -1 - alpha);
    brute += std::pow(y0, -1 - alpha);
    brute += 2.0 * std::pow((J + 0.5) * L, -alpha) / (alpha * L);
    CHECK(periodized_kernel(y, 1, L, alpha, 32) == doctest::Approx(brute).epsilon(1e-9));
  }
  const double y2[] = {0.3, -0.6};
  // image corrections converge rapidly in J; 128 shells is the reference
  const double ref = periodized_kernel(y2, 2, L, 1.2, 128);
  CHECK(periodized_kernel(y2, 2, L, 1.2, 8) == doctest::Approx(ref).epsilon(1e-7));
  CHECK(periodized_kernel(y2, 2, L, 1.2, 64) == doctest::Approx(ref).epsilon(1e-11));
  const double y3[] = {0.3, -0.6, 0.1};
  const double ref3 = periodized_kernel(y3, 3, L, 1.2, 48);
  CHECK(periodized_kernel(y3, 3, L, 1.2, 4) == doctest::Approx(ref3).epsilon(1e-6));
}

TEST_CASE("grid binary round trip and csv layout") {
  const auto dir = std::filesystem::temp_directory_path() / "fraclap_io_test";
  std::filesystem::create_directories(dir);
  const auto u = random_field(2, 1.5, 8, 4);
  write_grid_binary(u, dir / "u");
  const auto v = read_grid_binary(dir / "u");
  CHECK(v.n == 2);
  CHECK(v.points == 8);
  CHECK(v.period == 1.5);
  CHECK(v.values == u.values);
  CHECK_FALSE(std::filesystem::exists(dir / "u.bin.tmp"));
  const auto csv = grid_csv(u);
  CHECK(csv.rfind("x1,x2,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
  CHECK(format_double(0.1) == "0.10000000000000001");
  std::filesystem::remove_all(dir);
}
