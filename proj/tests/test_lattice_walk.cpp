#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclap/lattice_walk.hpp"
#include "fraclap/stats.hpp"

using namespace fraclap;

namespace {

LatticeDistribution random_distribution(int n, double h, std::int64_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return make_from_density(n, h, m, [&](std::span<const double>) { return u(rng); });
}

bool interior(const LatticeDistribution& d, std::size_t i, std::int64_t margin) {
  const auto k = d.site_of(i);
  for (int a = 0; a < d.n; ++a)
    if (std::abs(k[a]) > d.half_width - margin) return false;
  return true;
}

}  // namespace

TEST_CASE("one step from a delta reproduces the jump law") {
  for (int n : {1, 2}) {
    const auto table = build_sampler(build_spec(n, 0.8, 5));
    const auto out = master_step(make_delta(n, 0.1, 12), table);
    CHECK(out.mass[out.index_of({0, 0, 0})] == 0.0);
    for (const auto& e : table.entries)
      CHECK(out.mass[out.index_of(e.jump)] == doctest::Approx(e.probability).epsilon(1e-15));
    CHECK(out.leaked == 0.0);
    CHECK(out.steps == 1);
  }
}

TEST_CASE("uniform mass is a fixed point away from the boundary") {
  const auto table = build_sampler(build_spec(1, 1.2, 6));
  auto d = make_delta(1, 1.0, 40);
  std::fill(d.mass.begin(), d.mass.end(), 1.0 / static_cast<double>(d.width()));
  const auto out = master_step(d, table);
  for (std::size_t i = 0; i < d.mass.size(); ++i)
    if (interior(d, i, 6)) CHECK(out.mass[i] == doctest::Approx(d.mass[i]).epsilon(1e-14));
}

TEST_CASE("mass plus leaked is conserved and time is steps times h^alpha") {
  const double h = 0.3, alpha = 1.4;
  const MasterEquation eq(build_sampler(build_spec(2, alpha, 7)), 2, h, 15);
  auto d = random_distribution(2, h, 15, 7);
  for (int s = 1; s <= 200; ++s) {
    const double before = d.total_mass() + d.leaked;
    d = eq.step(d);
    REQUIRE(std::abs(d.total_mass() + d.leaked - before) <= 1e-12);
    REQUIRE(*std::min_element(d.mass.begin(), d.mass.end()) >= 0.0);
  }
  CHECK(d.steps == 200);
  CHECK(d.time == doctest::Approx(200 * std::pow(h, alpha)).epsilon(1e-14));
  CHECK(d.leaked > 0.0);
}

TEST_CASE("evolve composes bit-identically") {
  const auto table = build_sampler(build_spec(1, 0.7, 9));
  const auto d = random_distribution(1, 0.2, 30, 3);
  const auto one = evolve(d, table, 1);
  const auto step = master_step(d, table);
  CHECK(one.mass == step.mass);
  CHECK(one.leaked == step.leaked);
  const auto five = evolve(d, table, 5);
  const auto two_three = evolve(evolve(d, table, 2), table, 3);
  CHECK(five.mass == two_three.mass);
  CHECK(five.leaked == two_three.leaked);
  CHECK(five.steps == two_three.steps);
  CHECK_THROWS_AS(evolve(d, table, 0), std::invalid_argument);
}

TEST_CASE("even data stays even") {
  const auto table = build_sampler(build_spec(1, 1.0, 20));
  const auto out = evolve(make_delta(1, 0.1, 100), table, 10);
  for (std::int64_t k = 1; k <= 100; ++k)
    CHECK(std::abs(out.mass[out.index_of({k, 0, 0})] - out.mass[out.index_of({-k, 0, 0})]) <=
          1e-15);
}

TEST_CASE("fft and direct steps agree") {
  for (int n : {1, 2}) {
    const auto table = build_sampler(build_spec(n, 1.1, n == 1 ? 40 : 8));
    const std::int64_t m = n == 1 ? 100 : 20;
    const MasterEquation direct(table, n, 0.5, m, StepMethod::direct);
    const MasterEquation fft(table, n, 0.5, m, StepMethod::fft);
    const auto d = random_distribution(n, 0.5, m, 11);
    const auto a = direct.evolve(d, 4), b = fft.evolve(d, 4);
    for (std::size_t i = 0; i < a.mass.size(); ++i) REQUIRE(std::abs(a.mass[i] - b.mass[i]) <= 1e-10);
    CHECK(std::abs(a.leaked - b.leaked) <= 1e-10);
  }
}

TEST_CASE("maximum principle in the interior") {
  const std::int64_t r = 4;
  const auto table = build_sampler(build_spec(1, 0.9, r));
  auto d = random_distribution(1, 1.0, 60, 5);
  for (int s = 0; s < 20; ++s) {
    const auto out = master_step(d, table);
    const double mx = *std::max_element(d.mass.begin(), d.mass.end());
    const double mn = *std::min_element(d.mass.begin(), d.mass.end());
    for (std::size_t i = 0; i < out.mass.size(); ++i) {
      REQUIRE(out.mass[i] <= mx);
      if (interior(out, i, r)) REQUIRE(out.mass[i] >= mn);
    }
    d = out;
  }
}

TEST_CASE("dimension and box mismatches are rejected") {
  const auto table = build_sampler(build_spec(2, 1.0, 3));
  CHECK_THROWS_AS(master_step(make_delta(1, 1.0, 5), table), std::invalid_argument);
  const MasterEquation eq(table, 2, 1.0, 5);
  CHECK_THROWS_AS(eq.step(make_delta(2, 1.0, 6)), std::invalid_argument);
  CHECK_THROWS_AS(MasterEquation(table, 1, 1.0, 5), std::invalid_argument);
}

TEST_CASE("splitmix64 matches the reference generator") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(walker_seed(42, 7) == splitmix64(42 ^ splitmix64(8)));
}

TEST_CASE("two-point jump law is fair") {
  const auto table = build_sampler(build_spec(1, 1.0, 1));
  std::mt19937_64 rng(1);
  const int draws = 1000000;
  int plus = 0;
  for (int i = 0; i < draws; ++i) plus += sample_jump(table, rng)[0] == 1;
  CHECK(std::abs(static_cast<double>(plus) / draws - 0.5) <= 0.0016);
}

TEST_CASE("jump length ratio follows the kernel") {
  const auto table = build_sampler(build_spec(1, 1.0, 2));
  std::mt19937_64 rng(2);
  const int draws = 1000000;
  double ones = 0, twos = 0;
  for (int i = 0; i < draws; ++i) (std::abs(sample_jump(table, rng)[0]) == 1 ? ones : twos) += 1;
  const double ratio = twos / ones;
  // delta method: Var(twos/ones) ≈ ratio² (1/twos + 1/ones) for a two-outcome split
  const double sigma = ratio * std::sqrt(1.0 / twos + 1.0 / ones);
  CHECK(std::abs(ratio - 0.25) <= 3.0 * sigma);
}

TEST_CASE("sampled jumps pass a chi-square test against the table") {
  const auto table = build_sampler(build_spec(2, 0.7, 10));
  std::vector<double> counts(table.entries.size(), 0.0), probs;
  for (const auto& e : table.entries) probs.push_back(e.probability);
  std::mt19937_64 rng(3);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    const auto k = sample_jump(table, rng);
    const auto it = std::find_if(table.entries.begin(), table.entries.end(),
                                 [&](const SamplerEntry& e) { return e.jump == k; });
    REQUIRE(it != table.entries.end());
    counts[static_cast<std::size_t>(it - table.entries.begin())] += 1.0;
  }
  const auto chi = chi_square_test(counts, probs, draws);
  CHECK(chi.p_value > 1e-3);
}

TEST_CASE("ensembles are reproducible and thread independent") {
  const auto table = build_sampler(build_spec(1, 1.0, 30));
  const auto zero = simulate_ensemble(table, 50, 0, 9);
  for (const auto& p : zero.positions) CHECK(p == LatticeVector{0, 0, 0});
  const auto a = simulate_ensemble(table, 5000, 20, 9, 1);
  const auto b = simulate_ensemble(table, 5000, 20, 9, 3);
  const auto c = simulate_ensemble(table, 5000, 20, 10, 1);
  CHECK(a.positions == b.positions);
  CHECK(a.positions != c.positions);
}

TEST_CASE("mean displacement is centred") {
  const auto table = build_sampler(build_spec(2, 1.0, 50));
  const auto ens = simulate_ensemble(table, 100000, 10, 4);
  for (int d = 0; d < 2; ++d) {
    double s = 0.0, s2 = 0.0;
    for (const auto& p : ens.positions) {
      s += static_cast<double>(p[d]);
      s2 += static_cast<double>(p[d]) * static_cast<double>(p[d]);
    }
    const double n = static_cast<double>(ens.positions.size());
    const double mean = s / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(n));
  }
}

TEST_CASE("empirical distributions") {
  const auto spec = build_spec(1, 1.0, 5);
  WalkEnsemble one;
  one.positions = {{0, 0, 0}};
  const auto d = empirical_distribution(one, spec, 0.5, 3);
  CHECK(d.mass == make_delta(1, 0.5, 3).mass);

  WalkEnsemble ens;
  ens.positions = {{1, 0, 0}, {-4, 0, 0}, {2, 0, 0}, {7, 0, 0}, {1, 0, 0}};
  const auto e = empirical_distribution(ens, spec, 0.5, 3);
  CHECK(e.total_mass() + e.leaked == 1.0);
  CHECK(e.leaked == doctest::Approx(0.4));
  std::reverse(ens.positions.begin(), ens.positions.end());
  const auto r = empirical_distribution(ens, spec, 0.5, 3);
  CHECK(r.mass == e.mass);
  CHECK(r.leaked == e.leaked);
}

TEST_CASE("characteristic function properties") {
  const auto table = build_sampler(build_spec(1, 1.0, 40));
  const double zero[] = {0.0};
  CHECK(walk_characteristic_function(table, 0.1, zero, 7) == doctest::Approx(1.0).epsilon(1e-14));
  const double some[] = {2.3};
  CHECK(walk_characteristic_function(table, 0.1, some, 0) == 1.0);
  for (int j = 0; j <= 200; ++j) {
    const double xi[] = {0.05 * j};
    const double f = walk_characteristic_function(table, 0.1, xi, 1);
    REQUIRE(std::abs(f) <= 1.0 + 1e-14);
    for (std::uint64_t m = 1; m < 6; ++m) {
      const double a = walk_characteristic_function(table, 0.1, xi, m);
      const double b = walk_characteristic_function(table, 0.1, xi, m + 1);
      REQUIRE(std::abs(b) <= 1.0 + 1e-14);
      if (f >= 0.0) REQUIRE(std::abs(b) <= std::abs(a) + 1e-14);
    }
  }
}

TEST_CASE("transform of the master solution matches the characteristic function") {
  const auto table = build_sampler(build_spec(1, 1.0, 20));
  const double h = 0.5;
  const auto d = evolve(make_delta(1, h, 400), table, 10);
  for (double s : {0.0, 0.3, 1.0, 2.5, 5.0}) {
    const double xi[] = {s};
    const double exact = walk_characteristic_function(table, h, xi, 10);
    CHECK(std::abs(distribution_transform(d, xi) - exact) <= d.leaked + 1e-12);
  }
}

TEST_CASE("Monte Carlo error shrinks like one over root N") {
  const auto spec = build_spec(1, 1.0, 10);
  const auto table = build_sampler(spec);
  const auto exact = evolve(make_delta(1, 1.0, 50), table, 5);
  std::vector<double> tv;
  for (std::uint64_t n : {1000, 10000, 100000}) {
    const auto ens = simulate_ensemble(table, n, 5, 21);
    tv.push_back(total_variation(empirical_distribution(ens, spec, 1.0, 50), exact));
  }
  CHECK(tv[1] < tv[0]);
  CHECK(tv[2] < tv[1]);
  // √100 = 10 in the ideal limit
  CHECK(tv[0] / tv[2] > 4.0);
  CHECK(tv[0] / tv[2] < 25.0);
}

TEST_CASE("absolute moments") {
  auto d = make_delta(1, 0.5, 4);
  d.mass.assign(d.mass.size(), 0.0);
  d.mass[d.index_of({2, 0, 0})] = 0.5;
  d.mass[d.index_of({-4, 0, 0})] = 0.5;
  CHECK(absolute_moment(d, 1.0) == doctest::Approx(0.5 * 1.0 + 0.5 * 2.0));
  CHECK(absolute_moment(d, 0.0) == doctest::Approx(1.0));
}
