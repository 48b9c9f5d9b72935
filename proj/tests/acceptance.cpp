// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fraclap/harness.hpp"

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig config(ExperimentKind kind, const std::vector<std::string>& sets = {}) {
  auto r = load_config(kind, nullptr, sets);
  if (!r.ok()) throw std::runtime_error("invalid acceptance config: " + r.errors.front());
  return r.config;
}

Verdict symbol_constant() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = a_constant(1, 1.0);
  const double secs = seconds_since(t0);
  const double rel = std::abs(a.value - std::numbers::pi) / std::numbers::pi;
  return {rel <= 1e-4 && secs < 10.0,
          "A(1,1)=" + std::to_string(a.value) + " rel_err=" + num(rel) + " time=" + num(secs) + "s"};
}

Verdict homogeneity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int n : {1, 2})
    for (double alpha : {0.3, 1.0, 1.7}) {
      std::vector<double> dir = n == 1 ? std::vector<double>{1.0}
                                       : std::vector<double>{std::cos(0.4), std::sin(0.4)};
      std::vector<std::vector<double>> xs;
      for (double r : {0.5, 1.0, 2.0, 4.0}) {
        auto x = dir;
        for (auto& v : x) v *= r;
        xs.push_back(x);
      }
      worst = std::max(worst, verify_homogeneity(n, alpha, xs).max_deviation);
    }
  const double secs = seconds_since(t0);
  return {worst < 1e-2 && secs < 60.0, "max_dev=" + num(worst) + " time=" + num(secs) + "s"};
}

Verdict rotation() {
  bool pass = true;
  double worst = 0.0;
  for (double angle : {0.5 * std::numbers::pi, 0.3, 2.0, -1.1}) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double rot[] = {c, -s, s, c};
    for (auto xi : {std::vector<double>{1.0, 0.0}, std::vector<double>{0.3, 0.7},
                    std::vector<double>{-2.0, 1.5}}) {
      const auto r = verify_rotation(2, 1.0, xi, rot);
      pass = pass && r.pass;
      worst = std::max(worst, r.difference / r.combined_error);
    }
  }
  return {pass, "12 cases, worst diff/err=" + num(worst)};
}

Verdict operators() {
  double at1024 = 0.0;
  bool decreasing = true;
  std::string detail;
  for (const char* f : {"cos", "expsin"}) {
    double prev = INFINITY;
    for (int p : {256, 512, 1024}) {
      const auto r = run_operators(config(ExperimentKind::operators,
                                          {std::string("test_function=") + f,
                                           "P=" + std::to_string(p)}));
      if (!(r.worst_relative_error < prev)) decreasing = false;
      prev = r.worst_relative_error;
      detail += std::string(f) + "@" + std::to_string(p) + "=" + num(prev) + " ";
    }
    at1024 = std::max(at1024, prev);
  }
  return {at1024 < 1e-2 && decreasing, detail};
}

Verdict conservation() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_drift = 0.0;
  bool max_ok = true;
  struct Case {
    int n;
    double alpha;
    std::int64_t radius, m;
  };
  for (const Case& cs : {Case{1, 1.3, 8, 100}, Case{2, 0.6, 5, 20}}) {
    const auto table = build_sampler(build_spec(cs.n, cs.alpha, cs.radius));
    const MasterEquation eq(table, cs.n, 0.1, cs.m);
    auto d = make_from_density(cs.n, 0.1, cs.m, [&](std::span<const double>) { return u(rng); });
    for (int s = 0; s < 1000; ++s) {
      const double before = d.total_mass() + d.leaked;
      const double mx = *std::max_element(d.mass.begin(), d.mass.end());
      d = eq.step(d);
      worst_drift = std::max(worst_drift, std::abs(d.total_mass() + d.leaked - before));
      if (*std::max_element(d.mass.begin(), d.mass.end()) > mx) max_ok = false;
    }
  }
  return {worst_drift <= 1e-12 && max_ok,
          "2000 steps, max drift per step=" + num(worst_drift) +
              (max_ok ? " max never increased" : " max increased")};
}

Verdict monte_carlo() {
  const auto r = run_walk(config(ExperimentKind::walk));
  return {r.pass, "TV=" + num(r.tv) + " envelope=" + num(r.envelope) +
                      " S=" + std::to_string(r.occupied) + " p=" + num(r.chi_square.p_value)};
}

Verdict moments() {
  int agree = 0, total = 0;
  for (const char* alpha : {"0.5", "1.0", "1.5"}) {
    const auto rows = run_moments(
        config(ExperimentKind::moments, {std::string("alpha=") + alpha, "beta=[0.25, 1.0, 1.75]"}));
    for (const auto& r : rows) {
      ++total;
      agree += r.empirical == r.analytic;
    }
  }
  return {agree == 9 && total == 9, std::to_string(agree) + "/" + std::to_string(total) + " agree"};
}

Verdict convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_converge(config(ExperimentKind::converge));
  const double secs = seconds_since(t0);
  std::string errs;
  for (const auto& row : r.rows) errs += num(row.error) + " ";
  return {r.pass && secs < 300.0,
          "errors=" + errs + "order=" + num(r.order) + " time=" + num(secs) + "s"};
}

Verdict semigroup() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    GridFunction u = make_grid(n, 3.0, n == 3 ? 16 : 64);
    for (auto& v : u.values) v = g(rng);
    const auto a = heat_evolve_spectral(heat_evolve_spectral(u, 1.3, 0.2), 1.3, 0.35);
    const auto b = heat_evolve_spectral(u, 1.3, 0.55);
    for (std::size_t i = 0; i < u.size(); ++i)
      worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  }
  return {worst <= 1e-12, "max diff=" + num(worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const auto base = fs::temp_directory_path() / "fraclap_acceptance";
  fs::remove_all(base);
  bool same = true;
  int files = 0;
  for (auto kind : {ExperimentKind::walk, ExperimentKind::converge, ExperimentKind::moments}) {
    const auto c = config(kind);
    const auto a = base / (std::string(to_string(kind)) + "_a");
    const auto b = base / (std::string(to_string(kind)) + "_b");
    run_experiment(c, a);
    run_experiment(c, b);
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) same = false;
    }
  }
  fs::remove_all(base);
  return {same && files > 0, std::to_string(files) + " CSV files compared"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"symbol constant A(1,1) = pi", symbol_constant},
      {"homogeneity of the symbol", homogeneity},
      {"rotational invariance", rotation},
      {"quadrature vs spectral operator", operators},
      {"conservation and maximum principle", conservation},
      {"Monte Carlo vs master equation", monte_carlo},
      {"beta-moment dichotomy", moments},
      {"discrete-to-continuum convergence", convergence},
      {"heat semigroup law", semigroup},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
