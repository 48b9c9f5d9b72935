#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fraclap/harness.hpp"
#include "fraclap/io.hpp"

namespace fraclap {

namespace {

StepMethod parse_step_method(const std::string& s) {
  if (s == "direct") return StepMethod::direct;
  if (s == "fft") return StepMethod::fft;
  return StepMethod::automatic;
}

LatticeDistribution initial_distribution(const ExperimentConfig& c, double h, std::int64_t m) {
  if (c.initial == "delta") return make_delta(c.n, h, m);
  const double w = c.bump_width;
  return make_from_density(c.n, h, m, [w](std::span<const double> x) {
    double v = 1.0;
    for (double xi : x) v *= smooth_bump(xi, w);
    return v;
  });
}

std::uint64_t steps_for(double T, double h, double alpha) {
  return static_cast<std::uint64_t>(std::max(1.0, std::round(T / std::pow(h, alpha))));
}

double test_function(const std::string& name, std::span<const double> x, double L) {
  if (name == "constant") return 1.0;
  const double k = 2.0 * std::numbers::pi / L;
  if (name == "cos") {
    double s = 0.0;
    for (double v : x) s += v;
    return std::cos(k * s);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::sin(k * x[i] + static_cast<double>(i));
  return std::exp(s);
}

// Distance between the walk density mass/h^n and the heat flow on the
// periodic grid of 2M+1 points per axis; lattice site k sits at k mod (2M+1).
double spectral_reference_error(const LatticeDistribution& initial,
                                const LatticeDistribution& final, double t_cont,
                                double alpha, const std::string& norm) {
  const int n = initial.n;
  const double h = initial.h;
  const auto width = static_cast<int>(initial.width());
  const double cell = std::pow(h, n);
  GridFunction u0 = make_grid(n, width * h, width);
  std::vector<std::size_t> site(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const auto j = u0.multi_index(i);
    LatticeVector k{0, 0, 0};
    for (int d = 0; d < n; ++d) k[d] = j[d] <= initial.half_width ? j[d] : j[d] - width;
    site[i] = initial.index_of(k);
    u0.values[i] = initial.mass[site[i]] / cell;
  }
  const GridFunction ut = heat_evolve_spectral(u0, alpha, t_cont);
  double err = 0.0;
  for (std::size_t i = 0; i < ut.size(); ++i) {
    const double diff = std::abs(final.mass[site[i]] / cell - ut.values[i]);
    err = norm == "l1" ? err + diff * cell : std::max(err, diff);
  }
  if (norm == "l1") err += final.leaked;
  return err;
}

}  // namespace

WalkReport run_walk(const ExperimentConfig& c) {
  const std::int64_t radius = c.radius > 0 ? c.radius : 50;
  const auto spec = build_spec(c.n, c.alpha, radius);
  const auto table = build_sampler(spec);
  const auto reach = static_cast<std::int64_t>(c.steps) * radius;
  const std::int64_t m =
      c.M > 0 ? c.M : (c.n == 1 ? reach : std::min<std::int64_t>(reach, c.n == 2 ? 300 : 40));
  const double h = c.h.front();

  WalkReport rep;
  const auto ens = simulate_ensemble(table, c.N, c.steps, c.seed, c.threads);
  rep.empirical = empirical_distribution(ens, spec, h, m);
  const MasterEquation eq(table, c.n, h, m, parse_step_method(c.step_method));
  rep.master = eq.evolve(make_delta(c.n, h, m), c.steps);

  const auto total = static_cast<double>(c.N);
  rep.tv = total_variation(rep.empirical, rep.master);
  rep.occupied = occupied_sites(rep.empirical);
  rep.envelope = 4.0 * std::sqrt(static_cast<double>(rep.occupied) / total);

  std::vector<double> observed, expected;
  observed.reserve(rep.master.mass.size() + 1);
  expected.reserve(rep.master.mass.size() + 1);
  for (std::size_t i = 0; i < rep.master.mass.size(); ++i) {
    observed.push_back(std::round(rep.empirical.mass[i] * total));
    expected.push_back(rep.master.mass[i]);
  }
  observed.push_back(std::round(rep.empirical.leaked * total));
  expected.push_back(rep.master.leaked);
  rep.chi_square = chi_square_test(observed, expected, total);
  rep.pass = rep.tv < rep.envelope && rep.chi_square.p_value > 1e-3;
  return rep;
}

EvolveReport run_evolve(const ExperimentConfig& c) {
  const std::int64_t radius = c.radius > 0 ? c.radius : 50;
  const std::int64_t m = c.M > 0 ? c.M : 200;
  const double h = c.h.front();
  const auto table = build_sampler(build_spec(c.n, c.alpha, radius));
  const MasterEquation eq(table, c.n, h, m, parse_step_method(c.step_method));

  EvolveReport rep;
  rep.initial = initial_distribution(c, h, m);
  rep.final = eq.evolve(rep.initial, steps_for(c.T, h, c.alpha));
  rep.beta_probes = {0.25 * c.alpha, 0.5 * c.alpha, 0.75 * c.alpha};
  rep.pass = rep.final.leaked <= c.leak_cap;
  return rep;
}

SymbolReport run_symbol(const ExperimentConfig& c) {
  const auto cfg = c.symbol_config();
  SymbolReport rep;
  rep.a = a_constant(c.n, c.alpha, cfg);

  std::vector<std::pair<std::string, std::vector<double>>> rays = {
      {"axis", std::vector<double>(static_cast<std::size_t>(c.n), 0.0)}};
  rays[0].second[0] = 1.0;
  if (c.n >= 2)
    rays.push_back({"diagonal", std::vector<double>(static_cast<std::size_t>(c.n),
                                                    1.0 / std::sqrt(static_cast<double>(c.n)))});
  for (const auto& [label, dir] : rays) {
    std::vector<std::vector<double>> xs;
    for (double r : c.xi_magnitudes) {
      std::vector<double> x = dir;
      for (auto& v : x) v *= r;
      xs.push_back(std::move(x));
    }
    auto h = verify_homogeneity(c.n, c.alpha, xs, cfg);
    rep.max_deviation = std::max(rep.max_deviation, h.max_deviation);
    rep.rays.push_back(std::move(h));
    rep.ray_labels.push_back(label);
  }
  rep.pass = rep.max_deviation <= c.rel_tol;
  return rep;
}

OperatorsReport run_operators(const ExperimentConfig& c) {
  OperatorsReport rep;
  const GridFunction u = sample_grid(c.n, c.L, c.P, [&](std::span<const double> x) {
    return test_function(c.test_function, x, c.L);
  });
  require_finite(u);
  rep.spectral = fraclap_spectral(u, c.alpha);
  const auto a = a_constant(c.n, c.alpha, c.symbol_config());
  rep.a_value = a.value;
  rep.a_error = a.error_estimate;
  rep.a_used = a.value * c.a_multiplier;
  const auto nodes = build_quadrature_nodes(c.n, c.L, c.P, c.alpha);
  rep.quadrature_over_a = fraclap_quadrature_field(u, nodes);
  for (auto& v : rep.quadrature_over_a.values) v /= rep.a_used;

  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    scale = std::max(scale, std::abs(rep.spectral.values[i]));
    worst = std::max(worst, std::abs(rep.spectral.values[i] - rep.quadrature_over_a.values[i]));
  }
  // a constant has a zero image; the absolute error is then the measure
  rep.worst_relative_error = scale > 1e-12 ? worst / scale : worst;
  rep.pass = rep.worst_relative_error < c.rel_tol;
  return rep;
}

ConvergenceReport run_converge(const ExperimentConfig& c) {
  ConvergenceReport rep;
  rep.reference = c.reference;
  const auto a = a_constant(c.n, c.alpha, c.symbol_config());
  rep.a_value = a.value;
  rep.a_error = a.error_estimate;

  std::vector<double> hs, errs;
  rep.leak_ok = true;
  for (double h : c.h) {
    ConvergenceRow row;
    row.h = h;
    row.half_width = c.M > 0 ? c.M : static_cast<std::int64_t>(std::llround(c.box_length / h));
    row.radius = c.radius > 0 ? c.radius : 2 * row.half_width;
    const auto spec = build_spec(c.n, c.alpha, row.radius);
    const auto table = build_sampler(spec);
    const MasterEquation eq(table, c.n, h, row.half_width, parse_step_method(c.step_method));

    row.steps = steps_for(c.T, h, c.alpha);
    const auto initial = initial_distribution(c, h, row.half_width);
    const auto final = eq.evolve(initial, row.steps);
    row.time = final.time;
    // the walk generator is (A/Z)(−Δ)^{α/2}: Z normalizes the jump law
    row.continuum_time = a.value / spec.normalization * row.time;
    row.leaked = final.leaked;

    if (c.reference == "charfn") {
      // the cube's diagonal direction probes every axis in n > 1
      const double dir = 1.0 / std::sqrt(static_cast<double>(c.n));
      for (double s : c.xi) {
        std::vector<double> xi(static_cast<std::size_t>(c.n), s * dir);
        const auto walk = distribution_transform(final, xi);
        const auto ref = distribution_transform(initial, xi) *
                         std::exp(-std::pow(std::abs(s), c.alpha) * row.continuum_time);
        const double diff = std::abs(walk - ref);
        row.error = c.norm == "l1" ? row.error + diff : std::max(row.error, diff);
      }
    } else {
      row.error = spectral_reference_error(initial, final, row.continuum_time, c.alpha, c.norm);
    }
    if (row.leaked > c.leak_cap) rep.leak_ok = false;
    hs.push_back(h);
    errs.push_back(row.error);
    rep.rows.push_back(row);
  }

  bool finite = true;
  for (double e : errs)
    if (!(std::isfinite(e) && e > 0.0)) finite = false;
  rep.monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i)
    if (!(errs[i] < errs[i - 1])) rep.monotone = false;
  rep.order = finite ? fitted_order(hs, errs) : 0.0;
  rep.pass = finite && rep.monotone && rep.order > c.order_min && rep.leak_ok;

  if (!rep.leak_ok) {
    double worst = 0.0;
    for (const auto& r : rep.rows) worst = std::max(worst, r.leaked);
    rep.message = "leaked mass " + format_double(worst) + " exceeds leak_cap " +
                  format_double(c.leak_cap) +
                  "; enlarge the box (box_length or M) or shorten T";
  } else if (!finite) {
    rep.message = "errors must be finite and positive";
  } else if (!rep.monotone) {
    rep.message = "errors do not decrease strictly with h";
  } else if (!(rep.order > c.order_min)) {
    rep.message = "fitted order " + format_double(rep.order) + " is not above order_min";
  }
  return rep;
}

MomentClass empirical_moment_class(std::span<const std::int64_t> radii,
                                   std::span<const double> partials, double* growth) {
  if (radii.size() < 3 || partials.size() != radii.size())
    throw std::invalid_argument("moment growth needs partial sums at >= 3 radii");
  const std::size_t k = radii.size() - 1;
  const double last = partials[k] - partials[k - 1];
  const double prev = partials[k - 1] - partials[k - 2];
  const double g = std::log(last / prev) /
                   std::log(static_cast<double>(radii[k]) / static_cast<double>(radii[k - 1]));
  if (growth) *growth = g;
  return g > -0.05 ? MomentClass::divergent : MomentClass::convergent;
}

std::vector<MomentsRow> run_moments(const ExperimentConfig& c) {
  const std::int64_t radius = c.radius > 0 ? c.radius : (c.n == 1 ? 1000 : (c.n == 2 ? 100 : 20));
  const auto spec = build_spec(c.n, c.alpha, radius);
  std::vector<MomentsRow> rows;
  for (double beta : c.beta) {
    MomentsRow row;
    row.beta = beta;
    row.partials = beta_moment_partials(spec, beta, c.moment_radii);
    row.analytic = classify_moment(spec, beta);
    row.empirical = empirical_moment_class(c.moment_radii, row.partials, &row.growth_exponent);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fraclap
