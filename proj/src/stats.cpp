#include "fraclap/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fraclap {

double total_variation(const LatticeDistribution& a, const LatticeDistribution& b) {
  if (a.mass.size() != b.mass.size() || a.n != b.n || a.half_width != b.half_width)
    throw std::invalid_argument("distributions live on different boxes");
  double s = std::abs(a.leaked - b.leaked);
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return 0.5 * s;
}

std::size_t occupied_sites(const LatticeDistribution& d) {
  std::size_t c = 0;
  for (double m : d.mass)
    if (m > 0.0) ++c;
  return c;
}

ChiSquareResult chi_square_test(std::span<const double> observed,
                                std::span<const double> expected_probability, double total,
                                double min_expected) {
  if (observed.size() != expected_probability.size())
    throw std::invalid_argument("chi-square: size mismatch");
  std::vector<double> obs, exp;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected_probability[i] * total;
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] <= 0.0) continue;
    const double d = obs[i] - exp[i];
    r.statistic += d * d / exp[i];
  }
  r.degrees_of_freedom = static_cast<int>(obs.size()) - 1;
  r.p_value = r.degrees_of_freedom > 0
                  ? boost::math::gamma_q(0.5 * r.degrees_of_freedom, 0.5 * r.statistic)
                  : 1.0;
  return r;
}

double fitted_order(std::span<const double> h, std::span<const double> error) {
  if (h.size() != error.size() || h.size() < 2)
    throw std::invalid_argument("order fit needs at least two (h, error) pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace fraclap
