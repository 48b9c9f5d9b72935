#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

namespace fraclap::detail {

struct RulePoint {
  double x;
  double w;
};

/// Full N-point Gauss–Legendre rule on [-1, 1], ascending abscissae.
template <unsigned N>
std::vector<RulePoint> gauss_legendre() {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& a = rule::abscissa();
  const auto& w = rule::weights();
  std::vector<RulePoint> out;
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != 0.0) out.push_back({-a[i], w[i]});
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a[i], w[i]});
  return out;
}

}  // namespace fraclap::detail
