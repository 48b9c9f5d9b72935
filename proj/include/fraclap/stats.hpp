#pragma once

#include <span>

#include "fraclap/lattice_walk.hpp"

namespace fraclap {

/// (1/2) Σ |a − b| over sites plus the leaked bin.
double total_variation(const LatticeDistribution& a, const LatticeDistribution& b);

/// Sites with positive mass.
std::size_t occupied_sites(const LatticeDistribution& d);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Pearson test of observed counts against expected probabilities. Bins are
/// pooled left to right until each pooled bin expects >= min_expected counts.
ChiSquareResult chi_square_test(std::span<const double> observed,
                                std::span<const double> expected_probability, double total,
                                double min_expected = 5.0);

/// Least-squares slope of log(error) against log(h).
double fitted_order(std::span<const double> h, std::span<const double> error);

}  // namespace fraclap
