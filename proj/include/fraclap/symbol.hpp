#pragma once

#include <span>
#include <vector>

#include "fraclap/kernel.hpp"

namespace fraclap {

/// Quadrature settings for J(ξ) = ∫ (1 − cos(ξ·y)) |y|^{-(n+α)} dy.
///
/// The integral is taken in polar form. Per direction θ the radial part
/// ∫ (1 − cos(s r)) r^{-1-α} dr, s = |ξ·θ|, is split into
///   [0, ε)       second-order Taylor term, exact; fourth-order remainder bounded,
///   [ε, R_θ]     Gauss–Legendre panels, geometric near ε and at most one
///                oscillation wide further out,
///   (R_θ, ∞)     the non-oscillatory part ∫ r^{-1-α} exact; the cosine part
///                bounded by min(R^{-α}/α, 2R^{-1-α}/s),
/// with R_θ = max(R_out, 2π·min_oscillations/s). Directions use the periodic
/// trapezoid rule in n = 2 and midpoint-in-cos(polar) × trapezoid in n = 3;
/// the difference from the rule with half the angular resolution estimates
/// the angular error.
struct SymbolConfig {
  double inner_cutoff = 1e-3;
  double outer_cutoff = 50.0;
  /// Directions on the circle (n = 2) or azimuths (n = 3, with half as many
  /// polar bands). 0 selects 1024 for n = 2 and 128 for n = 3.
  int angular_nodes = 0;
  int min_oscillations = 32;
};

struct SymbolEvaluation {
  std::vector<double> xi;
  /// J(ξ) = −S(ξ) ≥ 0, where S is the Fourier symbol of the operator
  /// ∫ (u(x+y) + u(x−y) − 2u(x)) K(y) dy with the overall factor 2 dropped.
  double value = 0.0;
  double error_estimate = 0.0;
  double inner_bound = 0.0;
  double outer_bound = 0.0;
  double angular_estimate = 0.0;
};

SymbolEvaluation symbol_from_kernel(std::span<const double> xi, int n, double alpha,
                                    const SymbolConfig& config = {});
SymbolEvaluation symbol_from_kernel(std::span<const double> xi, const KernelSpec& spec,
                                    const SymbolConfig& config = {});

struct ConstantEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// A(n, α) = J(e_1) = ∫ (1 − cos ζ_1) |ζ|^{-(n+α)} dζ. Cached per (n, α, config).
ConstantEstimate a_constant(int n, double alpha, const SymbolConfig& config = {});

struct HomogeneityRow {
  std::vector<double> xi;
  double magnitude = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
  double ratio = 0.0;      // J(ξ) / (A |ξ|^α)
  double deviation = 0.0;  // |ratio − 1|
  double allowed = 0.0;    // relative deviation covered by the error estimates
};

struct HomogeneityReport {
  int n = 1;
  double alpha = 1.0;
  ConstantEstimate a;
  std::vector<HomogeneityRow> rows;
  double max_deviation = 0.0;
  bool pass = false;
};

/// J(ξ) against A|ξ|^α over a set of nonzero frequencies.
HomogeneityReport verify_homogeneity(int n, double alpha,
                                     const std::vector<std::vector<double>>& xi_set,
                                     const SymbolConfig& config = {});

struct RotationReport {
  std::vector<double> xi;
  std::vector<double> rotated;
  double value = 0.0;
  double rotated_value = 0.0;
  double difference = 0.0;
  double combined_error = 0.0;
  double tolerance_factor = 2.0;
  bool pass = false;
};

/// |J(Rξ) − J(ξ)| against tolerance_factor × (sum of both error estimates).
/// `rotation` is row-major n×n; throws unless n >= 2 and R is orthogonal
/// within 1e-12.
RotationReport verify_rotation(int n, double alpha, std::span<const double> xi,
                               std::span<const double> rotation, const SymbolConfig& config = {},
                               double tolerance_factor = 2.0);

}  // namespace fraclap
