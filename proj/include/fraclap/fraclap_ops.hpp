#pragma once

#include <array>
#include <span>
#include <vector>

#include "fraclap/grid_function.hpp"

namespace fraclap {

/// |ξ|^α on the DFT frequencies of a grid, ξ = 2π m / L per axis.
struct SpectralMultiplier {
  int n = 1;
  double period = 1.0;
  int points = 1;
  double alpha = 1.0;
  std::vector<double> magnitude;   // |ξ| per frequency, DFT ordering
  std::vector<double> multiplier;  // |ξ|^α, zero at ξ = 0
};

SpectralMultiplier build_multiplier(int n, double period, int points, double alpha);

/// (−Δ)^{α/2} u = F^{-1}(|ξ|^α F u).
GridFunction fraclap_spectral(const GridFunction& u, double alpha);

/// Exact fractional heat semigroup: Fourier coefficients times exp(−|ξ|^α t).
GridFunction heat_evolve_spectral(const GridFunction& u0, double alpha, double t);

/// ∂u/∂x_d for d = 0..n-1 by spectral differentiation (Nyquist mode dropped).
std::vector<GridFunction> spectral_gradient(const GridFunction& u);

enum class TailMode {
  none,             // nodes with |y| <= r_out only
  mean_field,       // plus (u(x) − ū) ∫_{|y|>r_out} |y|^{-(n+α)} dy
  periodic_images,  // full cell with the kernel summed over all periodic images
};

struct QuadratureConfig {
  TailMode tail = TailMode::periodic_images;
  /// Node radius for the none / mean_field modes; 0 selects L/2.
  double r_out = 0.0;
  /// Image shells J summed directly in periodic_images mode; 0 selects a
  /// per-dimension default.
  int image_shells = 0;
  /// Radius inside which the gradient form subtracts ∇u(x)·y; 0 selects min(1, L/4).
  double split_radius = 0.0;
};

struct QuadratureNode {
  std::array<int, 3> offset;  // grid shift per axis
  std::array<double, 3> y;    // physical displacement
  double radius;
  double weight;  // cell volume × kernel × boundary factor
};

/// Node set shared by the second-difference and gradient-corrected forms.
/// Symmetric under y -> -y.
struct QuadratureNodes {
  int n = 1;
  double period = 1.0;
  int points = 1;
  double alpha = 1.0;
  QuadratureConfig config;
  double split_radius = 1.0;
  /// Coefficient of (u(x) − ū) added by the mean-field tail, else 0.
  double tail_coefficient = 0.0;
  std::vector<QuadratureNode> nodes;
};

QuadratureNodes build_quadrature_nodes(int n, double period, int points, double alpha,
                                       const QuadratureConfig& config = {});

/// Σ_{j ∈ Z^n} |y + jL|^{-(n+α)}, the kernel summed over periodic images.
double periodized_kernel(std::span<const double> y, int n, double period, double alpha,
                         int image_shells);

/// Unnormalized second-difference operator at a grid point:
/// (1/2) Σ_y w(y) [2u(x) − u(x+y) − u(x−y)] (+ tail). Approximates
/// A(n,α)·(−Δ)^{α/2}u(x).
double fraclap_quadrature(const GridFunction& u, std::span<const int> x,
                          const QuadratureNodes& nodes);
/// Physical-coordinate overload; throws if x is not a grid point.
double fraclap_quadrature(const GridFunction& u, std::span<const double> x, double alpha,
                          const QuadratureConfig& config = {});
GridFunction fraclap_quadrature_field(const GridFunction& u, const QuadratureNodes& nodes);

/// −Σ_y w(y) [u(x+y) − u(x) − 1{|y|<r_s} ∇u(x)·y] (+ tail), with ∇u(x) given.
double fraclap_pv_gradient_form(const GridFunction& u, std::span<const int> x,
                                std::span<const double> gradient, const QuadratureNodes& nodes);
/// Computes ∇u spectrally, then evaluates the gradient-corrected form.
double fraclap_pv_gradient_form(const GridFunction& u, std::span<const int> x, double alpha,
                                const QuadratureConfig& config = {});
GridFunction fraclap_pv_gradient_form_field(const GridFunction& u, const QuadratureNodes& nodes);

/// Σ_{|y|<r_s} w(y) (g·y); zero up to round-off on a symmetric node set.
double odd_correction_sum(const QuadratureNodes& nodes, std::span<const double> gradient);

}  // namespace fraclap
