#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fraclap {

/// Integer lattice vector. Only the first `n` coordinates are meaningful,
/// the rest stay zero so that comparisons and hashing are dimension-free.
using LatticeVector = std::array<std::int64_t, 3>;

inline constexpr int kMaxDimension = 3;

double norm_squared(const LatticeVector& k);
double euclidean_norm(const LatticeVector& k);
LatticeVector negate(const LatticeVector& k);

/// Surface area of the unit sphere S^{n-1} (2, 2π, 4π).
double unit_sphere_area(int n);

/// Heavy-tail jump kernel K(k) = |k|^{-(n+α)} truncated to 0 < |k| <= R.
struct KernelSpec {
  int n = 1;
  double alpha = 1.0;
  std::int64_t trunc_radius = 1;
  /// Z = sum of |k|^{-(n+α)} over the retained jumps.
  double normalization = 0.0;
  /// Upper bound on the discarded tail sum over |k| > R.
  double truncated_mass_bound = 0.0;
};

/// Validates and builds a spec. Throws std::invalid_argument on bad input.
KernelSpec build_spec(int n, double alpha, std::int64_t trunc_radius);

/// Unnormalized kernel value; K(0) = 0.
double kernel_value(const LatticeVector& k, const KernelSpec& spec);
double kernel_value(const LatticeVector& k, int n, double alpha);

/// Every lattice vector with 0 < |k| <= radius, sorted by ascending |k|
/// with lexicographic tiebreak. This is the canonical summation order.
std::vector<LatticeVector> ball_vectors(int n, std::int64_t radius);

/// Tail sum bound over |k| > R by comparison with the continuum integral.
double lattice_tail_bound(int n, double alpha, std::int64_t radius);

/// Σ_{0<|k|<=radius} |k|^β K(k)/Z. Jumps beyond the truncation radius are
/// included: this probes the untruncated kernel.
double beta_moment_partial(const KernelSpec& spec, double beta, std::int64_t radius);

/// Same quantity at several increasing radii, computed in a single sweep.
std::vector<double> beta_moment_partials(const KernelSpec& spec, double beta,
                                         std::span<const std::int64_t> radii);

enum class MomentClass { convergent, divergent };

/// Analytic criterion: the β-moment is finite iff β < α.
MomentClass classify_moment(const KernelSpec& spec, double beta);

const char* to_string(MomentClass c);

struct SamplerEntry {
  LatticeVector jump;
  double probability;
  double cumulative;
};

/// Inverse-transform table over the retained jumps.
struct JumpSamplerTable {
  KernelSpec spec;
  std::vector<SamplerEntry> entries;
};

JumpSamplerTable build_sampler(const KernelSpec& spec);

}  // namespace fraclap
