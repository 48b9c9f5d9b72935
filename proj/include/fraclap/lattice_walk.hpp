#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "fraclap/kernel.hpp"

namespace fraclap {

/// Probability masses on the box [-M, M]^n of the lattice hZ^n.
/// Sites are stored row-major, first coordinate slowest.
struct LatticeDistribution {
  int n = 1;
  double h = 1.0;
  std::int64_t half_width = 0;
  std::vector<double> mass;
  std::uint64_t steps = 0;
  double time = 0.0;
  /// Probability that has left the box.
  double leaked = 0.0;

  std::int64_t width() const { return 2 * half_width + 1; }
  std::size_t site_count() const { return mass.size(); }
  bool contains(const LatticeVector& k) const;
  std::size_t index_of(const LatticeVector& k) const;
  LatticeVector site_of(std::size_t index) const;
  double total_mass() const;
};

/// All mass at the origin.
LatticeDistribution make_delta(int n, double h, std::int64_t half_width);

/// Samples a density onto the box (mass ∝ h^n f(hk)) and rescales to unit
/// total mass. Throws if the sampled mass is not positive.
template <class Density>
LatticeDistribution make_from_density(int n, double h, std::int64_t half_width, Density&& f);

/// Raised-cosine-squared bump of half-width w, product form in n > 1:
/// b(x) = (1 + cos(πx/w))^2 / (3w) for |x| < w, else 0. C^3 with unit integral.
double smooth_bump(double x, double w);

enum class StepMethod { automatic, direct, fft };

/// Reusable master-equation operator for one (kernel, box) pair.
/// new(x) = Σ_k p_k old(x + k); mass whose jump lands outside the box is
/// added to `leaked`. Time advances by h^α per step.
class MasterEquation {
 public:
  MasterEquation(const JumpSamplerTable& table, int n, double h, std::int64_t half_width,
                 StepMethod method = StepMethod::automatic);
  ~MasterEquation();
  MasterEquation(MasterEquation&&) noexcept;
  MasterEquation& operator=(MasterEquation&&) noexcept;

  LatticeDistribution step(const LatticeDistribution& dist) const;
  LatticeDistribution evolve(const LatticeDistribution& dist, std::uint64_t steps) const;
  StepMethod method() const { return method_; }

 private:
  void check_compatible(const LatticeDistribution& dist) const;
  void step_direct(std::span<const double> in, std::span<double> out) const;
  void step_fft(std::span<const double> in, std::span<double> out) const;

  std::vector<SamplerEntry> entries_;
  std::int64_t reach_ = 0;
  int n_;
  double h_;
  std::int64_t half_width_;
  double tau_;
  StepMethod method_;
  struct FftState;
  std::unique_ptr<FftState> fft_;
};

/// One master-equation step; throws std::invalid_argument on dimension mismatch.
LatticeDistribution master_step(const LatticeDistribution& dist, const JumpSamplerTable& table,
                                StepMethod method = StepMethod::automatic);

LatticeDistribution evolve(const LatticeDistribution& dist, const JumpSamplerTable& table,
                           std::uint64_t steps, StepMethod method = StepMethod::automatic);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& rng);

/// Inverse-transform draw: binary search of a uniform over the cumulative table.
LatticeVector sample_jump(const JumpSamplerTable& table, std::mt19937_64& rng);

/// Seed for walker `index`: splitmix64(seed ^ splitmix64(index + 1)).
/// Part of the reproducibility contract; do not change.
std::uint64_t walker_seed(std::uint64_t seed, std::uint64_t index);

std::uint64_t splitmix64(std::uint64_t x);

struct WalkEnsemble {
  std::vector<LatticeVector> positions;
  std::uint64_t steps_taken = 0;
  std::uint64_t rng_seed = 0;
};

/// N walkers from the origin, each summing `steps` independent jumps.
/// Output does not depend on `threads`.
WalkEnsemble simulate_ensemble(const JumpSamplerTable& table, std::uint64_t walkers,
                               std::uint64_t steps, std::uint64_t seed, unsigned threads = 1);

/// Histogram of walker sites divided by N; walkers outside the box go to leaked.
LatticeDistribution empirical_distribution(const WalkEnsemble& ens, const KernelSpec& spec,
                                           double h, std::int64_t half_width);

/// Exact characteristic function of the m-step displacement:
/// (Σ_k p_k cos(h k·ξ))^m.
double walk_characteristic_function(const JumpSamplerTable& table, double h,
                                    std::span<const double> xi, std::uint64_t m);

/// Σ_x mass(x) exp(i h x·ξ) over the box.
std::complex<double> distribution_transform(const LatticeDistribution& dist,
                                            std::span<const double> xi);

/// Σ_x mass(x) |h x|^β.
double absolute_moment(const LatticeDistribution& dist, double beta);

// ---------------------------------------------------------------------------

template <class Density>
LatticeDistribution make_from_density(int n, double h, std::int64_t half_width, Density&& f) {
  LatticeDistribution d = make_delta(n, h, half_width);
  double total = 0.0;
  for (std::size_t i = 0; i < d.mass.size(); ++i) {
    const LatticeVector k = d.site_of(i);
    double x[3] = {h * static_cast<double>(k[0]), h * static_cast<double>(k[1]),
                   h * static_cast<double>(k[2])};
    const double v = f(std::span<const double>(x, static_cast<std::size_t>(n)));
    d.mass[i] = v < 0.0 ? 0.0 : v;
    total += d.mass[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("density has no mass on the box");
  for (auto& m : d.mass) m /= total;
  return d;
}

}  // namespace fraclap
