#include "fraclap/lattice_walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "fft.hpp"

namespace fraclap {

namespace {

// Neumaier-compensated sum; used for the conservation bookkeeping.
double accurate_sum(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

std::size_t ipow(std::int64_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// Smallest integer >= x with no prime factor above 7.
int fft_friendly_size(std::int64_t x) {
  for (std::int64_t m = std::max<std::int64_t>(x, 1);; ++m) {
    std::int64_t r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return static_cast<int>(m);
  }
}

// Above this many (site, jump) pairs the automatic method switches to FFT.
constexpr double kDirectWorkLimit = 4.0e6;

}  // namespace

bool LatticeDistribution::contains(const LatticeVector& k) const {
  for (int i = 0; i < n; ++i)
    if (k[i] < -half_width || k[i] > half_width) return false;
  return true;
}

std::size_t LatticeDistribution::index_of(const LatticeVector& k) const {
  std::size_t idx = 0;
  const auto w = static_cast<std::size_t>(width());
  for (int i = 0; i < n; ++i) idx = idx * w + static_cast<std::size_t>(k[i] + half_width);
  return idx;
}

LatticeVector LatticeDistribution::site_of(std::size_t index) const {
  LatticeVector k{0, 0, 0};
  const auto w = static_cast<std::size_t>(width());
  for (int i = n - 1; i >= 0; --i) {
    k[i] = static_cast<std::int64_t>(index % w) - half_width;
    index /= w;
  }
  return k;
}

double LatticeDistribution::total_mass() const { return accurate_sum(mass); }

LatticeDistribution make_delta(int n, double h, std::int64_t half_width) {
  if (n < 1 || n > kMaxDimension) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(h > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  if (half_width < 0) throw std::invalid_argument("box half-width must be nonnegative");
  LatticeDistribution d;
  d.n = n;
  d.h = h;
  d.half_width = half_width;
  d.mass.assign(ipow(d.width(), n), 0.0);
  d.mass[d.index_of({0, 0, 0})] = 1.0;
  return d;
}

double smooth_bump(double x, double w) {
  if (std::abs(x) >= w) return 0.0;
  const double c = 1.0 + std::cos(std::numbers::pi * x / w);
  return c * c / (3.0 * w);
}

struct MasterEquation::FftState {
  std::vector<int> shape;
  std::vector<std::complex<double>> kernel_hat;
  std::unique_ptr<detail::FftPlan> plan;
};

MasterEquation::MasterEquation(const JumpSamplerTable& table, int n, double h,
                               std::int64_t half_width, StepMethod method)
    : entries_(table.entries),
      n_(n),
      h_(h),
      half_width_(half_width),
      tau_(std::pow(h, table.spec.alpha)),
      method_(method) {
  if (n != table.spec.n)
    throw std::invalid_argument("dimension mismatch: distribution n=" + std::to_string(n) +
                                ", kernel n=" + std::to_string(table.spec.n));
  for (const auto& e : entries_)
    for (int i = 0; i < n_; ++i) reach_ = std::max(reach_, std::abs(e.jump[i]));

  if (method_ == StepMethod::automatic) {
    const double work = static_cast<double>(ipow(2 * half_width + 1, n)) *
                        static_cast<double>(entries_.size());
    method_ = work > kDirectWorkLimit ? StepMethod::fft : StepMethod::direct;
  }
  if (method_ == StepMethod::fft) {
    fft_ = std::make_unique<FftState>();
    const std::int64_t w = 2 * half_width + 1;
    const int len = fft_friendly_size(w + reach_);
    fft_->shape.assign(static_cast<std::size_t>(n), len);
    fft_->plan = std::make_unique<detail::FftPlan>(fft_->shape);
    fft_->kernel_hat.assign(fft_->plan->size(), {0.0, 0.0});
    // Kernel stored at (-k) mod len turns the circular convolution into the
    // correlation Σ_k p_k old(x + k). len >= W + reach rules out wrap-around.
    for (const auto& e : entries_) {
      std::size_t idx = 0;
      for (int i = 0; i < n_; ++i) {
        const std::int64_t c = ((-e.jump[i]) % len + len) % len;
        idx = idx * static_cast<std::size_t>(len) + static_cast<std::size_t>(c);
      }
      fft_->kernel_hat[idx] += e.probability;
    }
    fft_->plan->forward(fft_->kernel_hat);
  }
}

MasterEquation::~MasterEquation() = default;
MasterEquation::MasterEquation(MasterEquation&&) noexcept = default;
MasterEquation& MasterEquation::operator=(MasterEquation&&) noexcept = default;

void MasterEquation::check_compatible(const LatticeDistribution& dist) const {
  if (dist.n != n_)
    throw std::invalid_argument("dimension mismatch: distribution n=" + std::to_string(dist.n) +
                                ", kernel n=" + std::to_string(n_));
  if (dist.half_width != half_width_ || dist.h != h_)
    throw std::invalid_argument("distribution box does not match the master equation");
  if (dist.mass.size() != ipow(2 * half_width_ + 1, n_))
    throw std::invalid_argument("distribution mass array has the wrong size");
}

void MasterEquation::step_direct(std::span<const double> in, std::span<double> out) const {
  const std::int64_t m = half_width_;
  const std::int64_t w = 2 * m + 1;
  std::int64_t stride[3] = {1, 1, 1};
  for (int i = n_ - 2; i >= 0; --i) stride[i] = stride[i + 1] * w;

  for (const auto& e : entries_) {
    // Target x must satisfy x in box and x + k in box, axis by axis.
    std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    bool empty = false;
    std::int64_t shift = 0;
    for (int i = 0; i < n_; ++i) {
      lo[i] = std::max(-m, -m - e.jump[i]);
      hi[i] = std::min(m, m - e.jump[i]);
      if (lo[i] > hi[i]) empty = true;
      shift += e.jump[i] * stride[i];
    }
    if (empty) continue;
    const double p = e.probability;
    const int last = n_ - 1;
    const std::int64_t run = hi[last] - lo[last] + 1;
    for (std::int64_t a = lo[0]; a <= (n_ > 1 ? hi[0] : lo[0]); ++a)
      for (std::int64_t b = (n_ > 2 ? lo[1] : 0); b <= (n_ > 2 ? hi[1] : 0); ++b) {
        std::int64_t base = 0;
        if (n_ == 1) {
          base = lo[0] + m;
        } else if (n_ == 2) {
          base = (a + m) * stride[0] + (lo[1] + m);
        } else {
          base = (a + m) * stride[0] + (b + m) * stride[1] + (lo[2] + m);
        }
        const double* src = in.data() + base + shift;
        double* dst = out.data() + base;
        for (std::int64_t j = 0; j < run; ++j) dst[j] += p * src[j];
      }
  }
}

void MasterEquation::step_fft(std::span<const double> in, std::span<double> out) const {
  const auto& shape = fft_->shape;
  const auto len = static_cast<std::size_t>(shape[0]);
  const auto w = static_cast<std::size_t>(2 * half_width_ + 1);
  std::vector<std::complex<double>> buf(fft_->plan->size(), {0.0, 0.0});

  auto padded_index = [&](std::size_t box_index) {
    std::size_t coord[3] = {0, 0, 0};
    for (int i = n_ - 1; i >= 0; --i) {
      coord[i] = box_index % w;
      box_index /= w;
    }
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i) idx = idx * len + coord[i];
    return idx;
  };

  for (std::size_t i = 0; i < in.size(); ++i) buf[padded_index(i)] = in[i];
  fft_->plan->forward(buf);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= fft_->kernel_hat[i];
  fft_->plan->inverse(buf);
  // Round-off can leave ~1e-17 negatives where the exact result is zero.
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, buf[padded_index(i)].real());
}

LatticeDistribution MasterEquation::step(const LatticeDistribution& dist) const {
  check_compatible(dist);
  LatticeDistribution next = dist;
  std::fill(next.mass.begin(), next.mass.end(), 0.0);
  if (method_ == StepMethod::fft)
    step_fft(dist.mass, next.mass);
  else
    step_direct(dist.mass, next.mass);

  const double departed = accurate_sum(dist.mass) - accurate_sum(next.mass);
  next.leaked = std::max(0.0, dist.leaked + departed);
  next.steps = dist.steps + 1;
  next.time = static_cast<double>(next.steps) * tau_;
  return next;
}

LatticeDistribution MasterEquation::evolve(const LatticeDistribution& dist,
                                           std::uint64_t steps) const {
  if (steps < 1) throw std::invalid_argument("evolve needs at least one step");
  LatticeDistribution cur = step(dist);
  for (std::uint64_t s = 1; s < steps; ++s) cur = step(cur);
  return cur;
}

LatticeDistribution master_step(const LatticeDistribution& dist, const JumpSamplerTable& table,
                                StepMethod method) {
  if (dist.n != table.spec.n)
    throw std::invalid_argument("dimension mismatch between distribution and kernel");
  return MasterEquation(table, dist.n, dist.h, dist.half_width, method).step(dist);
}

LatticeDistribution evolve(const LatticeDistribution& dist, const JumpSamplerTable& table,
                           std::uint64_t steps, StepMethod method) {
  if (dist.n != table.spec.n)
    throw std::invalid_argument("dimension mismatch between distribution and kernel");
  return MasterEquation(table, dist.n, dist.h, dist.half_width, method).evolve(dist, steps);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

LatticeVector sample_jump(const JumpSamplerTable& table, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  const auto& e = table.entries;
  auto it = std::upper_bound(e.begin(), e.end(), u,
                             [](double v, const SamplerEntry& s) { return v < s.cumulative; });
  if (it == e.end()) it = std::prev(e.end());
  return it->jump;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t walker_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

WalkEnsemble simulate_ensemble(const JumpSamplerTable& table, std::uint64_t walkers,
                               std::uint64_t steps, std::uint64_t seed, unsigned threads) {
  if (walkers < 1) throw std::invalid_argument("ensemble needs at least one walker");
  if (table.entries.empty()) throw std::invalid_argument("empty sampler table");
  WalkEnsemble ens;
  ens.positions.assign(walkers, LatticeVector{0, 0, 0});
  ens.steps_taken = steps;
  ens.rng_seed = seed;

  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      std::mt19937_64 rng(walker_seed(seed, i));
      LatticeVector pos{0, 0, 0};
      for (std::uint64_t s = 0; s < steps; ++s) {
        const LatticeVector k = sample_jump(table, rng);
        for (int d = 0; d < 3; ++d) pos[d] += k[d];
      }
      ens.positions[i] = pos;
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(walkers)));
  if (threads == 1) {
    run(0, walkers);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (walkers + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t b = t * chunk, e = std::min(walkers, b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return ens;
}

LatticeDistribution empirical_distribution(const WalkEnsemble& ens, const KernelSpec& spec,
                                           double h, std::int64_t half_width) {
  LatticeDistribution d = make_delta(spec.n, h, half_width);
  d.mass[d.index_of({0, 0, 0})] = 0.0;
  std::vector<std::uint64_t> counts(d.mass.size(), 0);
  std::uint64_t outside = 0;
  for (const auto& p : ens.positions) {
    if (d.contains(p))
      ++counts[d.index_of(p)];
    else
      ++outside;
  }
  const double inv_n = 1.0 / static_cast<double>(ens.positions.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    d.mass[i] = static_cast<double>(counts[i]) * inv_n;
  d.leaked = static_cast<double>(outside) * inv_n;
  d.steps = ens.steps_taken;
  d.time = static_cast<double>(ens.steps_taken) * std::pow(h, spec.alpha);
  return d;
}

double walk_characteristic_function(const JumpSamplerTable& table, double h,
                                    std::span<const double> xi, std::uint64_t m) {
  const int n = table.spec.n;
  if (xi.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("frequency vector has the wrong dimension");
  if (m == 0) return 1.0;
  double factor = 0.0;
  for (const auto& e : table.entries) {
    double phase = 0.0;
    for (int i = 0; i < n; ++i) phase += static_cast<double>(e.jump[i]) * xi[i];
    factor += e.probability * std::cos(h * phase);
  }
  return std::pow(factor, static_cast<double>(m));
}

std::complex<double> distribution_transform(const LatticeDistribution& dist,
                                            std::span<const double> xi) {
  if (xi.size() != static_cast<std::size_t>(dist.n))
    throw std::invalid_argument("frequency vector has the wrong dimension");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < dist.mass.size(); ++i) {
    if (dist.mass[i] == 0.0) continue;
    const LatticeVector k = dist.site_of(i);
    double phase = 0.0;
    for (int d = 0; d < dist.n; ++d) phase += static_cast<double>(k[d]) * xi[d];
    phase *= dist.h;
    re += dist.mass[i] * std::cos(phase);
    im += dist.mass[i] * std::sin(phase);
  }
  return {re, im};
}

double absolute_moment(const LatticeDistribution& dist, double beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.mass.size(); ++i) {
    if (dist.mass[i] == 0.0) continue;
    const double r = dist.h * euclidean_norm(dist.site_of(i));
    s += dist.mass[i] * (r == 0.0 ? (beta == 0.0 ? 1.0 : 0.0) : std::pow(r, beta));
  }
  return s;
}

}  // namespace fraclap
