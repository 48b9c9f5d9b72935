#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace fraclap::detail {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw std::invalid_argument("FFT shape must be non-empty");
  for (int s : shape_) {
    if (s < 1) throw std::invalid_argument("FFT extents must be positive");
    size_ *= static_cast<std::size_t>(s);
  }
  scratch_.resize(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft(static_cast<int>(shape_.size()), shape_.data(), buf, buf, FFTW_FORWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  backward_ = fftw_plan_dft(static_cast<int>(shape_.size()), shape_.data(), buf, buf,
                            FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void FftPlan::execute(void* plan, std::span<std::complex<double>> data) const {
  if (data.size() != size_) throw std::invalid_argument("FFT buffer size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan), buf, buf);
}

void FftPlan::forward(std::span<std::complex<double>> data) const { execute(forward_, data); }

void FftPlan::inverse(std::span<std::complex<double>> data) const {
  execute(backward_, data);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : data) z *= scale;
}

}  // namespace fraclap::detail
