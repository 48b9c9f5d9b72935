#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fraclap::detail {

/// In-place multidimensional complex DFT backed by FFTW.
/// Plans use FFTW_ESTIMATE so the same size always takes the same code path.
/// Forward is unnormalized; inverse divides by the total size.
class FftPlan {
 public:
  explicit FftPlan(std::vector<int> shape);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return size_; }
  void forward(std::span<std::complex<double>> data) const;
  void inverse(std::span<std::complex<double>> data) const;

 private:
  void execute(void* plan, std::span<std::complex<double>> data) const;

  std::vector<int> shape_;
  std::size_t size_ = 1;
  std::vector<std::complex<double>> scratch_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

}  // namespace fraclap::detail
