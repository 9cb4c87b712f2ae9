#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace ymh {

using cplx = std::complex<double>;

/// Thin RAII wrapper around a pair of in-place c2c FFTW plans for one grid
/// shape. Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so execution
/// is deterministic and valid on any buffer with the planned layout.
/// Transforms are unnormalized; inverse() callers divide by the point count.
class FftPlan {
 public:
  explicit FftPlan(const std::vector<int>& dims) : dims_(dims) {
    std::size_t npts = 1;
    for (int d : dims_) npts *= static_cast<std::size_t>(d);
    std::vector<cplx> scratch(npts);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p,
                         FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p,
                         FFTW_BACKWARD, flags);
    if (fwd_ == nullptr || bwd_ == nullptr)
      throw std::runtime_error("FftPlan: plan creation failed");
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  void forward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(fwd_, p, p);
  }

  void backward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(bwd_, p, p);
  }

 private:
  std::vector<int> dims_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace ymh
