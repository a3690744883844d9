#include "alone/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>
#include <vector>

#include "alone/error.hpp"

namespace alone {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cx* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

Fft2d::Fft2d(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
  if (nx == 0 || ny == 0) throw DimensionError("Fft2d: empty grid");
  std::vector<cx> scratch(nx * ny);
  std::lock_guard lock(planner_mutex());
  // Row-major for FFTW: the slow axis is y, the contiguous axis is x.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), as_fftw(scratch.data()),
                                   as_fftw(scratch.data()), FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), as_fftw(scratch.data()),
                                   as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  if (!forward_plan_ || !inverse_plan_) throw Error("FFTW planning failed");
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

Fft2d::Fft2d(Fft2d&& other) noexcept
    : nx_(other.nx_),
      ny_(other.ny_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

Fft2d& Fft2d::operator=(Fft2d&& other) noexcept {
  if (this != &other) {
    std::swap(nx_, other.nx_);
    std::swap(ny_, other.ny_);
    std::swap(forward_plan_, other.forward_plan_);
    std::swap(inverse_plan_, other.inverse_plan_);
  }
  return *this;
}

void Fft2d::forward(std::span<cx> data) const {
  if (data.size() != nx_ * ny_) throw DimensionError("Fft2d::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

void Fft2d::inverse(std::span<cx> data) const {
  if (data.size() != nx_ * ny_) throw DimensionError("Fft2d::inverse: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace alone
