#pragma once

#include <cstddef>
#include <span>

#include "alone/tensor.hpp"

namespace alone {

/// Unnormalized in-place 2D DFT over an (nx, ny) grid stored x fastest.
/// Plans are created once; execution is safe from several threads on
/// distinct buffers.
class Fft2d {
 public:
  Fft2d(std::size_t nx, std::size_t ny);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;
  Fft2d(Fft2d&& other) noexcept;
  Fft2d& operator=(Fft2d&& other) noexcept;

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }

  /// X(k) = sum_r x(r) exp(-2 pi i k.r / n)
  void forward(std::span<cx> data) const;
  /// x(r) = sum_k X(k) exp(+2 pi i k.r / n), no 1/n factor.
  void inverse(std::span<cx> data) const;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace alone
