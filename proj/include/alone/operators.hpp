#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "alone/fft.hpp"
#include "alone/kspace.hpp"
#include "alone/tensor.hpp"
#include "alone/trajectory.hpp"

namespace alone {

/// Coil sensitivities C_1..C_nc, one complex (nx, ny) map per coil shared by all frames.
class CoilMaps {
 public:
  CoilMaps(std::size_t nx, std::size_t ny, std::vector<std::vector<cx>> maps);

  /// One coil with unit sensitivity.
  static CoilMaps single(std::size_t nx, std::size_t ny);
  /// Smooth complex Gaussians placed around the field of view, normalized so
  /// that sum_c |C_c|^2 = 1 at every pixel.
  static CoilMaps synthetic(std::size_t nx, std::size_t ny, std::size_t n_coils);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t n_coils() const { return maps_.size(); }
  std::span<const cx> map(std::size_t c) const { return maps_.at(c); }
  bool is_unit() const { return unit_; }

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<std::vector<cx>> maps_;
  bool unit_ = false;
};

/// Linear forward model A_I: image -> measured k-space samples.
class EncodingOperator {
 public:
  virtual ~EncodingOperator() = default;

  virtual const Dims& image_dims() const = 0;
  virtual SamplingDescriptor descriptor() const = 0;

  virtual KSpaceData forward(const ComplexVolume& x) const = 0;
  virtual ComplexVolume adjoint(const KSpaceData& y) const = 0;
  /// A^H A x. Implementations may use a faster exact route than adjoint(forward(x)).
  virtual ComplexVolume normal(const ComplexVolume& x) const { return adjoint(forward(x)); }
};

using FrameMask = std::vector<std::uint8_t>;

/// Per-frame binary masks over the Cartesian frequency grid.
std::vector<FrameMask> full_masks(const Dims& dims);
/// Independent uniform random masks keeping `fraction` of the grid; the DC
/// sample of every frame is always kept.
std::vector<FrameMask> random_masks(const Dims& dims, double fraction, std::uint64_t seed);

/// S_I o F o C: coil weighting, frame-wise unitary 2D FFT, mask selection.
/// Per frame and coil, samples are the masked grid positions in raster order.
class CartesianOperator final : public EncodingOperator {
 public:
  CartesianOperator(Dims dims, std::vector<FrameMask> masks, CoilMaps coils);
  CartesianOperator(Dims dims, std::vector<FrameMask> masks);

  const Dims& image_dims() const override { return dims_; }
  SamplingDescriptor descriptor() const override;
  KSpaceData forward(const ComplexVolume& x) const override;
  ComplexVolume adjoint(const KSpaceData& y) const override;
  ComplexVolume normal(const ComplexVolume& x) const override;

  const std::vector<FrameMask>& masks() const { return masks_; }
  const CoilMaps& coils() const { return coils_; }
  bool is_full() const;

  /// Unitary per-frame transforms on a single-coil grid (no masking).
  ComplexVolume fft(const ComplexVolume& x) const;
  ComplexVolume ifft(const ComplexVolume& k) const;

 private:
  Dims dims_;
  std::vector<FrameMask> masks_;
  CoilMaps coils_;
  std::vector<std::vector<std::size_t>> sample_index_;  // per frame: grid positions
  std::vector<std::size_t> frame_offset_;
  std::size_t n_samples_ = 0;
  Fft2d fft_;
};

/// Exact non-uniform DFT along golden-angle spokes, with optional coils:
/// y = sum_r C_c(r) x(r) exp(-i k.r) / sqrt(nx*ny), r centred on the grid.
/// normal() uses an exact Toeplitz embedding on a (2nx, 2ny) grid; the
/// direct adjoint(forward(x)) route stays available for checking it.
class RadialOperator final : public EncodingOperator {
 public:
  RadialOperator(Dims dims, RadialTrajectory trajectory, CoilMaps coils);
  RadialOperator(Dims dims, RadialTrajectory trajectory);
  ~RadialOperator() override;
  RadialOperator(RadialOperator&&) noexcept;

  const Dims& image_dims() const override { return dims_; }
  SamplingDescriptor descriptor() const override;
  KSpaceData forward(const ComplexVolume& x) const override;
  ComplexVolume adjoint(const KSpaceData& y) const override;
  ComplexVolume normal(const ComplexVolume& x) const override;
  ComplexVolume normal_direct(const ComplexVolume& x) const { return adjoint(forward(x)); }

  const RadialTrajectory& trajectory() const { return trajectory_; }
  const CoilMaps& coils() const { return coils_; }

 private:
  struct FrameTables;
  Dims dims_;
  RadialTrajectory trajectory_;
  CoilMaps coils_;
  std::vector<std::size_t> frame_offset_;
  std::vector<FrameTables> frames_;
  Fft2d padded_fft_;
};

}  // namespace alone
