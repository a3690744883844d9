#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "alone/tensor.hpp"

namespace alone {

/// Extent along (x, y, t), used for patch shapes and strides.
struct Extent3 {
  std::size_t x = 1;
  std::size_t y = 1;
  std::size_t t = 1;

  std::size_t volume() const { return x * y * t; }
  friend bool operator==(const Extent3&, const Extent3&) = default;
};

/// Regular 3D patch grid. Requires 1 <= p <= N, 1 <= s <= p and (N - p)
/// divisible by s on every axis, so the grid tiles the image exactly.
class PatchGeometry {
 public:
  PatchGeometry(Dims image, Extent3 patch, Extent3 stride);

  const Dims& image() const { return image_; }
  const Extent3& patch() const { return patch_; }
  const Extent3& stride() const { return stride_; }
  /// Patches per axis.
  const Extent3& grid() const { return grid_; }

  std::size_t count() const { return grid_.volume(); }
  /// d = px * py * pt
  std::size_t patch_size() const { return patch_.volume(); }

  /// Voxel offset of patch j; enumeration is x-offset fastest, then y, then t.
  std::array<std::size_t, 3> origin(std::size_t j) const;

  friend bool operator==(const PatchGeometry&, const PatchGeometry&) = default;

 private:
  Dims image_;
  Extent3 patch_;
  Extent3 stride_;
  Extent3 grid_;
};

/// p = prod_a ((N_a - p_a) / s_a + 1); validates the geometry first.
std::size_t count_patches(const PatchGeometry& geometry);

/// Mean and standard deviation removed from one patch before it enters the
/// network. Patches with std below 1e-12 are left untouched and flagged.
struct NormalizationRecord {
  double mean = 0.0;
  double std = 1.0;
  bool constant = false;
};

/// Population statistics over all real scalars in `values`.
NormalizationRecord normalize_patch(std::span<double> values);
void denormalize_patch(std::span<double> values, const NormalizationRecord& record);
/// Complex patches use the 2d interleaved (re, im) scalars jointly.
NormalizationRecord normalize_patch(std::span<cx> values);
void denormalize_patch(std::span<cx> values, const NormalizationRecord& record);

/// E(x) = (E_1 x, ..., E_p x), each patch flattened x fastest, then y, then t.
class PatchSet {
 public:
  explicit PatchSet(PatchGeometry geometry);

  const PatchGeometry& geometry() const { return geometry_; }
  std::size_t count() const { return geometry_.count(); }
  std::size_t patch_size() const { return geometry_.patch_size(); }

  std::span<cx> patch(std::size_t j) { return {data_.data() + j * patch_size(), patch_size()}; }
  std::span<const cx> patch(std::size_t j) const { return {data_.data() + j * patch_size(), patch_size()}; }
  std::span<cx> data() { return data_; }
  std::span<const cx> data() const { return data_; }

  /// Normalizes every patch in place and stores the records for denormalize().
  void normalize();
  void denormalize();
  bool normalized() const { return !records_.empty(); }
  const std::vector<NormalizationRecord>& records() const { return records_; }
  void set_records(std::vector<NormalizationRecord> records);

 private:
  PatchGeometry geometry_;
  std::vector<cx> data_;
  std::vector<NormalizationRecord> records_;
};

/// E_j x written into `out` (length d).
void extract_patch(const ComplexVolume& x, const PatchGeometry& geometry, std::size_t j, std::span<cx> out);
/// x <- x + E_j^T q
void add_patch_adjoint(std::span<const cx> q, const PatchGeometry& geometry, std::size_t j, ComplexVolume& x);

PatchSet extract_patches(const ComplexVolume& x, const PatchGeometry& geometry);

/// sum_j E_j^T z_j
ComplexVolume reassemble_sum(const PatchSet& patches);
/// W^{-1} sum_j E_j^T z_j with W the per-voxel coverage count.
ComplexVolume reassemble_average(const PatchSet& patches);

/// diag(sum_j E_j^T E_j): number of patches containing each voxel.
RealVolume coverage_weights(const PatchGeometry& geometry);

}  // namespace alone
