#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "alone/tensor.hpp"

namespace alone {

enum class SamplingKind : std::uint32_t { cartesian = 1, radial = 2 };

/// Shape of a measurement vector y. Samples are ordered frame-major, then
/// coil, then the operator's own per-frame sample order.
struct SamplingDescriptor {
  SamplingKind kind = SamplingKind::cartesian;
  std::size_t n_coils = 1;
  std::size_t nt = 0;
  std::size_t n_samples = 0;

  friend bool operator==(const SamplingDescriptor&, const SamplingDescriptor&) = default;
};

struct KSpaceData {
  SamplingDescriptor descriptor;
  std::vector<cx> samples;

  std::span<const cx> data() const { return samples; }
};

void require_descriptor(const SamplingDescriptor& expected, const KSpaceData& y);

// Binary layout: "ALNEKSP1", u32 kind, u32 n_coils, u32 nt, u64 n_samples,
// then n_samples little-endian float64 (re, im) pairs.
void save_kspace(const std::filesystem::path& path, const KSpaceData& y);
KSpaceData load_kspace(const std::filesystem::path& path);

}  // namespace alone
