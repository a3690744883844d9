#pragma once

#include <filesystem>
#include <vector>

#include "alone/tensor.hpp"

namespace alone {

struct FrameExport {
  /// Magnitude mapped to gray level (m - min) * scale; scale is 0 for a constant volume.
  double min = 0.0;
  double max = 0.0;
  double scale = 0.0;
  std::vector<std::filesystem::path> files;
};

/// Writes frame_000.pgm ... (binary 8-bit PGM, one per frame) and
/// profile_xt.pgm, the row y = ny/2 stacked over time. All images share one
/// min-max scaling over the whole volume.
FrameExport export_frames(const ComplexVolume& v, const std::filesystem::path& directory);

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<unsigned char>& pixels);

}  // namespace alone
