#pragma once

#include <filesystem>

#include "alone/tensor.hpp"

namespace alone {

/// Volume file: 8-byte magic "ALNEVOL1", three little-endian u32 dims
/// (nx, ny, nt), then nx*ny*nt interleaved little-endian float32 (re, im).
void save_volume(const std::filesystem::path& path, const ComplexVolume& v);

/// Throws IoError when the file cannot be opened and FormatError for a bad
/// magic, zero or overflowing dims, or a payload of the wrong length.
ComplexVolume load_volume(const std::filesystem::path& path);

/// Magnitude of one frame as CSV, one image row (fixed y) per line.
void export_magnitude_csv(const std::filesystem::path& path, const ComplexVolume& v, std::size_t frame);

}  // namespace alone
