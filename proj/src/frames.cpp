#include "alone/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "alone/error.hpp"

namespace alone {

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<unsigned char>& pixels) {
  if (pixels.size() != width * height) throw DimensionError("PGM pixel count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

FrameExport export_frames(const ComplexVolume& v, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory " + directory.string() + ": " + ec.message());
  const RealVolume mag = magnitude(v);
  const Dims& d = v.dims();
  FrameExport result;
  if (!mag.data.empty()) {
    const auto [lo, hi] = std::minmax_element(mag.data.begin(), mag.data.end());
    result.min = *lo;
    result.max = *hi;
  }
  result.scale = result.max > result.min ? 255.0 / (result.max - result.min) : 0.0;
  const auto level = [&](double m) {
    return static_cast<unsigned char>(std::clamp(std::lround((m - result.min) * result.scale), 0L, 255L));
  };

  for (std::size_t t = 0; t < d.nt; ++t) {
    std::vector<unsigned char> px(d.frame_size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = level(mag.data[t * d.frame_size() + i]);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
    result.files.push_back(directory / name);
    write_pgm(result.files.back(), d.nx, d.ny, px);
  }
  std::vector<unsigned char> profile(d.nx * d.nt);
  const std::size_t row = d.ny / 2;
  for (std::size_t t = 0; t < d.nt; ++t) {
    for (std::size_t x = 0; x < d.nx; ++x) profile[x + d.nx * t] = level(mag(x, row, t));
  }
  result.files.push_back(directory / "profile_xt.pgm");
  write_pgm(result.files.back(), d.nx, d.nt, profile);
  return result;
}

}  // namespace alone
