#include "alone/volume_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "alone/error.hpp"
#include "binary_io.hpp"

namespace alone {

namespace {
constexpr std::string_view kVolumeMagic = "ALNEVOL1";
}

void save_volume(const std::filesystem::path& path, const ComplexVolume& v) {
  const Dims& d = v.dims();
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (d.nx > kMax || d.ny > kMax || d.nt > kMax) throw FormatError("volume dims exceed u32");
  detail::ByteWriter w;
  w.reserve(20 + v.size() * 8);
  w.magic(kVolumeMagic);
  w.u32(static_cast<std::uint32_t>(d.nx));
  w.u32(static_cast<std::uint32_t>(d.ny));
  w.u32(static_cast<std::uint32_t>(d.nt));
  for (const cx& s : v.data()) {
    w.f32(static_cast<float>(s.real()));
    w.f32(static_cast<float>(s.imag()));
  }
  w.write_to(path);
}

ComplexVolume load_volume(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic(kVolumeMagic);
  Dims d{r.u32(), r.u32(), r.u32()};
  if (d.nx == 0 || d.ny == 0 || d.nt == 0) throw FormatError(r.name() + ": zero dimension");
  // Guard the element count before multiplying out the payload size.
  const std::size_t limit = std::numeric_limits<std::size_t>::max() / 8;
  if (d.nx > limit / d.ny || d.nx * d.ny > limit / d.nt) throw FormatError(r.name() + ": dims overflow");
  if (r.remaining() != d.size() * 8) {
    throw FormatError(r.name() + ": payload holds " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(d.size() * 8));
  }
  std::vector<cx> data(d.size());
  for (cx& s : data) {
    const float re = r.f32();
    const float im = r.f32();
    s = {re, im};
  }
  return ComplexVolume(d, std::move(data));
}

void export_magnitude_csv(const std::filesystem::path& path, const ComplexVolume& v, std::size_t frame) {
  const Dims& d = v.dims();
  if (frame >= d.nt) throw DimensionError("export_magnitude_csv: frame out of range");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.precision(9);
  for (std::size_t y = 0; y < d.ny; ++y) {
    for (std::size_t x = 0; x < d.nx; ++x) {
      if (x) out << ',';
      out << std::abs(v(x, y, frame));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace alone
