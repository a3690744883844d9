#include "alone/kspace.hpp"

#include <string>

#include "alone/error.hpp"
#include "binary_io.hpp"

namespace alone {

namespace {
constexpr std::string_view kKSpaceMagic = "ALNEKSP1";
}

void require_descriptor(const SamplingDescriptor& expected, const KSpaceData& y) {
  if (!(expected == y.descriptor) || y.samples.size() != expected.n_samples) {
    throw DimensionError("k-space data does not match the operator sampling descriptor (expected " +
                         std::to_string(expected.n_samples) + " samples, " + std::to_string(expected.n_coils) +
                         " coils, got " + std::to_string(y.samples.size()) + " samples, " +
                         std::to_string(y.descriptor.n_coils) + " coils)");
  }
}

void save_kspace(const std::filesystem::path& path, const KSpaceData& y) {
  detail::ByteWriter w;
  w.reserve(36 + y.samples.size() * 16);
  w.magic(kKSpaceMagic);
  w.u32(static_cast<std::uint32_t>(y.descriptor.kind));
  w.u32(static_cast<std::uint32_t>(y.descriptor.n_coils));
  w.u32(static_cast<std::uint32_t>(y.descriptor.nt));
  w.u64(y.samples.size());
  for (const cx& s : y.samples) {
    w.f64(s.real());
    w.f64(s.imag());
  }
  w.write_to(path);
}

KSpaceData load_kspace(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic(kKSpaceMagic);
  KSpaceData y;
  const std::uint32_t kind = r.u32();
  if (kind != static_cast<std::uint32_t>(SamplingKind::cartesian) &&
      kind != static_cast<std::uint32_t>(SamplingKind::radial)) {
    throw FormatError(r.name() + ": unknown sampling kind " + std::to_string(kind));
  }
  y.descriptor.kind = static_cast<SamplingKind>(kind);
  y.descriptor.n_coils = r.u32();
  y.descriptor.nt = r.u32();
  y.descriptor.n_samples = r.u64();
  if (r.remaining() / 16 != y.descriptor.n_samples || r.remaining() % 16 != 0) {
    throw FormatError(r.name() + ": payload length does not match sample count");
  }
  y.samples.resize(y.descriptor.n_samples);
  for (cx& s : y.samples) {
    const double re = r.f64();
    const double im = r.f64();
    s = {re, im};
  }
  return y;
}

}  // namespace alone
