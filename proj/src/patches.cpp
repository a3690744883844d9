#include "alone/patches.hpp"

#include <cmath>
#include <string>

#include "alone/error.hpp"

namespace alone {

namespace {

std::size_t axis_count(std::size_t n, std::size_t p, std::size_t s, const char* axis) {
  if (p < 1 || p > n) {
    throw GeometryError(std::string("patch extent along ") + axis + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (s < 1 || s > p) throw GeometryError(std::string("stride along ") + axis + " must lie in [1, patch extent]");
  if ((n - p) % s != 0) {
    throw GeometryError(std::string("(N - p) not divisible by stride along ") + axis + " (N=" + std::to_string(n) +
                        ", p=" + std::to_string(p) + ", s=" + std::to_string(s) + ")");
  }
  return (n - p) / s + 1;
}

// Number of patches covering index i along one axis.
std::vector<double> axis_coverage(std::size_t n, std::size_t p, std::size_t s) {
  std::vector<double> c(n, 0.0);
  for (std::size_t o = 0; o + p <= n; o += s) {
    for (std::size_t i = o; i < o + p; ++i) c[i] += 1.0;
  }
  return c;
}

}  // namespace

PatchGeometry::PatchGeometry(Dims image, Extent3 patch, Extent3 stride)
    : image_(image), patch_(patch), stride_(stride) {
  grid_.x = axis_count(image.nx, patch.x, stride.x, "x");
  grid_.y = axis_count(image.ny, patch.y, stride.y, "y");
  grid_.t = axis_count(image.nt, patch.t, stride.t, "t");
}

std::array<std::size_t, 3> PatchGeometry::origin(std::size_t j) const {
  const std::size_t ix = j % grid_.x;
  const std::size_t iy = (j / grid_.x) % grid_.y;
  const std::size_t it = j / (grid_.x * grid_.y);
  return {ix * stride_.x, iy * stride_.y, it * stride_.t};
}

std::size_t count_patches(const PatchGeometry& geometry) { return geometry.count(); }

NormalizationRecord normalize_patch(std::span<double> values) {
  NormalizationRecord rec;
  if (values.empty()) {
    rec.constant = true;
    return rec;
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (sd < 1e-12) {
    rec.constant = true;
    return rec;
  }
  rec.mean = mean;
  rec.std = sd;
  for (double& v : values) v = (v - mean) / sd;
  return rec;
}

void denormalize_patch(std::span<double> values, const NormalizationRecord& record) {
  if (record.constant) return;
  for (double& v : values) v = v * record.std + record.mean;
}

NormalizationRecord normalize_patch(std::span<cx> values) {
  return normalize_patch(std::span<double>(reinterpret_cast<double*>(values.data()), 2 * values.size()));
}

void denormalize_patch(std::span<cx> values, const NormalizationRecord& record) {
  denormalize_patch(std::span<double>(reinterpret_cast<double*>(values.data()), 2 * values.size()), record);
}

PatchSet::PatchSet(PatchGeometry geometry)
    : geometry_(std::move(geometry)), data_(geometry_.count() * geometry_.patch_size()) {}

void PatchSet::normalize() {
  if (normalized()) throw PreconditionError("PatchSet already normalized");
  records_.resize(count());
  for (std::size_t j = 0; j < count(); ++j) records_[j] = normalize_patch(patch(j));
}

void PatchSet::denormalize() {
  if (!normalized()) throw PreconditionError("PatchSet is not normalized");
  for (std::size_t j = 0; j < count(); ++j) denormalize_patch(patch(j), records_[j]);
  records_.clear();
}

void PatchSet::set_records(std::vector<NormalizationRecord> records) {
  if (records.size() != count() && !records.empty()) throw DimensionError("one normalization record per patch");
  records_ = std::move(records);
}

void extract_patch(const ComplexVolume& x, const PatchGeometry& g, std::size_t j, std::span<cx> out) {
  const Extent3& p = g.patch();
  const auto [ox, oy, ot] = g.origin(j);
  const Dims& d = g.image();
  std::size_t k = 0;
  for (std::size_t t = 0; t < p.t; ++t) {
    for (std::size_t y = 0; y < p.y; ++y) {
      const cx* row = &x[d.index(ox, oy + y, ot + t)];
      for (std::size_t xx = 0; xx < p.x; ++xx) out[k++] = row[xx];
    }
  }
}

void add_patch_adjoint(std::span<const cx> q, const PatchGeometry& g, std::size_t j, ComplexVolume& x) {
  const Extent3& p = g.patch();
  const auto [ox, oy, ot] = g.origin(j);
  const Dims& d = g.image();
  std::size_t k = 0;
  for (std::size_t t = 0; t < p.t; ++t) {
    for (std::size_t y = 0; y < p.y; ++y) {
      cx* row = &x[d.index(ox, oy + y, ot + t)];
      for (std::size_t xx = 0; xx < p.x; ++xx) row[xx] += q[k++];
    }
  }
}

PatchSet extract_patches(const ComplexVolume& x, const PatchGeometry& geometry) {
  require_same_dims(geometry.image(), x.dims(), "extract_patches");
  PatchSet set(geometry);
  const auto n = static_cast<std::ptrdiff_t>(set.count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    extract_patch(x, geometry, static_cast<std::size_t>(j), set.patch(static_cast<std::size_t>(j)));
  }
  return set;
}

ComplexVolume reassemble_sum(const PatchSet& patches) {
  const PatchGeometry& g = patches.geometry();
  const Dims& d = g.image();
  const Extent3& p = g.patch();
  ComplexVolume x(d);
  // Threads own whole output frames; every voxel accumulates patches in
  // ascending j, so the sum is identical for any thread count.
  const auto nt = static_cast<std::ptrdiff_t>(d.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    for (std::size_t j = 0; j < g.count(); ++j) {
      const auto [ox, oy, ot] = g.origin(j);
      if (t < ot || t >= ot + p.t) continue;
      const auto q = patches.patch(j);
      const std::size_t base = (t - ot) * p.x * p.y;
      for (std::size_t y = 0; y < p.y; ++y) {
        cx* row = &x[d.index(ox, oy + y, t)];
        const cx* src = q.data() + base + y * p.x;
        for (std::size_t xx = 0; xx < p.x; ++xx) row[xx] += src[xx];
      }
    }
  }
  return x;
}

ComplexVolume reassemble_average(const PatchSet& patches) {
  ComplexVolume x = reassemble_sum(patches);
  const RealVolume w = coverage_weights(patches.geometry());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w.data[i] <= 0.0) throw GeometryError("voxel not covered by any patch");
    x[i] /= w.data[i];
  }
  return x;
}

RealVolume coverage_weights(const PatchGeometry& g) {
  const Dims& d = g.image();
  const auto cx_ = axis_coverage(d.nx, g.patch().x, g.stride().x);
  const auto cy = axis_coverage(d.ny, g.patch().y, g.stride().y);
  const auto ct = axis_coverage(d.nt, g.patch().t, g.stride().t);
  RealVolume w(d);
  for (std::size_t t = 0; t < d.nt; ++t) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) w(x, y, t) = cx_[x] * cy[y] * ct[t];
    }
  }
  return w;
}

}  // namespace alone
