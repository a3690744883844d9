#include "alone/operators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "alone/error.hpp"

namespace alone {

// ---------------------------------------------------------------- coils

CoilMaps::CoilMaps(std::size_t nx, std::size_t ny, std::vector<std::vector<cx>> maps)
    : nx_(nx), ny_(ny), maps_(std::move(maps)) {
  if (maps_.empty()) throw DimensionError("CoilMaps: at least one coil required");
  for (const auto& m : maps_) {
    if (m.size() != nx * ny) throw DimensionError("CoilMaps: map size does not match grid");
  }
  unit_ = maps_.size() == 1;
  if (unit_) {
    for (const cx& v : maps_[0]) {
      if (v != cx{1.0, 0.0}) {
        unit_ = false;
        break;
      }
    }
  }
}

CoilMaps CoilMaps::single(std::size_t nx, std::size_t ny) {
  return CoilMaps(nx, ny, {std::vector<cx>(nx * ny, cx{1.0, 0.0})});
}

CoilMaps CoilMaps::synthetic(std::size_t nx, std::size_t ny, std::size_t n_coils) {
  if (n_coils == 0) throw ConfigError("n_coils must be >= 1");
  const double cx0 = 0.5 * static_cast<double>(nx);
  const double cy0 = 0.5 * static_cast<double>(ny);
  const double extent = static_cast<double>(std::max(nx, ny));
  const double sigma = 0.5 * extent;
  std::vector<std::vector<cx>> maps(n_coils, std::vector<cx>(nx * ny));
  for (std::size_t c = 0; c < n_coils; ++c) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(n_coils);
    const double px = cx0 + 0.7 * cx0 * std::cos(a);
    const double py = cy0 + 0.7 * cy0 * std::sin(a);
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        const double dx = static_cast<double>(x) - px;
        const double dy = static_cast<double>(y) - py;
        const double mag = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        const double ph = a + 0.5 * std::numbers::pi *
                                  ((static_cast<double>(x) - cx0) * std::cos(a) +
                                   (static_cast<double>(y) - cy0) * std::sin(a)) /
                                  extent;
        maps[c][x + nx * y] = std::polar(mag, ph);
      }
    }
  }
  for (std::size_t i = 0; i < nx * ny; ++i) {
    double sos = 0.0;
    for (const auto& m : maps) sos += std::norm(m[i]);
    const double s = 1.0 / std::sqrt(sos);
    for (auto& m : maps) m[i] *= s;
  }
  return CoilMaps(nx, ny, std::move(maps));
}

// ---------------------------------------------------------------- masks

std::vector<FrameMask> full_masks(const Dims& dims) {
  return std::vector<FrameMask>(dims.nt, FrameMask(dims.frame_size(), 1));
}

std::vector<FrameMask> random_masks(const Dims& dims, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("mask fraction must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FrameMask> masks(dims.nt, FrameMask(dims.frame_size(), 0));
  for (auto& m : masks) {
    for (auto& v : m) v = u(rng) < fraction ? 1 : 0;
    m[0] = 1;
  }
  return masks;
}

// ---------------------------------------------------------------- cartesian

CartesianOperator::CartesianOperator(Dims dims, std::vector<FrameMask> masks)
    : CartesianOperator(dims, std::move(masks), CoilMaps::single(dims.nx, dims.ny)) {}

CartesianOperator::CartesianOperator(Dims dims, std::vector<FrameMask> masks, CoilMaps coils)
    : dims_(dims), masks_(std::move(masks)), coils_(std::move(coils)), fft_(dims.nx, dims.ny) {
  if (dims_.size() == 0) throw DimensionError("CartesianOperator: empty dims");
  if (masks_.size() != dims_.nt) throw DimensionError("CartesianOperator: one mask per frame required");
  if (coils_.nx() != dims_.nx || coils_.ny() != dims_.ny) throw DimensionError("CartesianOperator: coil grid");
  sample_index_.resize(dims_.nt);
  for (std::size_t t = 0; t < dims_.nt; ++t) {
    if (masks_[t].size() != dims_.frame_size()) throw DimensionError("CartesianOperator: mask size");
    for (std::size_t i = 0; i < dims_.frame_size(); ++i) {
      if (masks_[t][i]) sample_index_[t].push_back(i);
    }
    frame_offset_.push_back(n_samples_);
    n_samples_ += sample_index_[t].size() * coils_.n_coils();
  }
}

SamplingDescriptor CartesianOperator::descriptor() const {
  return {SamplingKind::cartesian, coils_.n_coils(), dims_.nt, n_samples_};
}

bool CartesianOperator::is_full() const {
  for (const auto& m : masks_) {
    for (auto v : m) {
      if (!v) return false;
    }
  }
  return true;
}

KSpaceData CartesianOperator::forward(const ComplexVolume& x) const {
  require_same_dims(dims_, x.dims(), "CartesianOperator::forward");
  KSpaceData y{descriptor(), std::vector<cx>(n_samples_)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims_.frame_size()));
  const auto nt = static_cast<std::ptrdiff_t>(dims_.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    std::vector<cx> buf(dims_.frame_size());
    const auto frame = x.frame(t);
    const auto& idx = sample_index_[t];
    for (std::size_t c = 0; c < coils_.n_coils(); ++c) {
      const auto map = coils_.map(c);
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = map[i] * frame[i];
      fft_.forward(buf);
      cx* out = y.samples.data() + frame_offset_[t] + c * idx.size();
      for (std::size_t s = 0; s < idx.size(); ++s) out[s] = buf[idx[s]] * scale;
    }
  }
  return y;
}

ComplexVolume CartesianOperator::adjoint(const KSpaceData& y) const {
  require_descriptor(descriptor(), y);
  ComplexVolume x(dims_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims_.frame_size()));
  const auto nt = static_cast<std::ptrdiff_t>(dims_.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    std::vector<cx> buf(dims_.frame_size());
    auto frame = x.frame(t);
    const auto& idx = sample_index_[t];
    for (std::size_t c = 0; c < coils_.n_coils(); ++c) {
      std::fill(buf.begin(), buf.end(), cx{});
      const cx* in = y.samples.data() + frame_offset_[t] + c * idx.size();
      for (std::size_t s = 0; s < idx.size(); ++s) buf[idx[s]] = in[s];
      fft_.inverse(buf);
      const auto map = coils_.map(c);
      for (std::size_t i = 0; i < buf.size(); ++i) frame[i] += std::conj(map[i]) * buf[i] * scale;
    }
  }
  return x;
}

ComplexVolume CartesianOperator::normal(const ComplexVolume& x) const {
  require_same_dims(dims_, x.dims(), "CartesianOperator::normal");
  ComplexVolume out(dims_);
  const double scale = 1.0 / static_cast<double>(dims_.frame_size());
  const auto nt = static_cast<std::ptrdiff_t>(dims_.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    std::vector<cx> buf(dims_.frame_size());
    const auto in = x.frame(t);
    auto frame = out.frame(t);
    const auto& mask = masks_[t];
    for (std::size_t c = 0; c < coils_.n_coils(); ++c) {
      const auto map = coils_.map(c);
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = map[i] * in[i];
      fft_.forward(buf);
      for (std::size_t i = 0; i < buf.size(); ++i) {
        if (!mask[i]) buf[i] = cx{};
      }
      fft_.inverse(buf);
      for (std::size_t i = 0; i < buf.size(); ++i) frame[i] += std::conj(map[i]) * buf[i] * scale;
    }
  }
  return out;
}

ComplexVolume CartesianOperator::fft(const ComplexVolume& x) const {
  require_same_dims(dims_, x.dims(), "CartesianOperator::fft");
  ComplexVolume k = x;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims_.frame_size()));
  for (std::size_t t = 0; t < dims_.nt; ++t) {
    auto f = k.frame(t);
    fft_.forward(f);
    for (cx& v : f) v *= scale;
  }
  return k;
}

ComplexVolume CartesianOperator::ifft(const ComplexVolume& k) const {
  require_same_dims(dims_, k.dims(), "CartesianOperator::ifft");
  ComplexVolume x = k;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims_.frame_size()));
  for (std::size_t t = 0; t < dims_.nt; ++t) {
    auto f = x.frame(t);
    fft_.inverse(f);
    for (cx& v : f) v *= scale;
  }
  return x;
}

// ---------------------------------------------------------------- radial

using MatrixC = Eigen::Matrix<cx, Eigen::Dynamic, Eigen::Dynamic>;
using VectorC = Eigen::Matrix<cx, Eigen::Dynamic, 1>;

struct RadialOperator::FrameTables {
  MatrixC ex;                    // n_k x nx, exp(-i kx rx)
  MatrixC ey;                    // n_k x ny, exp(-i ky ry)
  std::vector<cx> toeplitz_hat;  // FFT of the A^H A kernel on the padded grid
};

RadialOperator::RadialOperator(Dims dims, RadialTrajectory trajectory)
    : RadialOperator(dims, std::move(trajectory), CoilMaps::single(dims.nx, dims.ny)) {}

RadialOperator::RadialOperator(Dims dims, RadialTrajectory trajectory, CoilMaps coils)
    : dims_(dims),
      trajectory_(std::move(trajectory)),
      coils_(std::move(coils)),
      padded_fft_(2 * dims.nx, 2 * dims.ny) {
  if (dims_.size() == 0) throw DimensionError("RadialOperator: empty dims");
  if (trajectory_.nt() != dims_.nt) throw DimensionError("RadialOperator: trajectory frame count differs from nt");
  if (coils_.nx() != dims_.nx || coils_.ny() != dims_.ny) throw DimensionError("RadialOperator: coil grid");

  const auto nx = static_cast<Eigen::Index>(dims_.nx);
  const auto ny = static_cast<Eigen::Index>(dims_.ny);
  const double cx0 = static_cast<double>(dims_.nx / 2);
  const double cy0 = static_cast<double>(dims_.ny / 2);
  const std::size_t mx = 2 * dims_.nx;
  const std::size_t my = 2 * dims_.ny;
  const double inv_n = 1.0 / static_cast<double>(dims_.frame_size());

  std::size_t offset = 0;
  frames_.resize(dims_.nt);
  for (std::size_t f = 0; f < dims_.nt; ++f) {
    frame_offset_.push_back(offset);
    offset += trajectory_.samples_in_frame(f) * coils_.n_coils();

    const auto pts = trajectory_.frame_points(f);
    const auto nk = static_cast<Eigen::Index>(pts.size());
    FrameTables& tab = frames_[f];
    tab.ex.resize(nk, nx);
    tab.ey.resize(nk, ny);
    // Lag tables exp(+i k d) for d in [-(n-1), n-1] build the Toeplitz kernel.
    MatrixC lag_x(nk, 2 * nx - 1);
    MatrixC lag_y(nk, 2 * ny - 1);
    for (Eigen::Index k = 0; k < nk; ++k) {
      const auto& p = pts[static_cast<std::size_t>(k)];
      for (Eigen::Index x = 0; x < nx; ++x) tab.ex(k, x) = std::polar(1.0, -p.kx * (static_cast<double>(x) - cx0));
      for (Eigen::Index y = 0; y < ny; ++y) tab.ey(k, y) = std::polar(1.0, -p.ky * (static_cast<double>(y) - cy0));
      for (Eigen::Index d = 0; d < 2 * nx - 1; ++d) lag_x(k, d) = std::polar(1.0, p.kx * static_cast<double>(d - (nx - 1)));
      for (Eigen::Index d = 0; d < 2 * ny - 1; ++d) lag_y(k, d) = std::polar(1.0, p.ky * static_cast<double>(d - (ny - 1)));
    }
    const MatrixC kernel = (lag_x.transpose() * lag_y) * inv_n;
    tab.toeplitz_hat.assign(mx * my, cx{});
    for (Eigen::Index dy = 0; dy < 2 * ny - 1; ++dy) {
      const std::size_t iy = static_cast<std::size_t>((dy - (ny - 1) + static_cast<Eigen::Index>(my))) % my;
      for (Eigen::Index dx = 0; dx < 2 * nx - 1; ++dx) {
        const std::size_t ix = static_cast<std::size_t>((dx - (nx - 1) + static_cast<Eigen::Index>(mx))) % mx;
        tab.toeplitz_hat[ix + mx * iy] = kernel(dx, dy);
      }
    }
    padded_fft_.forward(tab.toeplitz_hat);
  }
}

RadialOperator::~RadialOperator() = default;
RadialOperator::RadialOperator(RadialOperator&&) noexcept = default;

SamplingDescriptor RadialOperator::descriptor() const {
  return {SamplingKind::radial, coils_.n_coils(), dims_.nt, trajectory_.total_samples() * coils_.n_coils()};
}

KSpaceData RadialOperator::forward(const ComplexVolume& x) const {
  require_same_dims(dims_, x.dims(), "RadialOperator::forward");
  KSpaceData y{descriptor(), std::vector<cx>(descriptor().n_samples)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims_.frame_size()));
  const auto nx = static_cast<Eigen::Index>(dims_.nx);
  const auto ny = static_cast<Eigen::Index>(dims_.ny);
  const auto nt = static_cast<std::ptrdiff_t>(dims_.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    const FrameTables& tab = frames_[t];
    const Eigen::Index nk = tab.ex.rows();
    MatrixC weighted(nx, ny);
    const auto frame = x.frame(t);
    for (std::size_t c = 0; c < coils_.n_coils(); ++c) {
      const auto map = coils_.map(c);
      for (Eigen::Index i = 0; i < nx * ny; ++i) {
        weighted.data()[i] = map[static_cast<std::size_t>(i)] * frame[static_cast<std::size_t>(i)];
      }
      const MatrixC u = tab.ex * weighted;  // n_k x ny
      const VectorC col = u.cwiseProduct(tab.ey).rowwise().sum() * scale;
      std::copy_n(col.data(), nk, y.samples.begin() + static_cast<std::ptrdiff_t>(frame_offset_[t] + c * static_cast<std::size_t>(nk)));
    }
  }
  return y;
}

ComplexVolume RadialOperator::adjoint(const KSpaceData& y) const {
  require_descriptor(descriptor(), y);
  ComplexVolume x(dims_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims_.frame_size()));
  const auto nx = static_cast<Eigen::Index>(dims_.nx);
  const auto ny = static_cast<Eigen::Index>(dims_.ny);
  const auto nt = static_cast<std::ptrdiff_t>(dims_.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    const FrameTables& tab = frames_[t];
    const Eigen::Index nk = tab.ex.rows();
    auto frame = x.frame(t);
    for (std::size_t c = 0; c < coils_.n_coils(); ++c) {
      const VectorC in = Eigen::Map<const VectorC>(y.samples.data() + frame_offset_[t] + c * static_cast<std::size_t>(nk), nk);
      const MatrixC w = in.asDiagonal() * tab.ey.conjugate();  // n_k x ny
      const MatrixC img = tab.ex.adjoint() * w;                // nx x ny
      const auto map = coils_.map(c);
      for (Eigen::Index i = 0; i < nx * ny; ++i) {
        const auto s = static_cast<std::size_t>(i);
        frame[s] += std::conj(map[s]) * img.data()[i] * scale;
      }
    }
  }
  return x;
}

ComplexVolume RadialOperator::normal(const ComplexVolume& x) const {
  require_same_dims(dims_, x.dims(), "RadialOperator::normal");
  ComplexVolume out(dims_);
  const std::size_t nx = dims_.nx;
  const std::size_t ny = dims_.ny;
  const std::size_t mx = 2 * nx;
  const std::size_t my = 2 * ny;
  const double scale = 1.0 / static_cast<double>(mx * my);
  const auto nt = static_cast<std::ptrdiff_t>(dims_.nt);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t tt = 0; tt < nt; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    const auto& hat = frames_[t].toeplitz_hat;
    std::vector<cx> pad(mx * my);
    const auto in = x.frame(t);
    auto frame = out.frame(t);
    for (std::size_t c = 0; c < coils_.n_coils(); ++c) {
      const auto map = coils_.map(c);
      std::fill(pad.begin(), pad.end(), cx{});
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t xx = 0; xx < nx; ++xx) pad[xx + mx * y] = map[xx + nx * y] * in[xx + nx * y];
      }
      padded_fft_.forward(pad);
      for (std::size_t i = 0; i < pad.size(); ++i) pad[i] *= hat[i];
      padded_fft_.inverse(pad);
      for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t xx = 0; xx < nx; ++xx) {
          frame[xx + nx * y] += std::conj(map[xx + nx * y]) * pad[xx + mx * y] * scale;
        }
      }
    }
  }
  return out;
}

}  // namespace alone
