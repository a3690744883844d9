#include "alone/reference/encoding.hpp"

#include <cmath>
#include <numbers>

namespace alone::ref {

KSpaceData radial_forward(const Dims& dims, const RadialTrajectory& traj, const CoilMaps& coils,
                          const ComplexVolume& x) {
  KSpaceData y;
  y.descriptor = {SamplingKind::radial, coils.n_coils(), dims.nt, traj.total_samples() * coils.n_coils()};
  y.samples.reserve(y.descriptor.n_samples);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims.frame_size()));
  const double cx0 = static_cast<double>(dims.nx / 2);
  const double cy0 = static_cast<double>(dims.ny / 2);
  for (std::size_t t = 0; t < dims.nt; ++t) {
    const auto pts = traj.frame_points(t);
    for (std::size_t c = 0; c < coils.n_coils(); ++c) {
      const auto map = coils.map(c);
      for (const KPoint& k : pts) {
        cx acc{};
        for (std::size_t yy = 0; yy < dims.ny; ++yy) {
          for (std::size_t xx = 0; xx < dims.nx; ++xx) {
            const double phase =
                -(k.kx * (static_cast<double>(xx) - cx0) + k.ky * (static_cast<double>(yy) - cy0));
            acc += map[xx + dims.nx * yy] * x(xx, yy, t) * std::polar(1.0, phase);
          }
        }
        y.samples.push_back(acc * scale);
      }
    }
  }
  return y;
}

ComplexVolume radial_adjoint(const Dims& dims, const RadialTrajectory& traj, const CoilMaps& coils,
                             const KSpaceData& y) {
  ComplexVolume x(dims);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims.frame_size()));
  const double cx0 = static_cast<double>(dims.nx / 2);
  const double cy0 = static_cast<double>(dims.ny / 2);
  std::size_t s = 0;
  for (std::size_t t = 0; t < dims.nt; ++t) {
    const auto pts = traj.frame_points(t);
    for (std::size_t c = 0; c < coils.n_coils(); ++c) {
      const auto map = coils.map(c);
      for (const KPoint& k : pts) {
        const cx v = y.samples[s++];
        for (std::size_t yy = 0; yy < dims.ny; ++yy) {
          for (std::size_t xx = 0; xx < dims.nx; ++xx) {
            const double phase =
                k.kx * (static_cast<double>(xx) - cx0) + k.ky * (static_cast<double>(yy) - cy0);
            x(xx, yy, t) += std::conj(map[xx + dims.nx * yy]) * v * std::polar(1.0, phase) * scale;
          }
        }
      }
    }
  }
  return x;
}

KSpaceData cartesian_forward(const Dims& dims, const std::vector<FrameMask>& masks, const CoilMaps& coils,
                             const ComplexVolume& x) {
  KSpaceData y;
  y.descriptor = {SamplingKind::cartesian, coils.n_coils(), dims.nt, 0};
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims.frame_size()));
  for (std::size_t t = 0; t < dims.nt; ++t) {
    for (std::size_t c = 0; c < coils.n_coils(); ++c) {
      const auto map = coils.map(c);
      for (std::size_t ky = 0; ky < dims.ny; ++ky) {
        for (std::size_t kx = 0; kx < dims.nx; ++kx) {
          if (!masks[t][kx + dims.nx * ky]) continue;
          cx acc{};
          for (std::size_t yy = 0; yy < dims.ny; ++yy) {
            for (std::size_t xx = 0; xx < dims.nx; ++xx) {
              const double phase = -2.0 * std::numbers::pi *
                                   (static_cast<double>(kx * xx) / static_cast<double>(dims.nx) +
                                    static_cast<double>(ky * yy) / static_cast<double>(dims.ny));
              acc += map[xx + dims.nx * yy] * x(xx, yy, t) * std::polar(1.0, phase);
            }
          }
          y.samples.push_back(acc * scale);
        }
      }
    }
  }
  y.descriptor.n_samples = y.samples.size();
  return y;
}

}  // namespace alone::ref
