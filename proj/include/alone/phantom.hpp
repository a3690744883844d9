#pragma once

#include <cstdint>
#include <vector>

#include "alone/kspace.hpp"
#include "alone/operators.hpp"
#include "alone/tensor.hpp"

namespace alone {

/// Coordinates below are in units of the half field of view: (-1, -1) is the
/// corner at pixel (0, 0), (0, 0) the grid centre (nx/2, ny/2).
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double a = 0.5;
  double b = 0.5;
  double angle = 0.0;  // radians
  double intensity = 1.0;
};

/// Axis-aligned rectangle; thin ones serve as fine static structure.
struct Bar {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
  double intensity = 1.0;
};

struct PhantomSpec {
  Dims dims{64, 64, 16};
  /// Painted in order; each shape blends over the previous ones.
  std::vector<Ellipse> ellipses;
  std::vector<Bar> bars;
  double disk_cx = -0.05;
  double disk_cy = 0.05;
  double disk_radius = 0.16;
  double disk_amplitude = 0.05;
  double disk_intensity = 0.95;
  /// Edge transition width in pixels.
  double edge_width = 1.0;
  /// Relative depth of the smooth multiplicative intensity shading.
  double shading = 0.1;
  /// Peak magnitude of the smooth phase map, radians.
  double phase_amplitude = 0.6;
  std::uint64_t seed = 0;

  /// The default anatomy-like layout (body, organs, heart with beating pool, bars).
  static PhantomSpec standard(Dims dims = {64, 64, 16});
};

void validate(const PhantomSpec& spec);

/// r(t) = r0 + a sin(2 pi t / Nt)
double disk_radius(const PhantomSpec& spec, std::size_t t);

/// Deterministic for a fixed spec; magnitude lies in [0, 1].
ComplexVolume make_phantom(const PhantomSpec& spec);

/// y = A x + eta with independent N(0, noise_std^2) real and imaginary parts.
KSpaceData retrospective_sample(const ComplexVolume& x, const EncodingOperator& op, double noise_std,
                                std::uint64_t seed);

}  // namespace alone
