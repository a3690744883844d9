#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "alone/kspace.hpp"
#include "alone/operators.hpp"
#include "alone/tensor.hpp"
#include "alone/trace.hpp"

namespace alone {

/// Forward differences along x, y and t; the last difference on each axis is zero.
struct GradientField {
  Dims dims{};
  std::array<std::vector<cx>, 3> axis;

  GradientField() = default;
  explicit GradientField(Dims d);
};

GradientField grad3d(const ComplexVolume& x);
/// Discrete divergence, the negative adjoint of grad3d: <G x, g> = -<x, div g>.
ComplexVolume div3d(const GradientField& g);

/// Per voxel g * max(m - tau, 0) / m with m = sqrt(sum_a |g_a|^2).
GradientField isotropic_shrinkage(const GradientField& g, double tau);

/// sum over voxels of sqrt(sum_a |(G x)_a|^2)
double tv_value(const ComplexVolume& x);

double squared_norm(const GradientField& g);

struct TvConfig {
  /// Weight of ||G x||_1 in 0.5 ||A x - y||^2 + lambda ||G x||_1.
  double lambda = 0.01;
  double rho = 1.0;
  std::size_t outer_iterations = 16;
  /// The z-update is the exact proximal step, so only 1 is accepted.
  std::size_t shrink_iterations = 1;
  std::size_t pcg_iterations = 4;
  TraceReference reference;
};

void validate(const TvConfig& config);

struct TvResult {
  ComplexVolume x;
  IterationTrace trace;
};

/// ADMM with z = G x and scaled dual u, starting from x = A^H y, z = G x, u = 0.
TvResult tv_admm_reconstruct(const KSpaceData& y, const EncodingOperator& op, const TvConfig& config);

}  // namespace alone
