#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "alone/tensor.hpp"

namespace alone {

/// A linear map on volumes; for pcg_solve it must be Hermitian positive definite.
using LinearMap = std::function<ComplexVolume(const ComplexVolume&)>;

struct PcgOptions {
  std::size_t max_iterations = 4;
  /// Stop once ||r|| <= tolerance * ||c||; 0 runs all iterations.
  double tolerance = 0.0;
  /// Applies M^{-1}; empty means the identity.
  LinearMap preconditioner;
};

struct PcgResult {
  ComplexVolume x;
  std::size_t iterations = 0;
  double residual_norm = 0.0;
  /// ||r_i|| for i = 0 (initial residual) .. iterations.
  std::vector<double> residual_history;
  bool converged = false;
};

/// Conjugate gradients for H x = c started at x0. Throws DivergenceError
/// on non-finite values or a non-positive curvature p^H H p.
PcgResult pcg_solve(const LinearMap& H, const ComplexVolume& c, const ComplexVolume& x0, const PcgOptions& options);

/// 0.5 Re(x^H H x) - Re(c^H x), the quadratic CG decreases at every step.
double quadratic_energy(const LinearMap& H, const ComplexVolume& c, const ComplexVolume& x);

}  // namespace alone
