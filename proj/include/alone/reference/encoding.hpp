#pragma once

// Serial reference kernels: direct summation with one exponential per term.
// They define the operators' mathematics and back the equivalence tests and
// the serial-vs-parallel benchmark; they are far too slow for production use.

#include <vector>

#include "alone/kspace.hpp"
#include "alone/operators.hpp"
#include "alone/tensor.hpp"
#include "alone/trajectory.hpp"

namespace alone::ref {

KSpaceData radial_forward(const Dims& dims, const RadialTrajectory& traj, const CoilMaps& coils,
                          const ComplexVolume& x);
ComplexVolume radial_adjoint(const Dims& dims, const RadialTrajectory& traj, const CoilMaps& coils,
                             const KSpaceData& y);

/// Masked unitary DFT with coils, O(N^2) per frame.
KSpaceData cartesian_forward(const Dims& dims, const std::vector<FrameMask>& masks, const CoilMaps& coils,
                             const ComplexVolume& x);

}  // namespace alone::ref
