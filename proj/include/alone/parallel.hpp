#pragma once

namespace alone::parallel {

/// Number of OpenMP threads used by the parallel kernels. Every kernel
/// partitions work so that each output element is written by exactly one
/// thread in a fixed order, so results do not depend on this value.
void set_threads(int n);
int threads();

}  // namespace alone::parallel
