#pragma once

#include <span>

#include "alone/shallownet.hpp"

namespace alone::ref {

/// f_theta by direct triple loops over voxels, filters and taps.
void network_forward(const net::NetworkParams& params, const Extent3& shape, std::span<const double> in,
                     std::span<double> out, net::Padding padding = net::Padding::zero);

/// network_forward over every sample, one after another.
net::SampleSet network_forward_all(const net::NetworkParams& params, const net::SampleSet& samples);

}  // namespace alone::ref
