#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "alone/kspace.hpp"
#include "alone/normal_system.hpp"
#include "alone/operators.hpp"
#include "alone/patches.hpp"
#include "alone/pcg.hpp"
#include "alone/shallownet.hpp"
#include "alone/trace.hpp"

namespace alone {

struct AloneConfig {
  double lambda = 0.1;
  std::size_t max_iterations = 25;  // T
  double epsilon = 0.0;             // stop once the squared relative change drops to epsilon or below
  std::size_t pcg_iterations = 4;
  double pcg_tolerance = 0.0;
  Extent3 patch{16, 16, 4};
  Extent3 stride{8, 8, 2};
  net::Mode mode = net::Mode::complex;
  std::size_t filters = 16;
  net::TrainConfig train;
  bool train_network = true;
  /// Start each training run from the previous iteration's parameters.
  bool warm_start = true;
  bool normalize_patches = true;
  std::uint64_t seed = 0;
  /// Replaces the seeded initialization; with train_network = false it stays fixed.
  std::optional<net::NetworkParams> initial_network;
  /// Starting image; A^H y when empty.
  std::optional<ComplexVolume> initial_image;
  TraceReference reference;
};

void validate(const AloneConfig& config);

struct AloneResult {
  ComplexVolume x;
  std::optional<net::NetworkParams> network;
  IterationTrace trace;
};

/// Normalized network samples of E(x) plus the records needed to undo the normalization.
struct PatchSamples {
  net::SampleSet samples;
  std::vector<NormalizationRecord> records;
};

PatchSamples patch_samples(const ComplexVolume& x, const PatchGeometry& geometry, net::Mode mode, bool normalize);

/// z_j = denormalize(f_theta(normalize(E_j x))) for every patch.
PatchSet regularize_patches(const net::NetworkParams& params, const ComplexVolume& x, const PatchGeometry& geometry,
                            bool normalize);

/// c = A^H y + lambda * sum_j E_j^T z_j, with A^H y passed in precomputed.
ComplexVolume right_hand_side(const ComplexVolume& adjoint_y, const PatchSet& z, double lambda);

/// Solves H x = c by PCG started at x0; shared by ALONE and the dictionary baseline.
PcgResult solve_x_update(const NormalSystem& system, const ComplexVolume& rhs, const ComplexVolume& x0,
                         std::size_t iterations, double tolerance);

/// Exact x-update for a single-coil Cartesian operator with uniform patch
/// coverage beta: sampled k-space entries become (y + lambda beta zhat) /
/// (1 + lambda beta), unsampled ones zhat, where zhat = F(sum_j E_j^T z_j / beta).
/// Throws PreconditionError for coils or non-uniform coverage.
ComplexVolume closed_form_isometry(const CartesianOperator& op, const KSpaceData& y, const PatchSet& z, double lambda);

/// Alternates network training on the patches of x_k with the quadratic
/// x-update, for at most T iterations. PCG divergence and a vanishing
/// iterate end the run early with the trace status set accordingly.
AloneResult alone_reconstruct(const KSpaceData& y, const EncodingOperator& op, const AloneConfig& config);

}  // namespace alone
