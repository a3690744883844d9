#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "alone/alone.hpp"
#include "alone/kspace.hpp"
#include "alone/operators.hpp"
#include "alone/patches.hpp"
#include "alone/shallownet.hpp"

namespace alone {

/// Terms of J(x, theta) = 0.5 ||A x - y||^2 + (lambda/2) sum_j ||E_j x - f(E_j x)||^2 + w R(theta),
/// with the network applied to raw (un-normalized) patches.
struct ObjectiveTerms {
  double data = 0.0;        // 0.5 ||A x - y||^2
  double adaptation = 0.0;  // (lambda/2) sum_j ||E_j x - f(E_j x)||^2
  double penalty = 0.0;     // w R(theta)
  double total() const { return data + adaptation + penalty; }
};

ObjectiveTerms objective(const ComplexVolume& x, const net::NetworkParams& theta, const KSpaceData& y,
                         const EncodingOperator& op, const PatchGeometry& geometry, double lambda,
                         double penalty_weight);

/// || E x - f_theta(E x) ||_2 over all patches, raw patches.
double adaptation_residual(const ComplexVolume& x, const net::NetworkParams& theta, const PatchGeometry& geometry);

struct FixedPointReport {
  double data_residual = 0.0;        // ||A x - y||_2
  double adaptation_residual = 0.0;  // ||E x - f(E x)||_2
  ObjectiveTerms objective;
};

FixedPointReport theta_adapted_residuals(const ComplexVolume& x, const net::NetworkParams& theta, const KSpaceData& y,
                                         const EncodingOperator& op, const PatchGeometry& geometry, double lambda,
                                         double penalty_weight);

/// f(p) = p for every input: filters +-e_c on the centre tap of each channel,
/// recombined as relu(a) - relu(-a). K = 2C.
net::NetworkParams identity_network(net::Mode mode);
/// Zero kernels and output bias (Re c, Im c): f(p) = c on every voxel, R = 0.
net::NetworkParams constant_network(cx c, std::size_t filters = 1);

struct AdaptedPair {
  ComplexVolume x;
  net::NetworkParams theta;
  KSpaceData y;
};

/// (x, identity network) with y = A x. Reproduces every patch but R(theta) = 2C > 0,
/// so theta does not minimize the training loss.
AdaptedPair identity_adapted_pair(const EncodingOperator& op, const ComplexVolume& x);
/// (constant image c, constant network) with y = A x. The training loss is 0 here,
/// its global minimum.
AdaptedPair constant_adapted_pair(const EncodingOperator& op, cx c);

/// Relative movement ||x_1 - x|| / ||x|| of one ALONE iteration started at
/// x with the network frozen at theta.
double fixed_point_movement(const AdaptedPair& pair, const EncodingOperator& op, const AloneConfig& config);

struct ProbeReport {
  std::size_t probes = 0;
  std::size_t passed = 0;
  /// min over probes of J(probe) - J(base); negative means a probe lowered J.
  double worst_margin = 0.0;
  bool pass() const { return passed == probes; }
};

struct PartialMinimizerReport {
  double base_objective = 0.0;
  ProbeReport x_probes;
  ProbeReport theta_probes;
  bool pass() const { return x_probes.pass() && theta_probes.pass(); }
};

/// Evaluates J at (x + dx, theta) and (x, theta + dtheta) for seeded Gaussian
/// directions scaled to ||dx|| = radius ||x|| and ||dtheta|| = radius ||theta||
/// (absolute radius when the norm is zero). A probe passes unless it lowers J
/// by more than slack.
PartialMinimizerReport partial_minimizer_check(const ComplexVolume& x, const net::NetworkParams& theta,
                                               const KSpaceData& y, const EncodingOperator& op,
                                               const PatchGeometry& geometry, double lambda, double penalty_weight,
                                               std::size_t n_probes, double radius, std::uint64_t seed,
                                               double slack = 1e-10);

struct StabilityRow {
  double level = 0.0;
  double noise_norm = 0.0;
  double distance = 0.0;  // ||x_k(y + eta) - x_k(y)||_2
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool monotone = false;  // d_{l+1} <= 1.1 d_l for consecutive levels
  bool halved = false;    // d_last < d_first / 2 (or every distance is 0)
  bool pass() const { return monotone && halved; }
};

/// Runs ALONE on y and on y + eta_l for each level, with eta_l = level * ||y|| * xi / ||xi||
/// along one seeded complex Gaussian direction xi. Levels must be strictly
/// decreasing and non-negative.
StabilityReport stability_experiment(const KSpaceData& y, const EncodingOperator& op, const AloneConfig& config,
                                     std::span<const double> levels, std::uint64_t noise_seed);

}  // namespace alone
