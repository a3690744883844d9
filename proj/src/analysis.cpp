#include "alone/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "alone/error.hpp"

namespace alone {

namespace {

double squared_data_residual(const ComplexVolume& x, const KSpaceData& y, const EncodingOperator& op) {
  require_descriptor(op.descriptor(), y);
  const KSpaceData ax = op.forward(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ax.samples.size(); ++i) s += std::norm(ax.samples[i] - y.samples[i]);
  return s;
}

double squared_adaptation(const ComplexVolume& x, const net::NetworkParams& theta, const PatchGeometry& geometry) {
  const net::SampleSet in = net::to_samples(extract_patches(x, geometry), theta.mode());
  const net::SampleSet out = net::forward_all(theta, in);
  double s = 0.0;
  const auto a = in.values();
  const auto b = out.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

ObjectiveTerms objective(const ComplexVolume& x, const net::NetworkParams& theta, const KSpaceData& y,
                         const EncodingOperator& op, const PatchGeometry& geometry, double lambda,
                         double penalty_weight) {
  ObjectiveTerms t;
  t.data = 0.5 * squared_data_residual(x, y, op);
  t.adaptation = 0.5 * lambda * squared_adaptation(x, theta, geometry);
  t.penalty = penalty_weight * net::kernel_penalty(theta);
  return t;
}

double adaptation_residual(const ComplexVolume& x, const net::NetworkParams& theta, const PatchGeometry& geometry) {
  return std::sqrt(squared_adaptation(x, theta, geometry));
}

FixedPointReport theta_adapted_residuals(const ComplexVolume& x, const net::NetworkParams& theta, const KSpaceData& y,
                                         const EncodingOperator& op, const PatchGeometry& geometry, double lambda,
                                         double penalty_weight) {
  FixedPointReport r;
  r.objective = objective(x, theta, y, op, geometry, lambda, penalty_weight);
  r.data_residual = std::sqrt(2.0 * r.objective.data);
  r.adaptation_residual = adaptation_residual(x, theta, geometry);
  return r;
}

net::NetworkParams identity_network(net::Mode mode) {
  const std::size_t channels = static_cast<std::size_t>(mode);
  net::NetworkParams p(mode, 2 * channels);
  for (std::size_t c = 0; c < channels; ++c) {
    p.tap(2 * c, c, 0, 0, 0) = 1.0;
    p.tap(2 * c + 1, c, 0, 0, 0) = -1.0;
    p.weight(c, 2 * c) = 1.0;
    p.weight(c, 2 * c + 1) = -1.0;
  }
  return p;
}

net::NetworkParams constant_network(cx c, std::size_t filters) {
  net::NetworkParams p(net::Mode::complex, filters);
  p.output_bias()[0] = c.real();
  p.output_bias()[1] = c.imag();
  return p;
}

AdaptedPair identity_adapted_pair(const EncodingOperator& op, const ComplexVolume& x) {
  require_same_dims(op.image_dims(), x.dims(), "adapted pair");
  return {x, identity_network(net::Mode::complex), op.forward(x)};
}

AdaptedPair constant_adapted_pair(const EncodingOperator& op, cx c) {
  ComplexVolume x(op.image_dims(), c);
  KSpaceData y = op.forward(x);
  return {std::move(x), constant_network(c), std::move(y)};
}

double fixed_point_movement(const AdaptedPair& pair, const EncodingOperator& op, const AloneConfig& config) {
  AloneConfig frozen = config;
  frozen.max_iterations = 1;
  frozen.train_network = false;
  frozen.initial_network = pair.theta;
  frozen.mode = pair.theta.mode();
  frozen.initial_image = pair.x;
  const AloneResult r = alone_reconstruct(pair.y, op, frozen);
  if (r.trace.records.size() != 1) throw PreconditionError("fixed-point iteration did not complete: " + r.trace.message);
  const ComplexVolume diff = r.x - pair.x;
  return norm(diff) / norm(pair.x);
}

PartialMinimizerReport partial_minimizer_check(const ComplexVolume& x, const net::NetworkParams& theta,
                                               const KSpaceData& y, const EncodingOperator& op,
                                               const PatchGeometry& geometry, double lambda, double penalty_weight,
                                               std::size_t n_probes, double radius, std::uint64_t seed,
                                               double slack) {
  if (n_probes < 1) throw ConfigError("partial minimizer check needs at least one probe");
  if (!(radius >= 0.0)) throw ConfigError("probe radius must be >= 0");
  PartialMinimizerReport report;
  report.base_objective = objective(x, theta, y, op, geometry, lambda, penalty_weight).total();
  report.x_probes.probes = report.theta_probes.probes = n_probes;
  report.x_probes.worst_margin = report.theta_probes.worst_margin = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const double x_scale = norm(x) > 0.0 ? radius * norm(x) : radius;
  double theta_norm = 0.0;
  for (double v : theta.values()) theta_norm += v * v;
  theta_norm = std::sqrt(theta_norm);
  const double theta_scale = theta_norm > 0.0 ? radius * theta_norm : radius;

  for (std::size_t i = 0; i < n_probes; ++i) {
    ComplexVolume dx(x.dims());
    for (std::size_t k = 0; k < dx.size(); ++k) {
      const double re = dist(rng);
      const double im = dist(rng);
      dx[k] = {re, im};
    }
    const double n = norm(dx);
    ComplexVolume probe = x;
    if (n > 0.0) axpy(cx(x_scale / n), dx.data(), probe.data());
    const double margin = objective(probe, theta, y, op, geometry, lambda, penalty_weight).total() -
                          report.base_objective;
    report.x_probes.worst_margin = std::min(report.x_probes.worst_margin, margin);
    if (margin >= -slack) ++report.x_probes.passed;
  }
  for (std::size_t i = 0; i < n_probes; ++i) {
    std::vector<double> d(theta.size());
    double n = 0.0;
    for (double& v : d) {
      v = dist(rng);
      n += v * v;
    }
    n = std::sqrt(n);
    net::NetworkParams probe = theta;
    auto values = probe.values();
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += n > 0.0 ? theta_scale * d[k] / n : 0.0;
    const double margin = objective(x, probe, y, op, geometry, lambda, penalty_weight).total() -
                          report.base_objective;
    report.theta_probes.worst_margin = std::min(report.theta_probes.worst_margin, margin);
    if (margin >= -slack) ++report.theta_probes.passed;
  }
  return report;
}

StabilityReport stability_experiment(const KSpaceData& y, const EncodingOperator& op, const AloneConfig& config,
                                     std::span<const double> levels, std::uint64_t noise_seed) {
  if (levels.empty()) throw ConfigError("stability experiment needs at least one noise level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0) || (i > 0 && !(levels[i] < levels[i - 1]))) {
      throw ConfigError("noise levels must be non-negative and strictly decreasing");
    }
  }
  require_descriptor(op.descriptor(), y);

  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<cx> xi(y.samples.size());
  for (cx& v : xi) {
    const double re = dist(rng);
    const double im = dist(rng);
    v = {re, im};
  }
  const double xi_norm = norm(std::span<const cx>(xi));
  const double y_norm = norm(std::span<const cx>(y.samples));

  const ComplexVolume baseline = alone_reconstruct(y, op, config).x;
  StabilityReport report;
  for (double level : levels) {
    KSpaceData noisy = y;
    const double scale = xi_norm > 0.0 ? level * y_norm / xi_norm : 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) noisy.samples[i] += scale * xi[i];
    const ComplexVolume x = alone_reconstruct(noisy, op, config).x;
    const ComplexVolume diff = x - baseline;
    report.rows.push_back({level, scale * xi_norm, norm(diff)});
  }
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].distance > 1.1 * report.rows[i - 1].distance) report.monotone = false;
  }
  const double first = report.rows.front().distance;
  const double last = report.rows.back().distance;
  report.halved = (first == 0.0 && last == 0.0) || last < first / 2.0;
  return report;
}

}  // namespace alone
