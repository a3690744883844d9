#include "alone/alone.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "alone/error.hpp"

namespace alone {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double fidelity(const EncodingOperator& op, const ComplexVolume& x, const KSpaceData& y) {
  const KSpaceData ax = op.forward(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ax.samples.size(); ++i) s += std::norm(ax.samples[i] - y.samples[i]);
  return std::sqrt(s);
}

}  // namespace

void validate(const AloneConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) throw ConfigError("lambda must be positive");
  if (config.max_iterations < 1) throw ConfigError("T must be >= 1");
  if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (config.pcg_iterations < 1) throw ConfigError("n_iter must be >= 1");
  if (config.filters < 1) throw ConfigError("filter count must be >= 1");
  net::validate(config.train);
  if (config.initial_network && config.initial_network->mode() != config.mode) {
    throw ConfigError("initial network mode does not match the configured mode");
  }
  if (!config.train_network && !config.initial_network) {
    throw ConfigError("a fixed network needs initial parameters");
  }
}

PatchSamples patch_samples(const ComplexVolume& x, const PatchGeometry& geometry, net::Mode mode, bool normalize) {
  PatchSamples out{net::to_samples(extract_patches(x, geometry), mode), {}};
  if (normalize) out.records = net::normalize_samples(out.samples);
  return out;
}

PatchSet regularize_patches(const net::NetworkParams& params, const ComplexVolume& x, const PatchGeometry& geometry,
                            bool normalize) {
  PatchSamples in = patch_samples(x, geometry, params.mode(), normalize);
  net::SampleSet out = net::forward_all(params, in.samples);
  if (normalize) net::denormalize_samples(out, in.records);
  PatchSet z(geometry);
  net::from_samples(out, params.mode(), z);
  return z;
}

ComplexVolume right_hand_side(const ComplexVolume& adjoint_y, const PatchSet& z, double lambda) {
  ComplexVolume rhs = reassemble_sum(z);
  require_same_dims(rhs.dims(), adjoint_y.dims(), "right-hand side");
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = adjoint_y[i] + lambda * rhs[i];
  return rhs;
}

PcgResult solve_x_update(const NormalSystem& system, const ComplexVolume& rhs, const ComplexVolume& x0,
                         std::size_t iterations, double tolerance) {
  PcgOptions options;
  options.max_iterations = iterations;
  options.tolerance = tolerance;
  return pcg_solve([&](const ComplexVolume& v) { return system.apply(v); }, rhs, x0, options);
}

ComplexVolume closed_form_isometry(const CartesianOperator& op, const KSpaceData& y, const PatchSet& z,
                                   double lambda) {
  if (!op.coils().is_unit() || op.coils().n_coils() != 1) {
    throw PreconditionError("closed form needs a single-coil Cartesian operator");
  }
  if (!(lambda > 0.0)) throw PreconditionError("closed form needs lambda > 0");
  const RealVolume w = coverage_weights(z.geometry());
  const double beta = w.data.front();
  for (double v : w.data) {
    if (v != beta) throw PreconditionError("closed form needs uniform patch coverage");
  }
  // zbar = sum_j E_j^T z_j / beta. Since A^H A = F^H S^T S F is the projection
  // onto the sampled frequencies, zbar + A^H(y - A zbar) / (1 + lambda beta)
  // carries (y + lambda beta zhat) / (1 + lambda beta) on sampled entries and
  // zhat elsewhere.
  ComplexVolume zbar = reassemble_sum(z);
  zbar *= cx(1.0 / beta);
  KSpaceData r = op.forward(zbar);
  require_descriptor(op.descriptor(), y);
  const double scale = 1.0 / (1.0 + lambda * beta);
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] = (y.samples[i] - r.samples[i]) * scale;
  ComplexVolume x = op.adjoint(r);
  x += zbar;
  return x;
}

AloneResult alone_reconstruct(const KSpaceData& y, const EncodingOperator& op, const AloneConfig& config) {
  validate(config);
  require_descriptor(op.descriptor(), y);
  const PatchGeometry geometry(op.image_dims(), config.patch, config.stride);
  const NormalSystem system(op, geometry, config.lambda);

  AloneResult result;
  const ComplexVolume adjoint_y = op.adjoint(y);
  result.x = config.initial_image ? *config.initial_image : adjoint_y;
  require_same_dims(result.x.dims(), adjoint_y.dims(), "initial image");
  if (norm(result.x) == 0.0) {
    result.trace.status = TraceStatus::degenerate;
    result.trace.message = "starting image is zero";
    return result;
  }

  std::optional<net::NetworkParams> theta = config.initial_network;
  double change = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; k < config.max_iterations && (k == 0 || change > config.epsilon); ++k) {
    IterationRecord record;
    record.iteration = k + 1;

    auto start = Clock::now();
    PatchSamples training = patch_samples(result.x, geometry, config.mode, config.normalize_patches);
    if (config.train_network) {
      net::NetworkParams init = (config.warm_start && theta)
                                    ? *theta
                                    : net::NetworkParams::initialized(config.mode, config.filters,
                                                                      mix_seed(config.seed, 2 * k));
      net::TrainConfig train = config.train;
      train.seed = mix_seed(config.seed, 2 * k + 1);
      try {
        net::TrainResult trained = net::train(std::move(init), training.samples, config.lambda, train);
        theta = std::move(trained.params);
        record.train_loss = trained.final_loss;
      } catch (const DivergenceError& e) {
        result.trace.status = TraceStatus::diverged;
        result.trace.message = e.what();
        break;
      }
    } else {
      record.train_loss = net::loss(*theta, training.samples, config.lambda, config.train.penalty_weight);
    }
    record.t_train_s = seconds_since(start);

    start = Clock::now();
    const PatchSet z = regularize_patches(*theta, result.x, geometry, config.normalize_patches);
    record.t_reg_s = seconds_since(start);

    start = Clock::now();
    const ComplexVolume rhs = right_hand_side(adjoint_y, z, config.lambda);
    PcgResult solved;
    try {
      solved = solve_x_update(system, rhs, result.x, config.pcg_iterations, config.pcg_tolerance);
    } catch (const DivergenceError& e) {
      result.trace.status = TraceStatus::diverged;
      result.trace.message = e.what();
      break;
    }
    record.t_pcg_s = seconds_since(start);

    const double previous = squared_norm(result.x.data());
    ComplexVolume diff = solved.x - result.x;
    change = squared_norm(diff.data()) / previous;
    result.x = std::move(solved.x);
    record.relative_change = change;
    record.fidelity = fidelity(op, result.x, y);
    config.reference.fill(result.x, record);
    result.trace.records.push_back(record);

    if (norm(result.x) == 0.0) {
      result.trace.status = TraceStatus::degenerate;
      result.trace.message = "iterate vanished";
      break;
    }
  }
  if (result.trace.status == TraceStatus::completed && change <= config.epsilon && k < config.max_iterations) {
    result.trace.status = TraceStatus::converged;
  }
  result.network = std::move(theta);
  return result;
}

}  // namespace alone
