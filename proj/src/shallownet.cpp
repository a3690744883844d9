#include "alone/shallownet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "alone/error.hpp"
#include "binary_io.hpp"

namespace alone::net {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kMaxFilters = 1u << 20;

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

void check_mode(Mode mode) {
  if (mode != Mode::real && mode != Mode::complex) throw ConfigError("network mode must be real or complex");
}

// Columns of a V x 27C im2col matrix: column c*27 + tap holds the input of
// channel c displaced by the tap offset (zero or wrapped outside the block).
void build_columns(const Extent3& shape, std::size_t channels, std::span<const double> in, Padding padding,
                   double* cols) {
  const std::size_t v_count = shape.volume();
  const std::size_t width = channels * kTaps;
  for (std::size_t t = 0; t < shape.t; ++t) {
    for (std::size_t y = 0; y < shape.y; ++y) {
      for (std::size_t x = 0; x < shape.x; ++x) {
        double* row = cols + (x + shape.x * (y + shape.y * t)) * width;
        for (int dt = -1; dt <= 1; ++dt) {
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const std::size_t tap = static_cast<std::size_t>((dt + 1) * 9 + (dy + 1) * 3 + (dx + 1));
              const auto sx = static_cast<std::ptrdiff_t>(x) + dx;
              const auto sy = static_cast<std::ptrdiff_t>(y) + dy;
              const auto st = static_cast<std::ptrdiff_t>(t) + dt;
              const bool inside = sx >= 0 && sy >= 0 && st >= 0 && sx < static_cast<std::ptrdiff_t>(shape.x) &&
                                  sy < static_cast<std::ptrdiff_t>(shape.y) &&
                                  st < static_cast<std::ptrdiff_t>(shape.t);
              std::size_t src = 0;
              if (inside) {
                src = static_cast<std::size_t>(sx) + shape.x * (static_cast<std::size_t>(sy) +
                                                                shape.y * static_cast<std::size_t>(st));
              } else if (padding == Padding::circular) {
                src = wrap(sx, shape.x) + shape.x * (wrap(sy, shape.y) + shape.y * wrap(st, shape.t));
              }
              for (std::size_t c = 0; c < channels; ++c) {
                row[c * kTaps + tap] = (inside || padding == Padding::circular) ? in[c * v_count + src] : 0.0;
              }
            }
          }
        }
      }
    }
  }
}

void check_sample_shape(const NetworkParams& params, const SampleSet& samples) {
  if (samples.channels() != params.channels()) {
    throw DimensionError("sample channel count " + std::to_string(samples.channels()) + " does not match network mode");
  }
}

// Forward pass for a block of samples stacked row-wise; keeps the
// intermediates needed by backpropagation. Reused across training steps so
// the large im2col buffer is allocated once.
struct BatchPass {
  RowMatrix cols;  // BV x 27C
  RowMatrix pre;   // BV x K
  RowMatrix out;   // BV x C
};

void batch_forward(const NetworkParams& params, const SampleSet& samples, std::span<const std::size_t> batch,
                   BatchPass& pass) {
  const std::size_t v_count = samples.shape().volume();
  const std::size_t c_count = params.channels();
  const std::size_t k_count = params.filters();
  const std::size_t width = c_count * kTaps;
  pass.cols.resize(static_cast<Eigen::Index>(batch.size() * v_count), static_cast<Eigen::Index>(width));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    build_columns(samples.shape(), c_count, samples.sample(batch[b]), Padding::zero,
                  pass.cols.data() + b * v_count * width);
  }
  Eigen::Map<const RowMatrix> kernels(params.kernels().data(), static_cast<Eigen::Index>(k_count),
                                      static_cast<Eigen::Index>(width));
  Eigen::Map<const Eigen::RowVectorXd> b1(params.hidden_bias().data(), static_cast<Eigen::Index>(k_count));
  Eigen::Map<const RowMatrix> w2(params.combination().data(), static_cast<Eigen::Index>(c_count),
                                 static_cast<Eigen::Index>(k_count));
  Eigen::Map<const Eigen::RowVectorXd> b2(params.output_bias().data(), static_cast<Eigen::Index>(c_count));
  pass.pre.noalias() = pass.cols * kernels.transpose();
  pass.pre.rowwise() += b1;
  pass.out.noalias() = pass.pre.cwiseMax(0.0) * w2.transpose();
  pass.out.rowwise() += b2;
}

double batch_residual(const SampleSet& samples, std::span<const std::size_t> batch, const RowMatrix& out,
                      RowMatrix* residual) {
  const std::size_t v_count = samples.shape().volume();
  const std::size_t c_count = samples.channels();
  double sum = 0.0;
  if (residual) residual->resize(out.rows(), out.cols());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto s = samples.sample(batch[b]);
    for (std::size_t v = 0; v < v_count; ++v) {
      const auto row = static_cast<Eigen::Index>(b * v_count + v);
      for (std::size_t c = 0; c < c_count; ++c) {
        const double r = out(row, static_cast<Eigen::Index>(c)) - s[c * v_count + v];
        sum += r * r;
        if (residual) (*residual)(row, static_cast<Eigen::Index>(c)) = r;
      }
    }
  }
  return sum;
}

}  // namespace

NetworkParams::NetworkParams(Mode mode, std::size_t filters) : mode_(mode), filters_(filters) {
  check_mode(mode);
  if (filters == 0 || filters > kMaxFilters) throw ConfigError("filter count must be in [1, 2^20]");
  theta_.assign(parameter_count(mode, filters), 0.0);
}

std::size_t NetworkParams::parameter_count(Mode mode, std::size_t filters) {
  const auto c = static_cast<std::size_t>(mode);
  return filters * kTaps * c + filters + c * filters + c;
}

NetworkParams NetworkParams::initialized(Mode mode, std::size_t filters, std::uint64_t seed) {
  NetworkParams p(mode, filters);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> kernel_dist(0.0, std::sqrt(2.0 / static_cast<double>(kTaps * p.channels())));
  for (double& w : p.kernels()) w = kernel_dist(rng);
  std::normal_distribution<double> comb_dist(0.0, std::sqrt(1.0 / static_cast<double>(filters)));
  for (double& w : p.combination()) w = comb_dist(rng);
  return p;
}

double& NetworkParams::tap(std::size_t k, std::size_t c, int dx, int dy, int dt) {
  if (k >= filters_ || c >= channels() || std::abs(dx) > 1 || std::abs(dy) > 1 || std::abs(dt) > 1) {
    throw DimensionError("kernel tap out of range");
  }
  const auto t = static_cast<std::size_t>((dt + 1) * 9 + (dy + 1) * 3 + (dx + 1));
  return theta_[(k * channels() + c) * kTaps + t];
}

bool NetworkParams::all_finite() const {
  return std::all_of(theta_.begin(), theta_.end(), [](double v) { return std::isfinite(v); });
}

void save_network(const std::filesystem::path& path, const NetworkParams& params) {
  detail::ByteWriter w;
  w.reserve(16 + 8 * params.size());
  w.magic("ALNENET1");
  w.u32(static_cast<std::uint32_t>(params.mode()));
  w.u32(static_cast<std::uint32_t>(params.filters()));
  for (double v : params.values()) w.f64(v);
  w.write_to(path);
}

NetworkParams load_network(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic("ALNENET1");
  const std::uint32_t mode = r.u32();
  const std::uint32_t filters = r.u32();
  if (mode != 1 && mode != 2) throw FormatError(r.name() + ": unknown network mode " + std::to_string(mode));
  if (filters == 0 || filters > kMaxFilters) throw FormatError(r.name() + ": bad filter count");
  NetworkParams p(static_cast<Mode>(mode), filters);
  if (r.remaining() != 8 * p.size()) throw FormatError(r.name() + ": parameter payload has the wrong length");
  for (double& v : p.values()) v = r.f64();
  r.expect_end();
  if (!p.all_finite()) throw FormatError(r.name() + ": non-finite parameters");
  return p;
}

SampleSet::SampleSet(Extent3 shape, std::size_t channels, std::size_t count)
    : shape_(shape), channels_(channels), count_(count) {
  if (shape.volume() == 0 || channels == 0) throw DimensionError("empty sample shape");
  values_.assign(count * channels * shape.volume(), 0.0);
}

SampleSet to_samples(const PatchSet& patches, Mode mode) {
  check_mode(mode);
  const std::size_t d = patches.patch_size();
  const Extent3 shape = patches.geometry().patch();
  if (mode == Mode::complex) {
    SampleSet s(shape, 2, patches.count());
    for (std::size_t j = 0; j < patches.count(); ++j) {
      const auto p = patches.patch(j);
      auto out = s.sample(j);
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = p[i].real();
        out[d + i] = p[i].imag();
      }
    }
    return s;
  }
  SampleSet s(shape, 1, 2 * patches.count());
  for (std::size_t j = 0; j < patches.count(); ++j) {
    const auto p = patches.patch(j);
    auto re = s.sample(2 * j);
    auto im = s.sample(2 * j + 1);
    for (std::size_t i = 0; i < d; ++i) {
      re[i] = p[i].real();
      im[i] = p[i].imag();
    }
  }
  return s;
}

void from_samples(const SampleSet& samples, Mode mode, PatchSet& patches) {
  check_mode(mode);
  const std::size_t d = patches.patch_size();
  const std::size_t expected = mode == Mode::complex ? patches.count() : 2 * patches.count();
  if (samples.count() != expected || samples.channels() != static_cast<std::size_t>(mode) ||
      samples.shape() != patches.geometry().patch()) {
    throw DimensionError("sample set does not match patch set");
  }
  for (std::size_t j = 0; j < patches.count(); ++j) {
    auto p = patches.patch(j);
    if (mode == Mode::complex) {
      const auto s = samples.sample(j);
      for (std::size_t i = 0; i < d; ++i) p[i] = {s[i], s[d + i]};
    } else {
      const auto re = samples.sample(2 * j);
      const auto im = samples.sample(2 * j + 1);
      for (std::size_t i = 0; i < d; ++i) p[i] = {re[i], im[i]};
    }
  }
}

std::vector<NormalizationRecord> normalize_samples(SampleSet& samples) {
  std::vector<NormalizationRecord> records(samples.count());
  for (std::size_t i = 0; i < samples.count(); ++i) records[i] = normalize_patch(samples.sample(i));
  return records;
}

void denormalize_samples(SampleSet& samples, std::span<const NormalizationRecord> records) {
  if (records.size() != samples.count()) throw DimensionError("normalization record count mismatch");
  for (std::size_t i = 0; i < samples.count(); ++i) denormalize_patch(samples.sample(i), records[i]);
}

void forward(const NetworkParams& params, const Extent3& shape, std::span<const double> in, std::span<double> out,
             Padding padding) {
  const std::size_t v_count = shape.volume();
  const std::size_t c_count = params.channels();
  const std::size_t k_count = params.filters();
  if (in.size() != c_count * v_count || out.size() != in.size()) {
    throw DimensionError("network input does not match the mode's channel count");
  }
  const std::size_t width = c_count * kTaps;
  RowMatrix cols(static_cast<Eigen::Index>(v_count), static_cast<Eigen::Index>(width));
  build_columns(shape, c_count, in, padding, cols.data());
  Eigen::Map<const RowMatrix> kernels(params.kernels().data(), static_cast<Eigen::Index>(k_count),
                                      static_cast<Eigen::Index>(width));
  Eigen::Map<const Eigen::RowVectorXd> b1(params.hidden_bias().data(), static_cast<Eigen::Index>(k_count));
  Eigen::Map<const RowMatrix> w2(params.combination().data(), static_cast<Eigen::Index>(c_count),
                                 static_cast<Eigen::Index>(k_count));
  RowMatrix hidden = cols * kernels.transpose();
  hidden.rowwise() += b1;
  hidden = hidden.cwiseMax(0.0);
  const RowMatrix result = hidden * w2.transpose();
  const auto b2 = params.output_bias();
  for (std::size_t c = 0; c < c_count; ++c) {
    for (std::size_t v = 0; v < v_count; ++v) {
      out[c * v_count + v] = result(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c)) + b2[c];
    }
  }
}

SampleSet forward_all(const NetworkParams& params, const SampleSet& samples, Padding padding) {
  check_sample_shape(params, samples);
  SampleSet out(samples.shape(), samples.channels(), samples.count());
  const auto n = static_cast<std::ptrdiff_t>(samples.count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    forward(params, samples.shape(), samples.sample(j), out.sample(j), padding);
  }
  return out;
}

double kernel_penalty(const NetworkParams& params) {
  double sum = 0.0;
  for (double w : params.kernels()) sum += w * w;
  return sum;
}

double loss(const NetworkParams& params, const SampleSet& samples, double lambda, double penalty_weight) {
  check_sample_shape(params, samples);
  const SampleSet out = forward_all(params, samples);
  const std::size_t n = samples.count();
  std::vector<double> per_sample(n, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(i);
    const auto a = samples.sample(j);
    const auto b = out.sample(j);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    per_sample[j] = s;
  }
  const double data = std::accumulate(per_sample.begin(), per_sample.end(), 0.0);
  return 0.5 * lambda * data + penalty_weight * kernel_penalty(params);
}

static LossGradient batch_gradient(const NetworkParams& params, const SampleSet& samples, std::span<const std::size_t> batch,
                                   double data_weight, double penalty_weight, BatchPass& pass) {
  check_sample_shape(params, samples);
  for (std::size_t i : batch) {
    if (i >= samples.count()) throw DimensionError("batch index out of range");
  }
  const std::size_t c_count = params.channels();
  const std::size_t k_count = params.filters();
  const std::size_t width = c_count * kTaps;

  LossGradient result;
  result.gradient.assign(params.size(), 0.0);
  double* grad = result.gradient.data();
  double data_sum = 0.0;

  if (!batch.empty()) {
    batch_forward(params, samples, batch, pass);
    RowMatrix residual;
    data_sum = batch_residual(samples, batch, pass.out, &residual);
    // d loss / d out = data_weight * (out - s)
    const RowMatrix d_out = data_weight * residual;
    const RowMatrix hidden = pass.pre.cwiseMax(0.0);
    Eigen::Map<const RowMatrix> w2(params.combination().data(), static_cast<Eigen::Index>(c_count),
                                   static_cast<Eigen::Index>(k_count));

    // Blocks are formed in owned (aligned) matrices before being copied into
    // the flat gradient, so the kernels Eigen picks do not depend on where
    // the gradient vector happens to live.
    const RowMatrix g_w2 = d_out.transpose() * hidden;
    const Eigen::RowVectorXd g_b2 = d_out.colwise().sum();
    RowMatrix d_pre = d_out * w2;
    d_pre = (pass.pre.array() > 0.0).select(d_pre, 0.0);
    const RowMatrix g_kernels = d_pre.transpose() * pass.cols;
    const Eigen::RowVectorXd g_b1 = d_pre.colwise().sum();

    std::copy_n(g_kernels.data(), k_count * width, grad);
    std::copy_n(g_b1.data(), k_count, grad + k_count * width);
    std::copy_n(g_w2.data(), c_count * k_count, grad + k_count * width + k_count);
    std::copy_n(g_b2.data(), c_count, grad + params.size() - c_count);
  }

  const auto kernels = params.kernels();
  for (std::size_t i = 0; i < kernels.size(); ++i) grad[i] += 2.0 * penalty_weight * kernels[i];
  result.loss = 0.5 * data_weight * data_sum + penalty_weight * kernel_penalty(params);
  return result;
}

LossGradient batch_loss_and_gradient(const NetworkParams& params, const SampleSet& samples,
                                     std::span<const std::size_t> batch, double data_weight, double penalty_weight) {
  BatchPass pass;
  return batch_gradient(params, samples, batch, data_weight, penalty_weight, pass);
}

LossGradient loss_and_gradient(const NetworkParams& params, const SampleSet& samples, double lambda,
                               double penalty_weight) {
  // Chunked so the im2col buffer stays bounded on large sample sets; chunks
  // are reduced in index order.
  constexpr std::size_t kChunk = 256;
  LossGradient total;
  total.gradient.assign(params.size(), 0.0);
  std::vector<std::size_t> idx;
  BatchPass pass;
  for (std::size_t start = 0; start < samples.count(); start += kChunk) {
    idx.resize(std::min(samples.count(), start + kChunk) - start);
    std::iota(idx.begin(), idx.end(), start);
    const LossGradient part = batch_gradient(params, samples, idx, lambda, 0.0, pass);
    total.loss += part.loss;
    for (std::size_t i = 0; i < total.gradient.size(); ++i) total.gradient[i] += part.gradient[i];
  }
  const auto kernels = params.kernels();
  for (std::size_t i = 0; i < kernels.size(); ++i) total.gradient[i] += 2.0 * penalty_weight * kernels[i];
  total.loss += penalty_weight * kernel_penalty(params);
  return total;
}

void validate(const TrainConfig& config) {
  if (config.n_backprops < 1) throw ConfigError("n_backprops must be >= 1");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(config.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (!(config.penalty_weight >= 0.0) || !std::isfinite(config.penalty_weight)) {
    throw ConfigError("penalty weight must be non-negative");
  }
  if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (config.eval_every < 1) throw ConfigError("eval_every must be >= 1");
}

void adam_update(std::span<double> theta, std::span<const double> gradient, AdamState& state,
                 const TrainConfig& config) {
  if (gradient.size() != theta.size()) throw DimensionError("gradient length mismatch");
  if (state.m.empty()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = gradient[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

TrainResult train(NetworkParams init, const SampleSet& samples, double lambda, const TrainConfig& config) {
  validate(config);
  check_sample_shape(init, samples);
  if (samples.count() == 0) throw PreconditionError("cannot train on an empty patch set");
  const std::size_t n = samples.count();
  const std::size_t batch_size = std::min(config.batch_size, n);
  const double data_weight = lambda * static_cast<double>(n) / static_cast<double>(batch_size);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  TrainResult result{init, 0.0, 0.0, 0};
  result.initial_loss = loss(init, samples, lambda, config.penalty_weight);
  result.final_loss = result.initial_loss;

  NetworkParams current = std::move(init);
  AdamState state;
  std::vector<std::size_t> batch(batch_size);
  BatchPass pass;
  for (std::size_t step = 1; step <= config.n_backprops; ++step) {
    for (std::size_t b = 0; b < batch_size; ++b) {
      if (cursor == n) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch[b] = order[cursor++];
    }
    const LossGradient lg = batch_gradient(current, samples, batch, data_weight, config.penalty_weight, pass);
    adam_update(current.values(), lg.gradient, state, config);
    if (!current.all_finite()) throw DivergenceError("network parameters became non-finite during training");
    if (step % config.eval_every == 0 || step == config.n_backprops) {
      const double l = loss(current, samples, lambda, config.penalty_weight);
      if (l < result.final_loss) {
        result.final_loss = l;
        result.params = current;
      }
    }
  }
  result.steps = config.n_backprops;
  return result;
}

}  // namespace alone::net
