#pragma once

// Shallow patch CNN f_theta: a 3x3x3 convolution with K filters and ReLU,
// followed by a 1x1x1 convolution back to the input channel count.
// Complex patches enter as two channels (real, imaginary); real mode feeds
// real and imaginary parts as separate one-channel samples.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "alone/aligned.hpp"
#include "alone/patches.hpp"

namespace alone::net {

enum class Mode : std::uint32_t { real = 1, complex = 2 };
enum class Padding { zero, circular };

inline constexpr std::size_t kTaps = 27;

/// theta laid out as one flat vector: kernels [k][c][tap], hidden biases [k],
/// combination weights [c_out][k], output biases [c_out]. Tap index is
/// (dt+1)*9 + (dy+1)*3 + (dx+1).
class NetworkParams {
 public:
  NetworkParams(Mode mode, std::size_t filters);

  /// Kernels ~ N(0, 2/fan_in) with fan_in = 27*C, combination ~ N(0, 1/K), zero biases.
  static NetworkParams initialized(Mode mode, std::size_t filters, std::uint64_t seed);
  /// q = K*27*C + K + C*K + C
  static std::size_t parameter_count(Mode mode, std::size_t filters);

  Mode mode() const { return mode_; }
  std::size_t channels() const { return static_cast<std::size_t>(mode_); }
  std::size_t filters() const { return filters_; }
  std::size_t size() const { return theta_.size(); }

  std::span<double> values() { return theta_; }
  std::span<const double> values() const { return theta_; }
  std::span<double> kernels() { return {theta_.data(), kernel_size()}; }
  std::span<const double> kernels() const { return {theta_.data(), kernel_size()}; }
  std::span<double> hidden_bias() { return {theta_.data() + kernel_size(), filters_}; }
  std::span<const double> hidden_bias() const { return {theta_.data() + kernel_size(), filters_}; }
  std::span<double> combination() { return {theta_.data() + kernel_size() + filters_, channels() * filters_}; }
  std::span<const double> combination() const {
    return {theta_.data() + kernel_size() + filters_, channels() * filters_};
  }
  std::span<double> output_bias() { return {theta_.data() + theta_.size() - channels(), channels()}; }
  std::span<const double> output_bias() const { return {theta_.data() + theta_.size() - channels(), channels()}; }

  /// Kernel tap for filter k, input channel c, offsets in {-1, 0, 1}.
  double& tap(std::size_t k, std::size_t c, int dx, int dy, int dt);
  double& weight(std::size_t c_out, std::size_t k) { return combination()[c_out * filters_ + k]; }

  bool all_finite() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  std::size_t kernel_size() const { return filters_ * channels() * kTaps; }

  Mode mode_;
  std::size_t filters_;
  AlignedVector<double> theta_;
};

/// "ALNENET1", u32 mode (1 real, 2 complex), u32 K, then q little-endian float64.
void save_network(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_network(const std::filesystem::path& path);

/// Network inputs: `count` samples, each channel-major with one block of
/// shape.volume() voxels per channel (x fastest, then y, then t).
class SampleSet {
 public:
  SampleSet(Extent3 shape, std::size_t channels, std::size_t count);

  const Extent3& shape() const { return shape_; }
  std::size_t channels() const { return channels_; }
  std::size_t count() const { return count_; }
  std::size_t sample_size() const { return channels_ * shape_.volume(); }

  std::span<double> sample(std::size_t i) { return {values_.data() + i * sample_size(), sample_size()}; }
  std::span<const double> sample(std::size_t i) const { return {values_.data() + i * sample_size(), sample_size()}; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  Extent3 shape_;
  std::size_t channels_;
  std::size_t count_;
  AlignedVector<double> values_;
};

/// Complex mode: one two-channel sample per patch. Real mode: samples 2j and
/// 2j+1 hold the real and imaginary part of patch j.
SampleSet to_samples(const PatchSet& patches, Mode mode);
void from_samples(const SampleSet& samples, Mode mode, PatchSet& patches);

/// Per-sample normalization over all of the sample's scalars.
std::vector<NormalizationRecord> normalize_samples(SampleSet& samples);
void denormalize_samples(SampleSet& samples, std::span<const NormalizationRecord> records);

/// f_theta applied to one sample; output has the input's shape.
void forward(const NetworkParams& params, const Extent3& shape, std::span<const double> in, std::span<double> out,
             Padding padding = Padding::zero);
/// f_theta on every sample, parallel over samples.
SampleSet forward_all(const NetworkParams& params, const SampleSet& samples, Padding padding = Padding::zero);

/// R(theta) = sum_k ||f_k||_2^2 over the first-layer kernels only.
double kernel_penalty(const NetworkParams& params);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// (lambda/2) sum_j ||s_j - f(s_j)||^2 + penalty_weight * R(theta) over all samples.
double loss(const NetworkParams& params, const SampleSet& samples, double lambda, double penalty_weight);

/// Loss and exact gradient over all samples.
LossGradient loss_and_gradient(const NetworkParams& params, const SampleSet& samples, double lambda,
                               double penalty_weight);

/// (data_weight/2) sum_{i in batch} ||s_i - f(s_i)||^2 + penalty_weight * R(theta)
/// and its gradient. The trainer passes data_weight = lambda * n / |batch|.
LossGradient batch_loss_and_gradient(const NetworkParams& params, const SampleSet& samples,
                                     std::span<const std::size_t> batch, double data_weight, double penalty_weight);

struct TrainConfig {
  std::size_t n_backprops = 400;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double penalty_weight = 1e-4;
  std::size_t batch_size = 64;  // clamped to the sample count
  std::size_t eval_every = 50;  // full-loss checkpoints for best-so-far tracking
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

void adam_update(std::span<double> theta, std::span<const double> gradient, AdamState& state,
                 const TrainConfig& config);

struct TrainResult {
  NetworkParams params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t steps = 0;
};

/// Adam on minibatches drawn from a seeded shuffle (reshuffled every epoch).
/// Returns the best parameters among the entry point and the full-loss
/// checkpoints, so final_loss <= initial_loss always holds.
TrainResult train(NetworkParams init, const SampleSet& samples, double lambda, const TrainConfig& config);

}  // namespace alone::net
