// Serial reference implementations against the OpenMP kernels. Thread counts
// are the benchmark argument; 0 means the OpenMP default.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "alone/dictionary.hpp"
#include "alone/operators.hpp"
#include "alone/patches.hpp"
#include "alone/phantom.hpp"
#include "alone/reference/encoding.hpp"
#include "alone/reference/network.hpp"
#include "alone/shallownet.hpp"

using namespace alone;

namespace {

void set_threads(const benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
}

const Dims kImage{32, 32, 8};

const ComplexVolume& phantom() {
  static const ComplexVolume x = make_phantom(PhantomSpec::standard(kImage));
  return x;
}

RadialTrajectory trajectory() { return RadialTrajectory::golden_angle(11, 32, kImage.nt); }

void BM_RadialForwardReference(benchmark::State& state) {
  const auto traj = trajectory();
  const auto coils = CoilMaps::single(kImage.nx, kImage.ny);
  for (auto _ : state) benchmark::DoNotOptimize(ref::radial_forward(kImage, traj, coils, phantom()));
}

void BM_RadialForward(benchmark::State& state) {
  set_threads(state);
  const RadialOperator op(kImage, trajectory());
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(phantom()));
}

void BM_RadialNormal(benchmark::State& state) {
  set_threads(state);
  const RadialOperator op(kImage, trajectory());
  for (auto _ : state) benchmark::DoNotOptimize(op.normal(phantom()));
}

net::SampleSet phantom_samples() {
  const PatchGeometry g(kImage, {16, 16, 4}, {8, 8, 2});
  auto samples = net::to_samples(extract_patches(phantom(), g), net::Mode::complex);
  net::normalize_samples(samples);
  return samples;
}

void BM_NetworkForwardReference(benchmark::State& state) {
  const auto samples = phantom_samples();
  const auto theta = net::NetworkParams::initialized(net::Mode::complex, 16, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ref::network_forward_all(theta, samples));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.count()));
}

void BM_NetworkForward(benchmark::State& state) {
  set_threads(state);
  const auto samples = phantom_samples();
  const auto theta = net::NetworkParams::initialized(net::Mode::complex, 16, 1);
  for (auto _ : state) benchmark::DoNotOptimize(net::forward_all(theta, samples));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.count()));
}

SignalSet random_signals(std::size_t count) {
  SignalSet s(64, count);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : s.values) v = dist(rng);
  return s;
}

void BM_OmpReference(benchmark::State& state) {
  const auto d = Dictionary::random(64, 64, 1);
  const auto signals = random_signals(512);
  for (auto _ : state) {
    for (std::size_t n = 0; n < signals.count; ++n) benchmark::DoNotOptimize(omp_sparse_code(d, signals.row(n), 16));
  }
  state.SetItemsProcessed(state.iterations() * 512);
}

void BM_OmpBatch(benchmark::State& state) {
  set_threads(state);
  const auto d = Dictionary::random(64, 64, 1);
  const auto signals = random_signals(512);
  SignalSet out(64, signals.count);
  for (auto _ : state) benchmark::DoNotOptimize(omp_approximate(d, signals, 16, out));
  state.SetItemsProcessed(state.iterations() * 512);
}

}  // namespace

BENCHMARK(BM_RadialForwardReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadialForward)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadialNormal)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetworkForwardReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetworkForward)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OmpReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OmpBatch)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
