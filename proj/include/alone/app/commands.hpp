#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <vector>

#include "alone/app/config.hpp"
#include "alone/frames.hpp"
#include "alone/metrics.hpp"
#include "alone/trace.hpp"

namespace alone::app {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_io = 3, exit_numerical = 4 };

/// Maps library exceptions onto the exit-code contract; anything unknown is 1.
int exit_code_for(const std::exception& e);

struct SimulateOutputs {
  std::filesystem::path ground_truth;
  std::filesystem::path kspace;
  std::filesystem::path trajectory;
  std::filesystem::path config;
  std::size_t n_samples = 0;
  std::size_t spokes_per_frame = 0;
};

/// Writes ground_truth.vol, kspace.ksp, trajectory.csv (radial) or mask.csv
/// (Cartesian) and config.resolved.json into out.
SimulateOutputs cmd_simulate(const RunConfig& config, const std::filesystem::path& out);

struct ReconstructOutputs {
  std::filesystem::path volume;
  std::filesystem::path trace;
  std::filesystem::path timings;
  std::filesystem::path config;
  IterationTrace trace_data;
  ComplexVolume x;
};

/// Runs config.method on the k-space file. With a reference volume the trace
/// carries PSNR, SSIM and NRMSE per iteration. On divergence the partial
/// trace is written and DivergenceError is rethrown.
ReconstructOutputs cmd_reconstruct(const RunConfig& config, const std::filesystem::path& kspace_file,
                                   const std::optional<std::filesystem::path>& reference_file,
                                   const std::filesystem::path& out);

struct EvaluateOutputs {
  MetricsRecord summary;
  std::vector<MetricsRecord> frames;
};

/// Writes the summary row to metrics_csv and per-frame rows next to it
/// (<stem>_frames.csv).
EvaluateOutputs cmd_evaluate(const std::filesystem::path& recon, const std::filesystem::path& reference,
                             double crop_fraction, const std::filesystem::path& metrics_csv);

FrameExport cmd_export_frames(const std::filesystem::path& volume, const std::filesystem::path& out);

struct SweepRow {
  double lambda = 0.0;
  MetricsRecord metrics;
  std::size_t iterations = 0;
  TraceStatus status = TraceStatus::completed;
};

/// Reconstructs once per config.sweep_lambdas entry (lambda of the selected
/// method) and writes sweep_<method>.csv. The adjoint has no lambda.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, const std::filesystem::path& kspace_file,
                                const std::filesystem::path& reference_file, const std::filesystem::path& out);

void write_timings_csv(const std::filesystem::path& path, const IterationTrace& trace);

}  // namespace alone::app
