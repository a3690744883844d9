#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "alone/app/commands.hpp"
#include "alone/error.hpp"

namespace fs = std::filesystem;
using namespace alone::app;

namespace {

struct Common {
  std::string config_path;
  std::string method;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_method) {
  cmd->add_option("--config", c.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  if (with_method) cmd->add_option("--method", c.method, "adjoint | tv | dic | alone");
  cmd->add_option("--out", c.out, "output directory (default: output_dir from the config)");
  cmd->add_option("--seed", c.seed, "overrides the config seed");
  cmd->add_option("--threads", c.threads, "OpenMP threads; 1 gives the deterministic test mode");
}

RunConfig resolve(const Common& c) {
  RunConfig config = c.config_path.empty() ? parse_config("{}") : load_config(c.config_path);
  if (!c.method.empty()) config.method = parse_method(c.method);
  if (c.seed) {
    config.seed = *c.seed;
    config.alone.seed = *c.seed;
    config.dic.seed = *c.seed;
  }
  if (!c.out.empty()) config.output_dir = c.out;
  validate(config);
  return config;
}

std::optional<fs::path> default_reference(const std::string& given, const fs::path& dir) {
  if (!given.empty()) return fs::path(given);
  const fs::path guess = dir / "ground_truth.vol";
  if (fs::exists(guess)) return guess;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic MRI reconstruction with adaptive shallow-network patch regularization"};
  app.require_subcommand(1);

  Common common;
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads");

  auto* simulate = app.add_subcommand("simulate", "generate phantom, trajectory and k-space");
  add_common(simulate, common, false);

  std::string kspace, reference;
  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct a k-space file");
  add_common(reconstruct, common, true);
  reconstruct->add_option("--kspace", kspace, "k-space file (default: <out>/kspace.ksp)");
  reconstruct->add_option("--reference", reference, "ground truth for per-iteration metrics");

  std::string recon, metrics_out;
  double crop = 0.5;
  auto* evaluate = app.add_subcommand("evaluate", "compare a reconstruction with a reference");
  evaluate->add_option("--recon", recon, "reconstructed volume")->required();
  evaluate->add_option("--reference", reference, "reference volume")->required();
  evaluate->add_option("--crop", crop, "central crop fraction per axis");
  evaluate->add_option("--out", metrics_out, "metrics CSV")->required();
  evaluate->add_option("--threads", common.threads, "OpenMP threads");

  std::string volume;
  auto* frames = app.add_subcommand("export-frames", "write PGM frames and an x-t profile");
  frames->add_option("--volume", volume, "volume file")->required();
  frames->add_option("--out", common.out, "output directory")->required();
  frames->add_option("--threads", common.threads, "OpenMP threads");

  auto* sweep = app.add_subcommand("sweep", "reconstruct over the configured lambda grid");
  add_common(sweep, common, true);
  sweep->add_option("--kspace", kspace, "k-space file (default: <out>/kspace.ksp)");
  sweep->add_option("--reference", reference, "ground truth (default: <out>/ground_truth.vol)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  const int n_threads = common.threads > 0 ? common.threads : threads;
  if (n_threads > 0) omp_set_num_threads(n_threads);

  try {
    if (*simulate) {
      const RunConfig config = resolve(common);
      const SimulateOutputs files = cmd_simulate(config, config.output_dir);
      fmt::print("wrote {} ({} samples), {}, {}\n", files.kspace.string(), files.n_samples,
                 files.ground_truth.string(), files.trajectory.string());
    } else if (*reconstruct) {
      const RunConfig config = resolve(common);
      const fs::path in = kspace.empty() ? config.output_dir / "kspace.ksp" : fs::path(kspace);
      const auto ref = default_reference(reference, in.parent_path());
      const ReconstructOutputs files = cmd_reconstruct(config, in, ref, config.output_dir);
      fmt::print("{}: {} iterations, status {}\n", files.volume.string(), files.trace_data.records.size(),
                 alone::to_string(files.trace_data.status));
      if (ref && !files.trace_data.records.empty()) {
        const auto& last = files.trace_data.records.back();
        fmt::print("psnr {:.3f} dB  ssim {:.4f}  nrmse {:.5f}\n", last.psnr, last.ssim, last.nrmse);
      }
    } else if (*evaluate) {
      const EvaluateOutputs m = cmd_evaluate(recon, reference, crop, metrics_out);
      fmt::print("psnr {:.3f} dB  ssim {:.4f}  nrmse {:.5f}\n", m.summary.psnr, m.summary.ssim, m.summary.nrmse);
    } else if (*frames) {
      const alone::FrameExport e = cmd_export_frames(volume, common.out);
      fmt::print("wrote {} images, magnitude range [{:.6g}, {:.6g}], scale {:.6g}\n", e.files.size(), e.min, e.max,
                 e.scale);
    } else if (*sweep) {
      const RunConfig config = resolve(common);
      const fs::path in = kspace.empty() ? config.output_dir / "kspace.ksp" : fs::path(kspace);
      const fs::path ref = reference.empty() ? in.parent_path() / "ground_truth.vol" : fs::path(reference);
      for (const SweepRow& row : cmd_sweep(config, in, ref, config.output_dir)) {
        fmt::print("lambda {:<10.4g} psnr {:.3f} dB  nrmse {:.5f}  {}\n", row.lambda, row.metrics.psnr,
                   row.metrics.nrmse, alone::to_string(row.status));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return exit_ok;
}
