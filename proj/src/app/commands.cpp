#include "alone/app/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <fmt/format.h>

#include "alone/error.hpp"
#include "alone/kspace.hpp"
#include "alone/volume_io.hpp"

namespace alone::app {

namespace fs = std::filesystem;

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_text(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_mask_csv(const fs::path& path, const CartesianOperator& op) {
  std::ofstream out = open_text(path);
  const Dims& d = op.image_dims();
  out << "frame,kx,ky\n";
  for (std::size_t t = 0; t < d.nt; ++t) {
    const FrameMask& m = op.masks()[t];
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) out << t << ',' << i % d.nx << ',' << i / d.nx << '\n';
    }
  }
}

double metric_for_csv(double psnr) { return std::isfinite(psnr) ? psnr : kPsnrSentinel; }

void write_metrics_row(std::ostream& out, const MetricsRecord& m) {
  out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}", metric_for_csv(m.psnr), m.ssim, m.nrmse, m.crop_fraction);
}

struct MethodRun {
  ComplexVolume x;
  IterationTrace trace;
};

MethodRun run_method(const RunConfig& config, const KSpaceData& y, const EncodingOperator& op,
                     const ComplexVolume* reference) {
  const TraceReference ref{reference, config.crop_fraction};
  switch (config.method) {
    case Method::adjoint: {
      MethodRun run{op.adjoint(y), {}};
      IterationRecord record;
      record.iteration = 1;
      const KSpaceData ax = op.forward(run.x);
      double s = 0.0;
      for (std::size_t i = 0; i < ax.samples.size(); ++i) s += std::norm(ax.samples[i] - y.samples[i]);
      record.fidelity = std::sqrt(s);
      ref.fill(run.x, record);
      run.trace.records.push_back(record);
      return run;
    }
    case Method::tv: {
      TvConfig c = config.tv;
      c.reference = ref;
      TvResult r = tv_admm_reconstruct(y, op, c);
      return {std::move(r.x), std::move(r.trace)};
    }
    case Method::dic: {
      DicConfig c = config.dic;
      c.reference = ref;
      DicResult r = dic_reconstruct(y, op, c);
      return {std::move(r.x), std::move(r.trace)};
    }
    case Method::alone: {
      AloneConfig c = config.alone;
      c.reference = ref;
      AloneResult r = alone_reconstruct(y, op, c);
      return {std::move(r.x), std::move(r.trace)};
    }
  }
  throw ConfigError("unknown method");
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const GeometryError*>(&e) || dynamic_cast<const PreconditionError*>(&e)) {
    return exit_config;
  }
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return exit_io;
  if (dynamic_cast<const DivergenceError*>(&e)) return exit_numerical;
  return exit_usage;
}

SimulateOutputs cmd_simulate(const RunConfig& config, const fs::path& out) {
  validate(config);
  ensure_directory(out);
  const auto op = make_operator(config);
  const ComplexVolume truth = make_phantom(phantom_spec(config));
  const KSpaceData y = retrospective_sample(truth, *op, config.noise_std, config.seed);

  SimulateOutputs files;
  files.ground_truth = out / "ground_truth.vol";
  files.kspace = out / "kspace.ksp";
  files.config = out / "config.resolved.json";
  save_volume(files.ground_truth, truth);
  save_kspace(files.kspace, y);
  if (const auto* radial = dynamic_cast<const RadialOperator*>(op.get())) {
    files.trajectory = out / "trajectory.csv";
    radial->trajectory().write_csv(files.trajectory);
    files.spokes_per_frame = resolved_spokes(config);
  } else {
    files.trajectory = out / "mask.csv";
    write_mask_csv(files.trajectory, dynamic_cast<const CartesianOperator&>(*op));
  }
  write_text(files.config, to_json(config));
  files.n_samples = y.samples.size();
  return files;
}

void write_timings_csv(const fs::path& path, const IterationTrace& trace) {
  std::ofstream out = open_text(path);
  double total[3] = {0.0, 0.0, 0.0};
  for (const auto& r : trace.records) {
    total[0] += r.t_train_s;
    total[1] += r.t_reg_s;
    total[2] += r.t_pcg_s;
  }
  const double n = trace.records.empty() ? 1.0 : static_cast<double>(trace.records.size());
  const char* names[3] = {"train", "reg", "pcg"};
  out << "phase,total_s,mean_per_iteration_s,iterations\n";
  for (int i = 0; i < 3; ++i) {
    out << fmt::format("{},{:.9g},{:.9g},{}\n", names[i], total[i], total[i] / n, trace.records.size());
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ReconstructOutputs cmd_reconstruct(const RunConfig& config, const fs::path& kspace_file,
                                   const std::optional<fs::path>& reference_file, const fs::path& out) {
  validate(config);
  const KSpaceData y = load_kspace(kspace_file);
  std::optional<ComplexVolume> reference;
  if (reference_file) {
    reference = load_volume(*reference_file);
    require_same_dims(reference->dims(), config.dims(), "reference volume");
  }
  const auto op = make_operator(config);
  require_descriptor(op->descriptor(), y);
  ensure_directory(out);

  const std::string method = to_string(config.method);
  ReconstructOutputs files;
  files.volume = out / ("recon_" + method + ".vol");
  files.trace = out / ("trace_" + method + ".csv");
  files.timings = out / ("timings_" + method + ".csv");
  files.config = out / "config.resolved.json";
  write_text(files.config, to_json(config));

  MethodRun run = run_method(config, y, *op, reference ? &*reference : nullptr);
  write_trace_csv(files.trace, run.trace);
  write_timings_csv(files.timings, run.trace);
  if (run.trace.status == TraceStatus::diverged) {
    throw DivergenceError(method + " diverged: " + run.trace.message);
  }
  save_volume(files.volume, run.x);
  files.trace_data = std::move(run.trace);
  files.x = std::move(run.x);
  return files;
}

EvaluateOutputs cmd_evaluate(const fs::path& recon, const fs::path& reference, double crop_fraction,
                             const fs::path& metrics_csv) {
  if (!(crop_fraction > 0.0 && crop_fraction <= 1.0)) throw ConfigError("crop fraction must lie in (0, 1]");
  const ComplexVolume x = load_volume(recon);
  const ComplexVolume ref = load_volume(reference);
  require_same_dims(x.dims(), ref.dims(), "evaluated volume");

  EvaluateOutputs result{evaluate(x, ref, crop_fraction), evaluate_frames(x, ref, crop_fraction)};
  if (metrics_csv.has_parent_path()) ensure_directory(metrics_csv.parent_path());
  {
    std::ofstream out = open_text(metrics_csv);
    out << "psnr,ssim,nrmse,crop_fraction\n";
    write_metrics_row(out, result.summary);
    out << '\n';
  }
  fs::path frames_csv = metrics_csv;
  frames_csv.replace_filename(metrics_csv.stem().string() + "_frames.csv");
  std::ofstream out = open_text(frames_csv);
  out << "frame,psnr,ssim,nrmse,crop_fraction\n";
  for (std::size_t t = 0; t < result.frames.size(); ++t) {
    out << t << ',';
    write_metrics_row(out, result.frames[t]);
    out << '\n';
  }
  return result;
}

FrameExport cmd_export_frames(const fs::path& volume, const fs::path& out) {
  const ComplexVolume v = load_volume(volume);
  ensure_directory(out);
  return export_frames(v, out);
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config, const fs::path& kspace_file, const fs::path& reference_file,
                                const fs::path& out) {
  validate(config);
  if (config.method == Method::adjoint) throw ConfigError("the adjoint has no lambda to sweep");
  if (config.sweep_lambdas.empty()) throw ConfigError("sweep_lambdas is empty");
  const KSpaceData y = load_kspace(kspace_file);
  const ComplexVolume reference = load_volume(reference_file);
  require_same_dims(reference.dims(), config.dims(), "reference volume");
  const auto op = make_operator(config);
  require_descriptor(op->descriptor(), y);
  ensure_directory(out);

  std::vector<SweepRow> rows;
  for (double lambda : config.sweep_lambdas) {
    RunConfig c = config;
    c.alone.lambda = lambda;
    c.tv.lambda = lambda;
    c.dic.lambda = lambda;
    MethodRun run = run_method(c, y, *op, nullptr);
    rows.push_back({lambda, evaluate(run.x, reference, config.crop_fraction), run.trace.records.size(),
                    run.trace.status});
  }
  std::ofstream csv = open_text(out / (std::string("sweep_") + to_string(config.method) + ".csv"));
  csv << "lambda,psnr,ssim,nrmse,crop_fraction,iterations,status\n";
  for (const auto& r : rows) {
    csv << fmt::format("{:.17g},", r.lambda);
    write_metrics_row(csv, r.metrics);
    csv << ',' << r.iterations << ',' << to_string(r.status) << '\n';
  }
  write_text(out / "config.resolved.json", to_json(config));
  return rows;
}

}  // namespace alone::app
