#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "alone/metrics.hpp"
#include "alone/tensor.hpp"

namespace alone {

inline constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

/// One completed outer iteration of an iterative reconstruction.
struct IterationRecord {
  std::size_t iteration = 0;
  double relative_change = kNotRecorded;  // ||x_{k+1} - x_k||^2 / ||x_k||^2
  double fidelity = kNotRecorded;         // ||A x_{k+1} - y||_2
  double train_loss = kNotRecorded;
  double psnr = kNotRecorded;
  double ssim = kNotRecorded;
  double nrmse = kNotRecorded;
  double t_train_s = 0.0;
  double t_reg_s = 0.0;
  double t_pcg_s = 0.0;
  double reg_value = kNotRecorded;  // method-specific regularizer value (TV seminorm, sparse-coding error)
};

enum class TraceStatus { completed, converged, diverged, degenerate };

const char* to_string(TraceStatus status);

struct IterationTrace {
  std::vector<IterationRecord> records;
  TraceStatus status = TraceStatus::completed;
  std::string message;
};

/// Optional ground truth for per-iteration metrics.
struct TraceReference {
  const ComplexVolume* volume = nullptr;
  double crop_fraction = 0.5;

  void fill(const ComplexVolume& x, IterationRecord& record) const;
};

/// Header: iteration,e_k,fidelity,train_loss,psnr,ssim,nrmse,t_train_s,t_reg_s,t_pcg_s,reg_value.
/// Missing values are written as "nan"; infinite PSNR as 999.
void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace);
IterationTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace alone
