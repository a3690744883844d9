#include "alone/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "alone/error.hpp"

namespace alone {

namespace {

constexpr const char* kHeader = "iteration,e_k,fidelity,train_loss,psnr,ssim,nrmse,t_train_s,t_reg_s,t_pcg_s,reg_value";

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) v = v > 0 ? kPsnrSentinel : -kPsnrSentinel;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse(const std::string& s) {
  if (s == "nan") return kNotRecorded;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw FormatError("trace CSV: bad number '" + s + "'");
  }
}

}  // namespace

const char* to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::completed:
      return "completed";
    case TraceStatus::converged:
      return "converged";
    case TraceStatus::diverged:
      return "diverged";
    case TraceStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

void TraceReference::fill(const ComplexVolume& x, IterationRecord& record) const {
  if (!volume) return;
  const MetricsRecord m = evaluate(x, *volume, crop_fraction);
  record.psnr = m.psnr;
  record.ssim = m.ssim;
  record.nrmse = m.nrmse;
}

void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << kHeader << '\n';
  for (const IterationRecord& r : trace.records) {
    out << r.iteration << ',' << format(r.relative_change) << ',' << format(r.fidelity) << ','
        << format(r.train_loss) << ',' << format(r.psnr) << ',' << format(r.ssim) << ',' << format(r.nrmse) << ','
        << format(r.t_train_s) << ',' << format(r.t_reg_s) << ',' << format(r.t_pcg_s) << ','
        << format(r.reg_value) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

IterationTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw FormatError(path.string() + ": unexpected trace header");
  IterationTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw FormatError(path.string() + ": trace row has " + std::to_string(f.size()) + " fields");
    IterationRecord r;
    r.iteration = static_cast<std::size_t>(parse(f[0]));
    r.relative_change = parse(f[1]);
    r.fidelity = parse(f[2]);
    r.train_loss = parse(f[3]);
    r.psnr = parse(f[4]);
    r.ssim = parse(f[5]);
    r.nrmse = parse(f[6]);
    r.t_train_s = parse(f[7]);
    r.t_reg_s = parse(f[8]);
    r.t_pcg_s = parse(f[9]);
    r.reg_value = parse(f[10]);
    trace.records.push_back(r);
  }
  return trace;
}

}  // namespace alone
