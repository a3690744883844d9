#include "alone/tv.hpp"

#include <chrono>
#include <cmath>

#include "alone/error.hpp"
#include "alone/pcg.hpp"

namespace alone {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flat-index step and extent of each axis.
std::array<std::size_t, 3> strides(const Dims& d) { return {1, d.nx, d.nx * d.ny}; }
std::array<std::size_t, 3> extents(const Dims& d) { return {d.nx, d.ny, d.nt}; }

std::size_t coordinate(std::size_t i, const Dims& d, std::size_t a) {
  if (a == 0) return i % d.nx;
  if (a == 1) return (i / d.nx) % d.ny;
  return i / d.frame_size();
}

}  // namespace

GradientField::GradientField(Dims d) : dims(d) {
  for (auto& v : axis) v.assign(d.size(), cx{});
}

GradientField grad3d(const ComplexVolume& x) {
  const Dims& d = x.dims();
  GradientField g(d);
  const auto st = strides(d);
  const auto ex = extents(d);
  for (std::size_t a = 0; a < 3; ++a) {
    auto& out = g.axis[a];
    const auto n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      out[i] = coordinate(i, d, a) + 1 < ex[a] ? x[i + st[a]] - x[i] : cx{};
    }
  }
  return g;
}

ComplexVolume div3d(const GradientField& g) {
  const Dims& d = g.dims;
  ComplexVolume out(d);
  const auto st = strides(d);
  const auto ex = extents(d);
  const auto n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    cx acc{};
    for (std::size_t a = 0; a < 3; ++a) {
      const std::size_t c = coordinate(i, d, a);
      if (c + 1 < ex[a]) acc += g.axis[a][i];
      if (c > 0) acc -= g.axis[a][i - st[a]];
    }
    out[i] = acc;
  }
  return out;
}

GradientField isotropic_shrinkage(const GradientField& g, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("shrinkage threshold must be >= 0");
  GradientField out(g.dims);
  for (std::size_t i = 0; i < g.dims.size(); ++i) {
    const double m = std::sqrt(std::norm(g.axis[0][i]) + std::norm(g.axis[1][i]) + std::norm(g.axis[2][i]));
    const double s = m > 0.0 ? std::max(m - tau, 0.0) / m : 0.0;
    for (std::size_t a = 0; a < 3; ++a) out.axis[a][i] = s * g.axis[a][i];
  }
  return out;
}

double tv_value(const ComplexVolume& x) {
  const GradientField g = grad3d(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.dims.size(); ++i) {
    sum += std::sqrt(std::norm(g.axis[0][i]) + std::norm(g.axis[1][i]) + std::norm(g.axis[2][i]));
  }
  return sum;
}

double squared_norm(const GradientField& g) {
  double s = 0.0;
  for (const auto& v : g.axis) s += squared_norm(std::span<const cx>(v));
  return s;
}

void validate(const TvConfig& config) {
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) throw ConfigError("tv lambda must be >= 0");
  if (!(config.rho > 0.0) || !std::isfinite(config.rho)) throw ConfigError("ADMM rho must be positive");
  if (config.outer_iterations < 1) throw ConfigError("ADMM needs at least one outer iteration");
  if (config.shrink_iterations != 1) throw ConfigError("shrink_iterations must be 1: the z-update is exact");
  if (config.pcg_iterations < 1) throw ConfigError("pcg_iterations must be >= 1");
}

TvResult tv_admm_reconstruct(const KSpaceData& y, const EncodingOperator& op, const TvConfig& config) {
  validate(config);
  require_descriptor(op.descriptor(), y);
  const double tau = config.lambda / config.rho;
  const double rho = config.rho;
  const LinearMap system = [&](const ComplexVolume& v) {
    ComplexVolume out = op.normal(v);
    const ComplexVolume gtg = div3d(grad3d(v));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rho * gtg[i];
    return out;
  };

  TvResult result;
  const ComplexVolume adjoint_y = op.adjoint(y);
  result.x = adjoint_y;
  GradientField u(result.x.dims());
  PcgOptions options;
  options.max_iterations = config.pcg_iterations;

  for (std::size_t k = 0; k < config.outer_iterations; ++k) {
    IterationRecord record;
    record.iteration = k + 1;

    auto start = Clock::now();
    GradientField gx = grad3d(result.x);
    GradientField v(gx.dims);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < gx.dims.size(); ++i) v.axis[a][i] = gx.axis[a][i] + u.axis[a][i];
    }
    const GradientField z = isotropic_shrinkage(v, tau);
    record.t_reg_s = seconds_since(start);

    start = Clock::now();
    GradientField zu(z.dims);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < z.dims.size(); ++i) zu.axis[a][i] = z.axis[a][i] - u.axis[a][i];
    }
    const ComplexVolume div_zu = div3d(zu);
    ComplexVolume rhs = adjoint_y;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= rho * div_zu[i];
    PcgResult solved;
    try {
      solved = pcg_solve(system, rhs, result.x, options);
    } catch (const DivergenceError& e) {
      result.trace.status = TraceStatus::diverged;
      result.trace.message = e.what();
      break;
    }
    record.t_pcg_s = seconds_since(start);

    const double previous = squared_norm(result.x.data());
    const ComplexVolume diff = solved.x - result.x;
    record.relative_change = previous > 0.0 ? squared_norm(diff.data()) / previous : kNotRecorded;
    result.x = std::move(solved.x);

    gx = grad3d(result.x);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < gx.dims.size(); ++i) u.axis[a][i] += gx.axis[a][i] - z.axis[a][i];
    }

    const KSpaceData ax = op.forward(result.x);
    double fid = 0.0;
    for (std::size_t i = 0; i < ax.samples.size(); ++i) fid += std::norm(ax.samples[i] - y.samples[i]);
    record.fidelity = std::sqrt(fid);
    record.reg_value = tv_value(result.x);
    config.reference.fill(result.x, record);
    result.trace.records.push_back(record);
  }
  return result;
}

}  // namespace alone
