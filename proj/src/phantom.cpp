#include "alone/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "alone/error.hpp"

namespace alone {

namespace {

// Fraction of a pixel inside a shape, from the signed distance in pixels.
double coverage(double signed_distance_px, double width) {
  return std::clamp(0.5 - signed_distance_px / width, 0.0, 1.0);
}

double ellipse_distance_px(const Ellipse& e, double u, double v, double half_px) {
  const double du = u - e.cx;
  const double dv = v - e.cy;
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double p = (c * du + s * dv) / e.a;
  const double q = (-s * du + c * dv) / e.b;
  return (std::sqrt(p * p + q * q) - 1.0) * std::min(e.a, e.b) * half_px;
}

double bar_distance_px(const Bar& b, double u, double v, double half_px) {
  const double dx = std::max(b.x0 - u, u - b.x1);
  const double dy = std::max(b.y0 - v, v - b.y1);
  return std::max(dx, dy) * half_px;
}

void blend(double& value, double intensity, double alpha) { value = (1.0 - alpha) * value + alpha * intensity; }

}  // namespace

PhantomSpec PhantomSpec::standard(Dims dims) {
  PhantomSpec s;
  s.dims = dims;
  s.ellipses = {
      {0.0, 0.0, 0.86, 0.70, 0.0, 0.30},       // body
      {-0.50, 0.05, 0.22, 0.42, 0.15, 0.08},   // lung
      {0.48, 0.02, 0.20, 0.40, -0.12, 0.08},   // lung
      {0.0, -0.56, 0.09, 0.09, 0.0, 0.70},     // spine
      {0.20, -0.30, 0.18, 0.10, 0.4, 0.45},    // liver-like lobe
      {-0.05, 0.05, 0.30, 0.27, 0.3, 0.55},    // myocardium
  };
  s.bars = {
      {0.44, 0.47, -0.50, -0.20, 0.80},
      {0.52, 0.55, -0.50, -0.20, 0.80},
      {0.60, 0.63, -0.50, -0.20, 0.80},
  };
  return s;
}

void validate(const PhantomSpec& spec) {
  if (spec.dims.nx < 2 || spec.dims.ny < 2 || spec.dims.nt < 1) throw ConfigError("phantom dims too small");
  const auto bad = [](double v) { return !std::isfinite(v); };
  for (const Ellipse& e : spec.ellipses) {
    if (!(e.a > 0.0) || !(e.b > 0.0) || bad(e.cx) || bad(e.cy) || bad(e.angle)) {
      throw ConfigError("phantom ellipse needs positive finite semi-axes");
    }
    if (e.intensity < 0.0 || e.intensity > 1.0) throw ConfigError("phantom intensities must lie in [0, 1]");
  }
  for (const Bar& b : spec.bars) {
    if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) throw ConfigError("phantom bar needs x1 > x0 and y1 > y0");
    if (b.intensity < 0.0 || b.intensity > 1.0) throw ConfigError("phantom intensities must lie in [0, 1]");
  }
  if (spec.disk_intensity < 0.0 || spec.disk_intensity > 1.0) throw ConfigError("disk intensity must lie in [0, 1]");
  if (spec.disk_radius - std::abs(spec.disk_amplitude) <= 0.0) throw ConfigError("disk radius must stay positive");
  if (!(spec.edge_width > 0.0)) throw ConfigError("edge width must be positive");
  if (spec.shading < 0.0 || spec.shading >= 1.0) throw ConfigError("shading must lie in [0, 1)");
  if (bad(spec.phase_amplitude)) throw ConfigError("phase amplitude must be finite");
}

double disk_radius(const PhantomSpec& spec, std::size_t t) {
  return spec.disk_radius + spec.disk_amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                                           static_cast<double>(spec.dims.nt));
}

ComplexVolume make_phantom(const PhantomSpec& spec) {
  validate(spec);
  const Dims& d = spec.dims;
  const double hx = static_cast<double>(d.nx) / 2.0;
  const double hy = static_cast<double>(d.ny) / 2.0;
  const double half_px = std::min(hx, hy);

  // Seeded low-order coefficients for the smooth phase and shading fields.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::array<double, 6> ph{}, sh{};
  for (double& c : ph) c = unit(rng);
  for (double& c : sh) c = unit(rng);
  const auto smooth = [](const std::array<double, 6>& c, double u, double v) {
    const double f = c[0] * u + c[1] * v + c[2] * u * v + c[3] * (u * u - 0.5) + c[4] * (v * v - 0.5) +
                     c[5] * std::sin(std::numbers::pi * (u + v) / 2.0);
    return f / 5.0;  // |f| <= 1 on the unit square
  };

  std::vector<double> static_frame(d.frame_size(), 0.0);
  std::vector<double> phase(d.frame_size(), 0.0);
  std::vector<double> shade(d.frame_size(), 1.0);
  for (std::size_t y = 0; y < d.ny; ++y) {
    for (std::size_t x = 0; x < d.nx; ++x) {
      const double u = (static_cast<double>(x) - hx) / hx;
      const double v = (static_cast<double>(y) - hy) / hy;
      double value = 0.0;
      for (const Ellipse& e : spec.ellipses) {
        blend(value, e.intensity, coverage(ellipse_distance_px(e, u, v, half_px), spec.edge_width));
      }
      const std::size_t i = x + d.nx * y;
      static_frame[i] = value;
      phase[i] = spec.phase_amplitude * std::clamp(smooth(ph, u, v), -1.0, 1.0);
      shade[i] = 1.0 - spec.shading * 0.5 * (1.0 + std::clamp(smooth(sh, u, v), -1.0, 1.0));
    }
  }

  ComplexVolume out(d);
  for (std::size_t t = 0; t < d.nt; ++t) {
    const Ellipse disk{spec.disk_cx, spec.disk_cy, disk_radius(spec, t), disk_radius(spec, t), 0.0,
                       spec.disk_intensity};
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const double u = (static_cast<double>(x) - hx) / hx;
        const double v = (static_cast<double>(y) - hy) / hy;
        const std::size_t i = x + d.nx * y;
        double value = static_frame[i];
        blend(value, disk.intensity, coverage(ellipse_distance_px(disk, u, v, half_px), spec.edge_width));
        for (const Bar& b : spec.bars) {
          blend(value, b.intensity, coverage(bar_distance_px(b, u, v, half_px), spec.edge_width));
        }
        out(x, y, t) = std::polar(std::clamp(value * shade[i], 0.0, 1.0), phase[i]);
      }
    }
  }
  return out;
}

KSpaceData retrospective_sample(const ComplexVolume& x, const EncodingOperator& op, double noise_std,
                                std::uint64_t seed) {
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("noise_std must be >= 0");
  KSpaceData y = op.forward(x);
  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, noise_std);
    for (cx& s : y.samples) {
      const double re = dist(rng);
      const double im = dist(rng);
      s += cx(re, im);
    }
  }
  return y;
}

}  // namespace alone
