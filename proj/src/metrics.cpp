#include "alone/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alone/error.hpp"

namespace alone {

namespace {

std::size_t cropped_extent(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("crop fraction must lie in (0, 1]");
  const auto m = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  if (m < 1) throw DimensionError("crop of " + std::to_string(n) + " pixels is empty");
  return m;
}

template <typename Vol, typename Get, typename Make>
auto crop_generic(const Dims& d, double fraction, Get get, Make make) {
  const std::size_t mx = cropped_extent(d.nx, fraction);
  const std::size_t my = cropped_extent(d.ny, fraction);
  const std::size_t ox = (d.nx - mx) / 2;
  const std::size_t oy = (d.ny - my) / 2;
  Vol out = make(Dims{mx, my, d.nt});
  for (std::size_t t = 0; t < d.nt; ++t) {
    for (std::size_t y = 0; y < my; ++y) {
      for (std::size_t x = 0; x < mx; ++x) out(x, y, t) = get(ox + x, oy + y, t);
    }
  }
  return out;
}

std::vector<double> gaussian_window(std::size_t size, double sigma) {
  std::vector<double> w(size);
  const double c = static_cast<double>(size / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double r = static_cast<double>(i) - c;
    w[i] = std::exp(-r * r / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Mean SSIM over the valid positions of one frame with a separable window.
double ssim_frame(const double* a, const double* b, std::size_t nx, std::size_t ny, double c1, double c2) {
  std::size_t size = std::min<std::size_t>({11, nx, ny});
  if (size % 2 == 0) --size;
  const auto w = gaussian_window(size, 1.5);
  const std::size_t ox = nx - size + 1;
  const std::size_t oy = ny - size + 1;
  double total = 0.0;
  for (std::size_t y0 = 0; y0 < oy; ++y0) {
    for (std::size_t x0 = 0; x0 < ox; ++x0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t j = 0; j < size; ++j) {
        for (std::size_t i = 0; i < size; ++i) {
          const double wt = w[i] * w[j];
          const std::size_t idx = (x0 + i) + nx * (y0 + j);
          ma += wt * a[idx];
          mb += wt * b[idx];
          saa += wt * a[idx] * a[idx];
          sbb += wt * b[idx] * b[idx];
          sab += wt * a[idx] * b[idx];
        }
      }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  }
  return total / static_cast<double>(ox * oy);
}

struct Magnitudes {
  RealVolume x;
  RealVolume ref;
};

Magnitudes cropped_magnitudes(const ComplexVolume& x, const ComplexVolume& ref, double crop) {
  require_same_dims(x.dims(), ref.dims(), "metric inputs");
  return {crop_center(magnitude(x), crop), crop_center(magnitude(ref), crop)};
}

double max_of(const RealVolume& v) { return v.data.empty() ? 0.0 : *std::max_element(v.data.begin(), v.data.end()); }

double rmse(const RealVolume& a, const RealVolume& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  return std::sqrt(s / static_cast<double>(a.data.size()));
}

double psnr_of(const Magnitudes& m) {
  const double e = rmse(m.x, m.ref);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(max_of(m.ref) / e);
}

double nrmse_of(const Magnitudes& m) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.x.data.size(); ++i) {
    num += (m.x.data[i] - m.ref.data[i]) * (m.x.data[i] - m.ref.data[i]);
    den += m.ref.data[i] * m.ref.data[i];
  }
  if (den == 0.0) throw PreconditionError("nrmse needs a non-zero reference");
  return std::sqrt(num / den);
}

}  // namespace

ComplexVolume crop_center(const ComplexVolume& v, double fraction) {
  return crop_generic<ComplexVolume>(
      v.dims(), fraction, [&](std::size_t x, std::size_t y, std::size_t t) { return v(x, y, t); },
      [](Dims d) { return ComplexVolume(d); });
}

RealVolume crop_center(const RealVolume& v, double fraction) {
  return crop_generic<RealVolume>(
      v.dims, fraction, [&](std::size_t x, std::size_t y, std::size_t t) { return v(x, y, t); },
      [](Dims d) { return RealVolume(d); });
}

double nrmse(const ComplexVolume& x, const ComplexVolume& ref, double crop) {
  return nrmse_of(cropped_magnitudes(x, ref, crop));
}

double psnr(const ComplexVolume& x, const ComplexVolume& ref, double crop) {
  return psnr_of(cropped_magnitudes(x, ref, crop));
}

double ssim(const RealVolume& a, const RealVolume& b, double dynamic_range) {
  require_same_dims(a.dims, b.dims, "ssim inputs");
  const double range = dynamic_range > 0.0 ? dynamic_range : 1.0;
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  const Dims& d = a.dims;
  double sum = 0.0;
  for (std::size_t t = 0; t < d.nt; ++t) {
    sum += ssim_frame(a.data.data() + t * d.frame_size(), b.data.data() + t * d.frame_size(), d.nx, d.ny, c1, c2);
  }
  return sum / static_cast<double>(d.nt);
}

double ssim(const ComplexVolume& x, const ComplexVolume& ref, double crop) {
  const Magnitudes m = cropped_magnitudes(x, ref, crop);
  return ssim(m.x, m.ref, max_of(m.ref));
}

MetricsRecord evaluate(const ComplexVolume& x, const ComplexVolume& ref, double crop) {
  const Magnitudes m = cropped_magnitudes(x, ref, crop);
  return {psnr_of(m), ssim(m.x, m.ref, max_of(m.ref)), nrmse_of(m), crop};
}

std::vector<MetricsRecord> evaluate_frames(const ComplexVolume& x, const ComplexVolume& ref, double crop) {
  require_same_dims(x.dims(), ref.dims(), "metric inputs");
  const Dims& d = x.dims();
  std::vector<MetricsRecord> out;
  for (std::size_t t = 0; t < d.nt; ++t) {
    const Dims fd{d.nx, d.ny, 1};
    ComplexVolume a(fd, std::vector<cx>(x.frame(t).begin(), x.frame(t).end()));
    ComplexVolume b(fd, std::vector<cx>(ref.frame(t).begin(), ref.frame(t).end()));
    out.push_back(evaluate(a, b, crop));
  }
  return out;
}

}  // namespace alone
