#include "alone/reference/network.hpp"

#include <algorithm>
#include <vector>

#include "alone/error.hpp"

namespace alone::ref {

namespace {

std::ptrdiff_t wrap(std::ptrdiff_t i, std::ptrdiff_t n) { return ((i % n) + n) % n; }

}  // namespace

void network_forward(const net::NetworkParams& params, const Extent3& shape, std::span<const double> in,
                     std::span<double> out, net::Padding padding) {
  const std::size_t v_count = shape.volume();
  const std::size_t channels = params.channels();
  const std::size_t filters = params.filters();
  if (in.size() != channels * v_count || out.size() != in.size()) throw DimensionError("network input size");
  const auto nx = static_cast<std::ptrdiff_t>(shape.x);
  const auto ny = static_cast<std::ptrdiff_t>(shape.y);
  const auto nt = static_cast<std::ptrdiff_t>(shape.t);
  const auto kernels = params.kernels();
  const auto b1 = params.hidden_bias();
  const auto w2 = params.combination();
  const auto b2 = params.output_bias();
  std::vector<double> hidden(filters);
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    for (std::ptrdiff_t y = 0; y < ny; ++y) {
      for (std::ptrdiff_t x = 0; x < nx; ++x) {
        for (std::size_t k = 0; k < filters; ++k) {
          double acc = b1[k];
          for (std::size_t c = 0; c < channels; ++c) {
            for (int dt = -1; dt <= 1; ++dt) {
              for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                  std::ptrdiff_t sx = x + dx, sy = y + dy, st = t + dt;
                  if (padding == net::Padding::circular) {
                    sx = wrap(sx, nx);
                    sy = wrap(sy, ny);
                    st = wrap(st, nt);
                  } else if (sx < 0 || sy < 0 || st < 0 || sx >= nx || sy >= ny || st >= nt) {
                    continue;
                  }
                  const std::size_t tap = static_cast<std::size_t>((dt + 1) * 9 + (dy + 1) * 3 + (dx + 1));
                  const auto src = static_cast<std::size_t>(sx + nx * (sy + ny * st));
                  acc += kernels[(k * channels + c) * net::kTaps + tap] * in[c * v_count + src];
                }
              }
            }
          }
          hidden[k] = std::max(acc, 0.0);
        }
        const auto v = static_cast<std::size_t>(x + nx * (y + ny * t));
        for (std::size_t c = 0; c < channels; ++c) {
          double acc = b2[c];
          for (std::size_t k = 0; k < filters; ++k) acc += w2[c * filters + k] * hidden[k];
          out[c * v_count + v] = acc;
        }
      }
    }
  }
}

net::SampleSet network_forward_all(const net::NetworkParams& params, const net::SampleSet& samples) {
  net::SampleSet out(samples.shape(), samples.channels(), samples.count());
  for (std::size_t i = 0; i < samples.count(); ++i) {
    network_forward(params, samples.shape(), samples.sample(i), out.sample(i));
  }
  return out;
}

}  // namespace alone::ref
