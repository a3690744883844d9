#include "alone/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "alone/error.hpp"

namespace alone {

double golden_angle() { return std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0; }

double spoke_angle(std::size_t s) { return std::fmod(static_cast<double>(s) * golden_angle(), std::numbers::pi); }

double spoke_radius(std::size_t i, std::size_t n) {
  const double offset = static_cast<double>(i) - static_cast<double>(n / 2);
  return 2.0 * std::numbers::pi * offset / static_cast<double>(n);
}

std::size_t nyquist_spokes(std::size_t nx) {
  return static_cast<std::size_t>(std::ceil(std::numbers::pi / 2.0 * static_cast<double>(nx)));
}

std::size_t spokes_for_acceleration(std::size_t nx, double acceleration) {
  if (!(acceleration > 0.0)) throw ConfigError("acceleration must be positive");
  const double spokes = std::round(static_cast<double>(nyquist_spokes(nx)) / acceleration);
  return spokes < 1.0 ? 1 : static_cast<std::size_t>(spokes);
}

RadialTrajectory::RadialTrajectory(std::vector<std::size_t> counts, std::size_t samples_per_spoke)
    : samples_per_spoke_(samples_per_spoke), frame_spokes_(std::move(counts)) {
  frame_first_spoke_.reserve(frame_spokes_.size());
  for (std::size_t c : frame_spokes_) {
    frame_first_spoke_.push_back(total_spokes_);
    total_spokes_ += c;
  }
}

RadialTrajectory RadialTrajectory::golden_angle(std::size_t spokes_per_frame, std::size_t samples_per_spoke,
                                                std::size_t nt) {
  if (spokes_per_frame == 0 || samples_per_spoke == 0 || nt == 0) {
    throw ConfigError("radial trajectory counts must be >= 1");
  }
  return RadialTrajectory(std::vector<std::size_t>(nt, spokes_per_frame), samples_per_spoke);
}

RadialTrajectory RadialTrajectory::golden_angle_total(std::size_t total_spokes, std::size_t samples_per_spoke,
                                                      std::size_t nt) {
  if (total_spokes < nt || samples_per_spoke == 0 || nt == 0) {
    throw ConfigError("radial trajectory needs at least one spoke per frame");
  }
  std::vector<std::size_t> counts(nt, total_spokes / nt);
  for (std::size_t f = 0; f < total_spokes % nt; ++f) ++counts[f];
  return RadialTrajectory(std::move(counts), samples_per_spoke);
}

std::size_t RadialTrajectory::spokes_in_frame(std::size_t f) const { return frame_spokes_.at(f); }

std::vector<KPoint> RadialTrajectory::frame_points(std::size_t f) const {
  std::vector<KPoint> pts;
  pts.reserve(samples_in_frame(f));
  for (std::size_t s = 0; s < spokes_in_frame(f); ++s) {
    const double phi = spoke_angle(first_spoke(f) + s);
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    for (std::size_t i = 0; i < samples_per_spoke_; ++i) {
      const double rho = spoke_radius(i, samples_per_spoke_);
      pts.push_back({rho * c, rho * sn});
    }
  }
  return pts;
}

void RadialTrajectory::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.precision(17);
  out << "spoke,frame,angle,sample,kx,ky\n";
  for (std::size_t f = 0; f < nt(); ++f) {
    const auto pts = frame_points(f);
    for (std::size_t s = 0; s < spokes_in_frame(f); ++s) {
      const std::size_t global = first_spoke(f) + s;
      for (std::size_t i = 0; i < samples_per_spoke_; ++i) {
        const KPoint& k = pts[s * samples_per_spoke_ + i];
        out << global << ',' << f << ',' << spoke_angle(global) << ',' << i << ',' << k.kx << ',' << k.ky << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace alone
