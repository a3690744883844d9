#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace alone {

/// Golden angle increment pi * (sqrt(5) - 1) / 2 (about 111.246 degrees).
double golden_angle();

/// Angle of the s-th acquired spoke, counted globally across frames: mod(s * golden_angle, pi).
double spoke_angle(std::size_t s);

/// Signed radius of sample i on a spoke of n samples: 2 pi (i - floor(n/2)) / n.
/// Lies in [-pi, pi) and hits 0 at i = floor(n/2).
double spoke_radius(std::size_t i, std::size_t n);

/// Number of spokes a fully sampled radial frame of width nx needs (pi/2 * nx).
std::size_t nyquist_spokes(std::size_t nx);

/// Spokes per frame for a target acceleration relative to nyquist_spokes, at least 1.
std::size_t spokes_for_acceleration(std::size_t nx, double acceleration);

struct KPoint {
  double kx = 0.0;
  double ky = 0.0;
};

/// Golden-angle radial sampling pattern for a dynamic acquisition.
class RadialTrajectory {
 public:
  static RadialTrajectory golden_angle(std::size_t spokes_per_frame, std::size_t samples_per_spoke, std::size_t nt);
  /// Spreads total_spokes over nt frames; remainder spokes go to the earliest frames.
  static RadialTrajectory golden_angle_total(std::size_t total_spokes, std::size_t samples_per_spoke, std::size_t nt);

  std::size_t nt() const { return frame_first_spoke_.size(); }
  std::size_t samples_per_spoke() const { return samples_per_spoke_; }
  std::size_t total_spokes() const { return total_spokes_; }
  std::size_t spokes_in_frame(std::size_t f) const;
  std::size_t first_spoke(std::size_t f) const { return frame_first_spoke_.at(f); }
  std::size_t samples_in_frame(std::size_t f) const { return spokes_in_frame(f) * samples_per_spoke_; }
  std::size_t total_samples() const { return total_spokes_ * samples_per_spoke_; }

  /// Sample coordinates of frame f, spoke-major then along the spoke.
  std::vector<KPoint> frame_points(std::size_t f) const;

  /// CSV dump: spoke,frame,angle,sample,kx,ky.
  void write_csv(const std::filesystem::path& path) const;

 private:
  RadialTrajectory(std::vector<std::size_t> counts, std::size_t samples_per_spoke);

  std::size_t samples_per_spoke_ = 0;
  std::size_t total_spokes_ = 0;
  std::vector<std::size_t> frame_first_spoke_;
  std::vector<std::size_t> frame_spokes_;
};

}  // namespace alone
