#pragma once

// Run configuration shared by the command-line tool and the acceptance
// runner. Files are JSON; unknown keys are errors and every run writes the
// fully resolved configuration next to its outputs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "alone/alone.hpp"
#include "alone/dictionary.hpp"
#include "alone/operators.hpp"
#include "alone/phantom.hpp"
#include "alone/tv.hpp"

namespace alone::app {

enum class Method { adjoint, tv, dic, alone };

Method parse_method(const std::string& name);
const char* to_string(Method method);

struct PhantomSection {
  std::size_t nx = 64;
  std::size_t ny = 64;
  std::size_t nt = 16;
  double disk_radius = 0.16;
  double disk_amplitude = 0.05;
  double edge_width = 1.0;
  double shading = 0.1;
  double phase_amplitude = 0.6;
};

struct TrajectorySection {
  std::string kind = "radial";  // radial | cartesian
  /// Target undersampling relative to nyquist_spokes(nx); ignored when
  /// spokes_per_frame is set.
  double acceleration = 9.0;
  std::size_t spokes_per_frame = 0;
  std::size_t samples_per_spoke = 0;  // 0 = nx
  std::size_t coils = 1;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  Method method = Method::alone;
  double noise_std = 0.0;
  double crop_fraction = 0.5;
  PhantomSection phantom;
  TrajectorySection trajectory;
  AloneConfig alone;
  TvConfig tv;
  DicConfig dic;
  std::vector<double> sweep_lambdas{0.01, 0.03, 0.1, 0.3, 1.0};

  Dims dims() const { return {phantom.nx, phantom.ny, phantom.nt}; }
};

/// Parses and validates; throws ConfigError on unknown keys, wrong types or
/// invalid values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Pretty JSON with every key present; parse_config(to_json(c)) reproduces c.
std::string to_json(const RunConfig& config);
void validate(const RunConfig& config);

PhantomSpec phantom_spec(const RunConfig& config);
std::unique_ptr<EncodingOperator> make_operator(const RunConfig& config);
/// Spokes per frame the configuration resolves to (radial only).
std::size_t resolved_spokes(const RunConfig& config);

}  // namespace alone::app
