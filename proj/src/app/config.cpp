#include "alone/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alone/error.hpp"

namespace alone::app {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    read(node_.at(key), std::string(path_.empty() ? "" : path_ + ".") + key, out);
  }

  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return {node_.contains(key) ? node_.at(key) : empty, path_.empty() ? key : path_ + "." + key};
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + prefix() + item.key() + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }
  std::string prefix() const { return path_.empty() ? "" : path_ + "."; }

  static void read(const json& v, const std::string& name, double& out) {
    if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
    out = v.get<double>();
  }
  static void read(const json& v, const std::string& name, std::size_t& out) {
    if (!v.is_number_unsigned()) throw ConfigError("'" + name + "' must be a non-negative integer");
    out = v.get<std::size_t>();
  }
  static void read(const json& v, const std::string& name, bool& out) {
    if (!v.is_boolean()) throw ConfigError("'" + name + "' must be true or false");
    out = v.get<bool>();
  }
  static void read(const json& v, const std::string& name, std::string& out) {
    if (!v.is_string()) throw ConfigError("'" + name + "' must be a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, const std::string& name, Extent3& out) {
    if (!v.is_array() || v.size() != 3) throw ConfigError("'" + name + "' must be [x, y, t]");
    std::size_t e[3];
    for (std::size_t i = 0; i < 3; ++i) read(v[i], name, e[i]);
    out = {e[0], e[1], e[2]};
  }
  static void read(const json& v, const std::string& name, std::vector<double>& out) {
    if (!v.is_array()) throw ConfigError("'" + name + "' must be an array of numbers");
    out.clear();
    for (const auto& item : v) {
      double d = 0.0;
      read(item, name, d);
      out.push_back(d);
    }
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

net::Mode parse_mode(const std::string& name) {
  if (name == "real") return net::Mode::real;
  if (name == "complex") return net::Mode::complex;
  throw ConfigError("alone.mode must be 'real' or 'complex', got '" + name + "'");
}

ordered extent(const Extent3& e) { return ordered::array({e.x, e.y, e.t}); }

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "adjoint") return Method::adjoint;
  if (name == "tv") return Method::tv;
  if (name == "dic") return Method::dic;
  if (name == "alone") return Method::alone;
  throw ConfigError("method must be one of adjoint, tv, dic, alone; got '" + name + "'");
}

const char* to_string(Method method) {
  switch (method) {
    case Method::adjoint: return "adjoint";
    case Method::tv: return "tv";
    case Method::dic: return "dic";
    case Method::alone: return "alone";
  }
  return "?";
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section top(root, "");
  top.get("seed", c.seed);
  std::string out_dir = c.output_dir.string();
  top.get("output_dir", out_dir);
  c.output_dir = out_dir;
  std::string method = to_string(c.method);
  top.get("method", method);
  c.method = parse_method(method);
  top.get("noise_std", c.noise_std);
  top.get("crop_fraction", c.crop_fraction);
  top.get("sweep_lambdas", c.sweep_lambdas);

  {
    Section s = top.child("phantom");
    s.get("nx", c.phantom.nx);
    s.get("ny", c.phantom.ny);
    s.get("nt", c.phantom.nt);
    s.get("disk_radius", c.phantom.disk_radius);
    s.get("disk_amplitude", c.phantom.disk_amplitude);
    s.get("edge_width", c.phantom.edge_width);
    s.get("shading", c.phantom.shading);
    s.get("phase_amplitude", c.phantom.phase_amplitude);
    s.finish();
  }
  {
    Section s = top.child("trajectory");
    s.get("kind", c.trajectory.kind);
    s.get("acceleration", c.trajectory.acceleration);
    s.get("spokes_per_frame", c.trajectory.spokes_per_frame);
    s.get("samples_per_spoke", c.trajectory.samples_per_spoke);
    s.get("coils", c.trajectory.coils);
    s.finish();
  }
  {
    Section s = top.child("alone");
    AloneConfig& a = c.alone;
    s.get("lambda", a.lambda);
    s.get("iterations", a.max_iterations);
    s.get("epsilon", a.epsilon);
    s.get("pcg_iterations", a.pcg_iterations);
    s.get("pcg_tolerance", a.pcg_tolerance);
    s.get("patch", a.patch);
    s.get("stride", a.stride);
    std::string mode = a.mode == net::Mode::real ? "real" : "complex";
    s.get("mode", mode);
    a.mode = parse_mode(mode);
    s.get("filters", a.filters);
    s.get("n_backprops", a.train.n_backprops);
    s.get("learning_rate", a.train.learning_rate);
    s.get("penalty_weight", a.train.penalty_weight);
    s.get("batch_size", a.train.batch_size);
    s.get("eval_every", a.train.eval_every);
    s.get("warm_start", a.warm_start);
    s.get("normalize_patches", a.normalize_patches);
    s.finish();
  }
  {
    Section s = top.child("tv");
    s.get("lambda", c.tv.lambda);
    s.get("rho", c.tv.rho);
    s.get("outer_iterations", c.tv.outer_iterations);
    s.get("shrink_iterations", c.tv.shrink_iterations);
    s.get("pcg_iterations", c.tv.pcg_iterations);
    s.finish();
  }
  {
    Section s = top.child("dic");
    s.get("lambda", c.dic.lambda);
    s.get("outer_iterations", c.dic.outer_iterations);
    s.get("patch", c.dic.patch);
    s.get("stride", c.dic.stride);
    s.get("sparsity", c.dic.sparsity);
    s.get("atoms", c.dic.atoms);
    s.get("itkrm_iterations", c.dic.itkrm_iterations);
    s.get("pcg_iterations", c.dic.pcg_iterations);
    s.finish();
  }
  top.finish();
  c.alone.seed = c.seed;
  c.dic.seed = c.seed;
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  ordered root;
  root["seed"] = c.seed;
  root["output_dir"] = c.output_dir.string();
  root["method"] = to_string(c.method);
  root["noise_std"] = c.noise_std;
  root["crop_fraction"] = c.crop_fraction;
  root["sweep_lambdas"] = c.sweep_lambdas;
  root["phantom"] = {{"nx", c.phantom.nx},
                     {"ny", c.phantom.ny},
                     {"nt", c.phantom.nt},
                     {"disk_radius", c.phantom.disk_radius},
                     {"disk_amplitude", c.phantom.disk_amplitude},
                     {"edge_width", c.phantom.edge_width},
                     {"shading", c.phantom.shading},
                     {"phase_amplitude", c.phantom.phase_amplitude}};
  root["trajectory"] = {{"kind", c.trajectory.kind},
                        {"acceleration", c.trajectory.acceleration},
                        {"spokes_per_frame", c.trajectory.spokes_per_frame},
                        {"samples_per_spoke", c.trajectory.samples_per_spoke},
                        {"coils", c.trajectory.coils}};
  const AloneConfig& a = c.alone;
  root["alone"] = {{"lambda", a.lambda},
                   {"iterations", a.max_iterations},
                   {"epsilon", a.epsilon},
                   {"pcg_iterations", a.pcg_iterations},
                   {"pcg_tolerance", a.pcg_tolerance},
                   {"patch", extent(a.patch)},
                   {"stride", extent(a.stride)},
                   {"mode", a.mode == net::Mode::real ? "real" : "complex"},
                   {"filters", a.filters},
                   {"n_backprops", a.train.n_backprops},
                   {"learning_rate", a.train.learning_rate},
                   {"penalty_weight", a.train.penalty_weight},
                   {"batch_size", a.train.batch_size},
                   {"eval_every", a.train.eval_every},
                   {"warm_start", a.warm_start},
                   {"normalize_patches", a.normalize_patches}};
  root["tv"] = {{"lambda", c.tv.lambda},
                {"rho", c.tv.rho},
                {"outer_iterations", c.tv.outer_iterations},
                {"shrink_iterations", c.tv.shrink_iterations},
                {"pcg_iterations", c.tv.pcg_iterations}};
  root["dic"] = {{"lambda", c.dic.lambda},
                 {"outer_iterations", c.dic.outer_iterations},
                 {"patch", extent(c.dic.patch)},
                 {"stride", extent(c.dic.stride)},
                 {"sparsity", c.dic.sparsity},
                 {"atoms", c.dic.atoms},
                 {"itkrm_iterations", c.dic.itkrm_iterations},
                 {"pcg_iterations", c.dic.pcg_iterations}};
  return root.dump(2) + "\n";
}

void validate(const RunConfig& c) {
  if (c.phantom.nx < 8 || c.phantom.ny < 8 || c.phantom.nt < 1) {
    throw ConfigError("phantom needs nx, ny >= 8 and nt >= 1");
  }
  if (c.trajectory.kind != "radial" && c.trajectory.kind != "cartesian") {
    throw ConfigError("trajectory.kind must be 'radial' or 'cartesian'");
  }
  if (!(c.trajectory.acceleration >= 1.0)) throw ConfigError("trajectory.acceleration must be >= 1");
  if (c.trajectory.coils < 1) throw ConfigError("trajectory.coils must be >= 1");
  if (!(c.noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
  if (!(c.crop_fraction > 0.0 && c.crop_fraction <= 1.0)) throw ConfigError("crop_fraction must lie in (0, 1]");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  for (double l : c.sweep_lambdas) {
    if (!(l > 0.0)) throw ConfigError("sweep_lambdas must be positive");
  }
  alone::validate(phantom_spec(c));
  alone::validate(c.alone);
  alone::validate(c.tv);
  alone::validate(c.dic);
  try {
    PatchGeometry(c.dims(), c.alone.patch, c.alone.stride);
    PatchGeometry(c.dims(), c.dic.patch, c.dic.stride);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("patch geometry does not tile the image: ") + e.what());
  }
}

PhantomSpec phantom_spec(const RunConfig& c) {
  PhantomSpec spec = PhantomSpec::standard(c.dims());
  spec.disk_radius = c.phantom.disk_radius;
  spec.disk_amplitude = c.phantom.disk_amplitude;
  spec.edge_width = c.phantom.edge_width;
  spec.shading = c.phantom.shading;
  spec.phase_amplitude = c.phantom.phase_amplitude;
  spec.seed = c.seed;
  return spec;
}

std::size_t resolved_spokes(const RunConfig& c) {
  if (c.trajectory.spokes_per_frame > 0) return c.trajectory.spokes_per_frame;
  return spokes_for_acceleration(c.phantom.nx, c.trajectory.acceleration);
}

std::unique_ptr<EncodingOperator> make_operator(const RunConfig& c) {
  const Dims d = c.dims();
  const CoilMaps coils = c.trajectory.coils == 1 ? CoilMaps::single(d.nx, d.ny)
                                                 : CoilMaps::synthetic(d.nx, d.ny, c.trajectory.coils);
  if (c.trajectory.kind == "cartesian") {
    auto masks = c.trajectory.acceleration == 1.0 ? full_masks(d)
                                                  : random_masks(d, 1.0 / c.trajectory.acceleration, c.seed);
    return std::make_unique<CartesianOperator>(d, std::move(masks), coils);
  }
  const std::size_t samples = c.trajectory.samples_per_spoke > 0 ? c.trajectory.samples_per_spoke : d.nx;
  return std::make_unique<RadialOperator>(d, RadialTrajectory::golden_angle(resolved_spokes(c), samples, d.nt),
                                          coils);
}

}  // namespace alone::app
