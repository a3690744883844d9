#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "alone/app/commands.hpp"
#include "alone/error.hpp"
#include "alone/frames.hpp"
#include "alone/kspace.hpp"
#include "alone/trajectory.hpp"
#include "alone/volume_io.hpp"
#include "support/probes.hpp"

using namespace alone;
using namespace alone::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "alone_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunConfig small_config() {
  return parse_config(R"({
    "seed": 5, "noise_std": 0.001,
    "phantom": {"nx": 16, "ny": 16, "nt": 4},
    "trajectory": {"acceleration": 3},
    "alone": {"iterations": 1, "patch": [8, 8, 2], "stride": [4, 4, 2], "filters": 4,
              "n_backprops": 10, "batch_size": 8, "eval_every": 5},
    "tv": {"outer_iterations": 2},
    "dic": {"outer_iterations": 1, "itkrm_iterations": 1, "atoms": 16, "sparsity": 2}
  })");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ALONE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad types", "[cli]") {
  CHECK_NOTHROW(parse_config("{}"));
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alone": {"lamda": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"phantom": {"nx": -4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alone": {"patch": [4, 4]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"method": "nufft"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alone": {"mode": "quaternion"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alone": {"lambda": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alone": {"patch": [5, 5, 4]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("resolved config round trips", "[cli]") {
  RunConfig c = small_config();
  c.method = Method::dic;
  c.alone.mode = net::Mode::real;
  c.sweep_lambdas = {0.5, 2.0};
  const std::string text = to_json(c);
  CHECK(to_json(parse_config(text)) == text);
  const RunConfig back = parse_config(text);
  CHECK(back.method == Method::dic);
  CHECK(back.alone.seed == 5);
  CHECK(back.dic.seed == 5);
  CHECK(back.alone.patch == Extent3{8, 8, 2});
}

TEST_CASE("simulate writes consistent files", "[cli]") {
  const fs::path dir = scratch("simulate");
  RunConfig c = small_config();
  const auto files = cmd_simulate(c, dir);
  for (const auto& p : {files.ground_truth, files.kspace, files.trajectory, files.config}) CHECK(fs::exists(p));
  const KSpaceData y = load_kspace(files.kspace);
  CHECK(y.samples.size() == files.spokes_per_frame * 16 * 4 * 1);
  CHECK(load_volume(files.ground_truth).dims() == c.dims());
  CHECK(to_json(load_config(files.config)) == slurp(files.config));

  const fs::path again = scratch("simulate_again");
  cmd_simulate(c, again);
  CHECK(slurp(again / "kspace.ksp") == slurp(files.kspace));
  CHECK(slurp(again / "ground_truth.vol") == slurp(files.ground_truth));

  c.trajectory.coils = 3;
  const auto multi = cmd_simulate(c, scratch("simulate_coils"));
  CHECK(multi.n_samples == files.spokes_per_frame * 16 * 4 * 3);

  c.trajectory.kind = "cartesian";
  c.trajectory.coils = 1;
  const auto cart = cmd_simulate(c, scratch("simulate_cartesian"));
  CHECK(cart.trajectory.filename() == "mask.csv");
  CHECK(load_kspace(cart.kspace).descriptor.kind == SamplingKind::cartesian);
}

TEST_CASE("acceleration 9 keeps about a ninth of the Nyquist spokes", "[cli]") {
  RunConfig c;
  c.trajectory.acceleration = 9.0;
  const double ratio = static_cast<double>(resolved_spokes(c)) / static_cast<double>(nyquist_spokes(64));
  CHECK(std::abs(ratio - 1.0 / 9.0) <= 0.05 / 9.0);
}

TEST_CASE("reconstruct dispatches every method", "[cli]") {
  const fs::path dir = scratch("reconstruct");
  RunConfig c = small_config();
  const auto sim = cmd_simulate(c, dir);

  c.method = Method::adjoint;
  const auto adj = cmd_reconstruct(c, sim.kspace, sim.ground_truth, dir);
  REQUIRE(adj.trace_data.records.size() == 1);
  const auto op = make_operator(c);
  const ComplexVolume expected = op->adjoint(load_kspace(sim.kspace));
  CHECK(testing::relative_difference(load_volume(adj.volume), expected) < 1e-6);  // stored as f32
  CHECK(std::isfinite(adj.trace_data.records[0].nrmse));

  c.method = Method::alone;
  const auto al = cmd_reconstruct(c, sim.kspace, std::nullopt, dir);
  CHECK(al.trace_data.records.size() == 1);
  CHECK(std::isnan(al.trace_data.records[0].nrmse));
  CHECK(read_trace_csv(al.trace).records.size() == 1);
  CHECK(fs::exists(al.timings));

  for (Method m : {Method::tv, Method::dic}) {
    c.method = m;
    const auto r = cmd_reconstruct(c, sim.kspace, sim.ground_truth, dir);
    CHECK(fs::exists(r.volume));
    CHECK(!r.trace_data.records.empty());
  }

  RunConfig wrong = c;
  wrong.trajectory.acceleration = 2.0;
  CHECK_THROWS_AS(cmd_reconstruct(wrong, sim.kspace, std::nullopt, dir), DimensionError);
}

TEST_CASE("evaluate writes summary and per-frame rows", "[cli]") {
  const fs::path dir = scratch("evaluate");
  const Dims d{8, 8, 3};
  const fs::path ref = dir / "ref.vol", x = dir / "x.vol", other = dir / "other.vol";
  save_volume(ref, ComplexVolume(d, cx(0.5, 0.0)));
  save_volume(x, ComplexVolume(d, cx(0.6, 0.0)));
  save_volume(other, ComplexVolume({8, 8, 2}, cx(0.5, 0.0)));

  const auto same = cmd_evaluate(ref, ref, 0.5, dir / "same.csv");
  CHECK(same.summary.nrmse == 0.0);
  CHECK(same.summary.ssim == Catch::Approx(1.0).margin(1e-12));

  const auto m = cmd_evaluate(x, ref, 0.5, dir / "m.csv");
  CHECK(m.summary.psnr == Catch::Approx(13.979).margin(1e-3));
  CHECK(m.frames.size() == 3);
  CHECK(slurp(dir / "m.csv").rfind("psnr,ssim,nrmse,crop_fraction\n", 0) == 0);
  CHECK(fs::exists(dir / "m_frames.csv"));

  CHECK_THROWS_AS(cmd_evaluate(x, other, 0.5, dir / "bad.csv"), DimensionError);
  CHECK_THROWS_AS(cmd_evaluate(dir / "missing.vol", ref, 0.5, dir / "bad.csv"), IoError);
}

TEST_CASE("frame export", "[cli]") {
  const fs::path dir = scratch("frames");
  const ComplexVolume v = testing::random_volume({12, 10, 16}, 4);
  save_volume(dir / "v.vol", v);
  const auto e = cmd_export_frames(dir / "v.vol", dir / "a");
  REQUIRE(e.files.size() == 17);
  std::size_t profiles = 0;
  for (const auto& f : e.files) profiles += f.filename() == "profile_xt.pgm";
  CHECK(profiles == 1);
  const auto again = cmd_export_frames(dir / "v.vol", dir / "b");
  for (std::size_t i = 0; i < e.files.size(); ++i) CHECK(slurp(e.files[i]) == slurp(again.files[i]));

  save_volume(dir / "c.vol", ComplexVolume({8, 8, 2}, cx(0.3, 0.4)));
  const auto flat = cmd_export_frames(dir / "c.vol", dir / "c");
  CHECK(flat.scale == 0.0);
  const std::string img = slurp(flat.files[0]);
  const std::string pixels = img.substr(img.size() - 64);
  CHECK(pixels == std::string(64, pixels[0]));
}

TEST_CASE("sweep writes one row per lambda", "[cli]") {
  const fs::path dir = scratch("sweep");
  RunConfig c = small_config();
  c.method = Method::tv;
  c.sweep_lambdas = {0.001, 0.01};
  const auto sim = cmd_simulate(c, dir);
  const auto rows = cmd_sweep(c, sim.kspace, sim.ground_truth, dir);
  CHECK(rows.size() == 2);
  CHECK(fs::exists(dir / "sweep_tv.csv"));
  c.method = Method::adjoint;
  CHECK_THROWS_AS(cmd_sweep(c, sim.kspace, sim.ground_truth, dir), ConfigError);
}

TEST_CASE("exit codes of the command-line tool", "[cli]") {
  const fs::path dir = scratch("exit");
  {
    std::ofstream(dir / "small.json") << to_json(small_config());
    std::ofstream(dir / "bad.json") << R"({"alone": {"unknown": 1}})";
    RunConfig diverge = small_config();
    diverge.alone.train.learning_rate = 1e300;
    diverge.alone.train.n_backprops = 50;
    std::ofstream(dir / "diverge.json") << to_json(diverge);
  }
  const std::string cfg = "--config " + (dir / "small.json").string() + " --out " + dir.string();
  CHECK(run_cli("simulate " + cfg) == exit_ok);
  CHECK(run_cli("reconstruct --method adjoint --threads 1 " + cfg) == exit_ok);
  CHECK(run_cli("simulate --config " + (dir / "bad.json").string()) == exit_config);
  CHECK(run_cli("evaluate --recon " + (dir / "missing.vol").string() + " --reference " +
                (dir / "ground_truth.vol").string() + " --out " + (dir / "m.csv").string()) == exit_io);
  save_volume(dir / "small.vol", ComplexVolume({8, 8, 1}));
  CHECK(run_cli("evaluate --recon " + (dir / "small.vol").string() + " --reference " +
                (dir / "ground_truth.vol").string() + " --out " + (dir / "m.csv").string()) == exit_config);
  CHECK(run_cli("export-frames --volume " + (dir / "missing.vol").string() + " --out " + dir.string()) == exit_io);

  const fs::path div = dir / "div";
  CHECK(run_cli("reconstruct --method alone --config " + (dir / "diverge.json").string() + " --kspace " +
                (dir / "kspace.ksp").string() + " --out " + div.string()) == exit_numerical);
  CHECK(fs::exists(div / "trace_alone.csv"));
  CHECK(!fs::exists(div / "recon_alone.vol"));
}
