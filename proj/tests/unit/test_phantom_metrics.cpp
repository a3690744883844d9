#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "alone/error.hpp"
#include "alone/metrics.hpp"
#include "alone/phantom.hpp"
#include "alone/trace.hpp"
#include "support/probes.hpp"

using namespace alone;
using Catch::Approx;

TEST_CASE("beating disk radius", "[phantom]") {
  auto spec = PhantomSpec::standard({32, 32, 16});
  CHECK(disk_radius(spec, 0) == spec.disk_radius);
  CHECK(disk_radius(spec, 4) == Approx(spec.disk_radius + spec.disk_amplitude).epsilon(1e-14));
  CHECK(disk_radius(spec, 12) == Approx(spec.disk_radius - spec.disk_amplitude).epsilon(1e-14));
}

TEST_CASE("static phantom without beating", "[phantom]") {
  auto spec = PhantomSpec::standard({32, 32, 6});
  spec.disk_amplitude = 0.0;
  const auto x = make_phantom(spec);
  for (std::size_t t = 1; t < 6; ++t)
    for (std::size_t i = 0; i < spec.dims.frame_size(); ++i) REQUIRE(x.frame(t)[i] == x.frame(0)[i]);
}

TEST_CASE("phantom magnitude is bounded and the phantom is seeded", "[phantom]") {
  const auto spec = PhantomSpec::standard();
  const auto x = make_phantom(spec);
  double peak = 0.0;
  for (const cx& v : x.data()) peak = std::max(peak, std::abs(v));
  CHECK(peak <= 1.0);
  CHECK(peak > 0.5);
  CHECK(make_phantom(spec) == x);
  auto other = spec;
  other.seed = 1;
  CHECK_FALSE(make_phantom(other) == x);
  // The beating disk changes between frames.
  CHECK_FALSE(std::equal(x.frame(0).begin(), x.frame(0).end(), x.frame(4).begin()));
}

TEST_CASE("invalid phantom specs are rejected", "[phantom]") {
  auto spec = PhantomSpec::standard();
  spec.disk_amplitude = spec.disk_radius + 0.1;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec = PhantomSpec::standard();
  spec.dims.nt = 0;
  CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("noiseless full sampling is recovered by the adjoint", "[phantom]") {
  const auto x = make_phantom(PhantomSpec::standard({32, 32, 4}));
  const CartesianOperator op(x.dims(), full_masks(x.dims()));
  const auto y = retrospective_sample(x, op, 0.0, 1);
  CHECK(testing::relative_difference(op.adjoint(y), x) < 1e-10);
}

TEST_CASE("acceleration bookkeeping", "[phantom]") {
  const double full = static_cast<double>(nyquist_spokes(64));
  CHECK(full / static_cast<double>(spokes_for_acceleration(64, 3.0)) == Approx(3.0).epsilon(0.05));
  CHECK(full / static_cast<double>(spokes_for_acceleration(64, 9.0)) == Approx(9.0).epsilon(0.05));
}

TEST_CASE("noise energy matches its expectation", "[phantom]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(5, 16, 4));
  const ComplexVolume zero(d);
  const double sigma = 0.3;
  double mean = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) mean += squared_norm(retrospective_sample(zero, op, sigma, s).samples);
  mean /= 100.0;
  const double m = static_cast<double>(op.descriptor().n_samples);
  CHECK(mean == Approx(2.0 * m * sigma * sigma).epsilon(0.05));
}

TEST_CASE("identical volumes", "[metrics]") {
  const auto x = make_phantom(PhantomSpec::standard({32, 32, 4}));
  CHECK(nrmse(x, x) == 0.0);
  CHECK(ssim(x, x) == Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(psnr(x, x)));
  const auto rec = evaluate(x, x);
  CHECK(rec.nrmse == 0.0);
}

TEST_CASE("hand-computed PSNR", "[metrics]") {
  const Dims d{8, 8, 1};
  const ComplexVolume ref(d, cx(0.5, 0.0));
  const ComplexVolume x(d, cx(0.6, 0.0));
  CHECK(psnr(x, ref) == Approx(20.0 * std::log10(0.5 / 0.1)).epsilon(1e-12));
  CHECK(psnr(x, ref) == Approx(13.979).margin(1e-3));
  CHECK(nrmse(x, ref) == Approx(0.2).epsilon(1e-12));
  // Magnitudes are compared, so a phase change alone costs nothing.
  CHECK(nrmse(cx(0.0, 1.0) * ref, ref) < 1e-15);
  CHECK_THROWS_AS(nrmse(x, ComplexVolume(d)), PreconditionError);
}

TEST_CASE("central crop", "[metrics]") {
  CHECK(crop_center(ComplexVolume({320, 320, 30}), 0.5).dims() == Dims{160, 160, 30});
  CHECK(crop_center(ComplexVolume({64, 64, 16}), 0.5).dims() == Dims{32, 32, 16});
  const auto v = testing::random_volume({6, 5, 2}, 1);
  CHECK(crop_center(v, 1.0) == v);
  const auto c = crop_center(v, 0.5);
  REQUIRE(c.dims() == Dims{3, 3, 2});
  CHECK(c(0, 0, 1) == v(1, 1, 1));
  CHECK_THROWS_AS(crop_center(v, 0.0), ConfigError);
  CHECK_THROWS_AS(crop_center(v, 1.5), ConfigError);
}

TEST_CASE("SSIM is symmetric with a fixed dynamic range", "[metrics]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = magnitude(testing::random_volume({20, 16, 2}, 2 * s));
    const auto b = magnitude(testing::random_volume({20, 16, 2}, 2 * s + 1));
    CHECK(ssim(a, b, 3.0) == Approx(ssim(b, a, 3.0)).epsilon(1e-14));
    CHECK(ssim(a, b, 3.0) < 1.0);
  }
}

TEST_CASE("SSIM falls as noise grows", "[metrics]") {
  const auto x = make_phantom(PhantomSpec::standard({32, 32, 2}));
  double previous = 1.0;
  for (double level : {0.01, 0.05, 0.2}) {
    auto noisy = x;
    const auto n = testing::random_volume(x.dims(), 3);
    for (std::size_t i = 0; i < x.size(); ++i) noisy[i] += level * n[i];
    const double s = ssim(noisy, x);
    CHECK(s < previous);
    previous = s;
  }
}

TEST_CASE("per-frame metrics", "[metrics]") {
  const auto x = make_phantom(PhantomSpec::standard({16, 16, 3}));
  auto y = x;
  for (std::size_t i = 0; i < 256; ++i) y.frame(1)[i] *= 1.1;
  const auto frames = evaluate_frames(y, x);
  REQUIRE(frames.size() == 3);
  CHECK(frames[0].nrmse == 0.0);
  CHECK(frames[1].nrmse == Approx(0.1).epsilon(1e-12));
}

TEST_CASE("trace CSV round trip", "[metrics]") {
  IterationTrace trace;
  for (std::size_t k = 1; k <= 3; ++k) {
    IterationRecord r;
    r.iteration = k;
    r.relative_change = 1.0 / static_cast<double>(k * 7);
    r.fidelity = 0.1 * static_cast<double>(k);
    r.t_train_s = 0.25;
    r.psnr = k == 3 ? std::numeric_limits<double>::infinity() : 30.0 + static_cast<double>(k);
    trace.records.push_back(r);
  }
  const auto path = std::filesystem::temp_directory_path() / "alone_unit" / "trace.csv";
  std::filesystem::create_directories(path.parent_path());
  write_trace_csv(path, trace);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,e_k,fidelity,train_loss,psnr,ssim,nrmse,t_train_s,t_reg_s,t_pcg_s,reg_value");
  const auto back = read_trace_csv(path);
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[0].relative_change == trace.records[0].relative_change);
  CHECK(back.records[1].fidelity == trace.records[1].fidelity);
  CHECK(std::isnan(back.records[0].train_loss));
  CHECK(back.records[2].psnr == kPsnrSentinel);
}
