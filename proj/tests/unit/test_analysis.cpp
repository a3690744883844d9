#include <catch_amalgamated.hpp>

#include <cmath>

#include "alone/analysis.hpp"
#include "alone/phantom.hpp"
#include "support/probes.hpp"

using namespace alone;
using Catch::Approx;

namespace {

AloneConfig frozen_config(const net::NetworkParams& theta) {
  AloneConfig cfg;
  cfg.patch = {8, 8, 2};
  cfg.stride = {4, 4, 1};
  cfg.mode = theta.mode();
  cfg.filters = theta.filters();
  cfg.lambda = 0.5;
  cfg.train_network = false;
  cfg.initial_network = theta;
  return cfg;
}

}  // namespace

TEST_CASE("identity network reproduces arbitrary patches", "[analysis]") {
  const Dims d{16, 16, 4};
  const PatchGeometry g(d, {8, 8, 2}, {4, 4, 1});
  const auto x = testing::random_volume(d, 1);
  for (auto mode : {net::Mode::real, net::Mode::complex}) {
    const auto theta = identity_network(mode);
    CHECK(theta.filters() == 2 * theta.channels());
    CHECK(adaptation_residual(x, theta, g) < 1e-12 * norm(x));
    CHECK(net::kernel_penalty(theta) == 2.0 * static_cast<double>(theta.channels()));
  }
}

TEST_CASE("adapted pairs have vanishing residuals", "[analysis]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(6, 16, 4), CoilMaps::synthetic(16, 16, 2));
  const PatchGeometry g(d, {8, 8, 2}, {4, 4, 1});
  const auto pair = identity_adapted_pair(op, make_phantom(PhantomSpec::standard(d)));
  const auto report = theta_adapted_residuals(pair.x, pair.theta, pair.y, op, g, 0.5, 1e-4);
  CHECK(report.data_residual < 1e-8);
  CHECK(report.adaptation_residual < 1e-8);
  CHECK(report.objective.total() == Approx(1e-4 * net::kernel_penalty(pair.theta)).epsilon(1e-10));
  const auto again = theta_adapted_residuals(pair.x, pair.theta, pair.y, op, g, 0.5, 1e-4);
  CHECK(again.adaptation_residual == report.adaptation_residual);

  const auto constant = constant_adapted_pair(op, cx(0.3, -0.2));
  const auto rc = theta_adapted_residuals(constant.x, constant.theta, constant.y, op, g, 0.5, 1e-4);
  CHECK(rc.data_residual < 1e-12);
  CHECK(rc.adaptation_residual < 1e-12);
  CHECK(rc.objective.total() < 1e-20);
}

TEST_CASE("zero image leaves the whole data as residual", "[analysis]") {
  const Dims d{8, 8, 2};
  const CartesianOperator op(d, random_masks(d, 0.5, 1));
  const PatchGeometry g(d, {4, 4, 2}, {4, 4, 2});
  const auto y = op.forward(testing::random_volume(d, 2));
  const auto r = theta_adapted_residuals(ComplexVolume(d), net::NetworkParams(net::Mode::complex, 2), y, op, g, 1.0, 0.0);
  CHECK(r.data_residual == Approx(norm(y.samples)).epsilon(1e-14));
  CHECK(r.objective.data == Approx(0.5 * squared_norm(y.samples)).epsilon(1e-14));
}

TEST_CASE("one frozen ALONE iteration does not move an adapted pair", "[analysis]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(6, 16, 4));
  const auto identity = identity_adapted_pair(op, make_phantom(PhantomSpec::standard(d)));
  CHECK(fixed_point_movement(identity, op, frozen_config(identity.theta)) < 1e-8);
  const auto constant = constant_adapted_pair(op, cx(0.7, 0.1));
  auto cfg = frozen_config(constant.theta);
  cfg.normalize_patches = false;
  CHECK(fixed_point_movement(constant, op, cfg) < 1e-8);
}

TEST_CASE("partial minimizer probes", "[analysis]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(6, 16, 4));
  const PatchGeometry g(d, {8, 8, 2}, {4, 4, 1});

  SECTION("constant pair passes all probes") {
    const auto pair = constant_adapted_pair(op, cx(0.7, 0.1));
    const auto r = partial_minimizer_check(pair.x, pair.theta, pair.y, op, g, 0.5, 1e-4, 100, 1e-2, 3);
    CHECK(r.pass());
    CHECK(r.x_probes.probes == 100);
    CHECK(r.theta_probes.probes == 100);
  }
  SECTION("radius zero passes trivially") {
    const auto pair = identity_adapted_pair(op, make_phantom(PhantomSpec::standard(d)));
    CHECK(partial_minimizer_check(pair.x, pair.theta, pair.y, op, g, 0.5, 1e-4, 10, 0.0, 4).pass());
  }
  SECTION("identity pair is an x-minimizer but not a theta-minimizer") {
    // Shrinking the kernels and growing the combination weights keeps f but
    // lowers R, so some theta directions must lower J.
    const auto pair = identity_adapted_pair(op, make_phantom(PhantomSpec::standard(d)));
    const auto r = partial_minimizer_check(pair.x, pair.theta, pair.y, op, g, 0.5, 1e-2, 100, 1e-2, 5);
    CHECK(r.x_probes.pass());
    auto scaled = pair.theta;
    for (double& k : scaled.kernels()) k *= 0.9;
    for (double& w : scaled.combination()) w /= 0.9;
    const double base = objective(pair.x, pair.theta, pair.y, op, g, 0.5, 1e-2).total();
    CHECK(objective(pair.x, scaled, pair.y, op, g, 0.5, 1e-2).total() < base);
  }
  SECTION("an offset pair fails with a negative margin") {
    const auto pair = constant_adapted_pair(op, cx(0.7, 0.1));
    auto shifted = pair.x;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += testing::random_volume(d, 6)[i];
    const auto r = partial_minimizer_check(shifted, pair.theta, pair.y, op, g, 0.5, 1e-4, 20, 1e-3, 7);
    CHECK_FALSE(r.pass());
    CHECK(r.x_probes.worst_margin < 0.0);
  }
}

TEST_CASE("stability experiment bookkeeping", "[analysis]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(6, 16, 4));
  const auto y = op.forward(make_phantom(PhantomSpec::standard(d)));
  AloneConfig cfg;
  cfg.patch = {8, 8, 2};
  cfg.stride = {4, 4, 1};
  cfg.filters = 4;
  cfg.train.n_backprops = 10;
  cfg.max_iterations = 2;

  const std::vector<double> zero_levels{0.0};
  const auto z = stability_experiment(y, op, cfg, zero_levels, 1);
  REQUIRE(z.rows.size() == 1);
  CHECK(z.rows[0].distance == 0.0);
  CHECK(z.pass());

  const std::vector<double> levels{1e-1, 1e-2, 1e-3};
  const auto r = stability_experiment(y, op, cfg, levels, 2);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].noise_norm == Approx(0.1 * norm(y.samples)).epsilon(1e-12));
  for (const auto& row : r.rows) CHECK(row.distance >= 0.0);

  const std::vector<double> rising{1e-3, 1e-2};
  CHECK_THROWS(stability_experiment(y, op, cfg, rising, 2));
}
