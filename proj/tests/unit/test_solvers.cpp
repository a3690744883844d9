#include <catch_amalgamated.hpp>

#include <random>

#include "alone/alone.hpp"
#include "alone/error.hpp"
#include "alone/pcg.hpp"
#include "support/probes.hpp"

using namespace alone;
using Catch::Approx;

namespace {

LinearMap diagonal_map(std::vector<double> diag) {
  return [diag = std::move(diag)](const ComplexVolume& x) {
    ComplexVolume y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= diag[i];
    return y;
  };
}

// Dense Hermitian positive definite map B^H B + shift I on a small volume.
LinearMap dense_spd_map(const Dims& d, double shift, std::uint64_t seed) {
  const std::size_t n = d.size();
  const auto b = testing::random_vector(n * n, seed);
  std::vector<cx> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cx acc = i == j ? cx(shift, 0.0) : cx{};
      for (std::size_t k = 0; k < n; ++k) acc += std::conj(b[k * n + i]) * b[k * n + j];
      h[i * n + j] = acc;
    }
  return [h = std::move(h), n, d](const ComplexVolume& x) {
    ComplexVolume y(d);
    for (std::size_t i = 0; i < n; ++i) {
      cx acc{};
      for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * x[j];
      y[i] = acc;
    }
    return y;
  };
}

PatchSet random_patches(const PatchGeometry& g, std::uint64_t seed) {
  PatchSet z(g);
  const auto v = testing::random_vector(z.data().size(), seed);
  std::copy(v.begin(), v.end(), z.data().begin());
  return z;
}

AloneConfig small_config() {
  AloneConfig cfg;
  cfg.patch = {8, 8, 2};
  cfg.stride = {4, 4, 1};
  cfg.filters = 4;
  cfg.train.n_backprops = 20;
  cfg.train.batch_size = 16;
  cfg.max_iterations = 2;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("CG on the identity converges in one step", "[solvers]") {
  const auto c = testing::random_volume({4, 3, 2}, 1);
  PcgOptions opt;
  opt.max_iterations = 10;
  opt.tolerance = 1e-14;
  const auto r = pcg_solve([](const ComplexVolume& x) { return x; }, c, ComplexVolume(c.dims()), opt);
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK(testing::relative_difference(r.x, c) < 1e-15);
}

TEST_CASE("CG is exact after n steps for n distinct eigenvalues", "[solvers]") {
  const Dims d{4, 1, 1};
  const ComplexVolume c(d, cx(1.0, 0.0));
  PcgOptions opt;
  opt.max_iterations = 4;
  const auto r = pcg_solve(diagonal_map({1.0, 2.0, 4.0, 8.0}), c, ComplexVolume(d), opt);
  const std::vector<double> expected{1.0, 0.5, 0.25, 0.125};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r.x[i] - expected[i]) < 1e-12);
  CHECK(r.residual_history.size() == 5);
}

TEST_CASE("CG decreases the quadratic energy and the error norm on SPD probes", "[solvers]") {
  const Dims d{6, 1, 1};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const LinearMap h = dense_spd_map(d, 0.1, 100 + s);
    const auto c = testing::random_volume(d, 200 + s);
    PcgOptions exact;
    exact.max_iterations = 60;
    exact.tolerance = 1e-14;
    const auto solution = pcg_solve(h, c, ComplexVolume(d), exact).x;
    ComplexVolume x(d);
    double energy = quadratic_energy(h, c, x);
    double error = norm(x - solution);
    for (std::size_t it = 1; it <= 6; ++it) {
      PcgOptions opt;
      opt.max_iterations = it;
      x = pcg_solve(h, c, ComplexVolume(d), opt).x;
      const double e = quadratic_energy(h, c, x);
      const double err = norm(x - solution);
      REQUIRE(e <= energy + 1e-12 * std::abs(energy));
      REQUIRE(err <= error * (1.0 + 1e-12));
      energy = e;
      error = err;
    }
  }
}

TEST_CASE("CG residual norm on SPD probes", "[solvers]") {
  // Tracked, not asserted: the Euclidean residual of CG is not monotone in
  // general. Diagonal probe diag(1, 10, 100) from ones rises after step 1.
  const Dims d{3, 1, 1};
  PcgOptions opt;
  opt.max_iterations = 3;
  const auto r = pcg_solve(diagonal_map({1.0, 10.0, 100.0}), ComplexVolume(d, 1.0), ComplexVolume(d), opt);
  REQUIRE(r.residual_history.size() == 4);
  CHECK(r.residual_history[3] < 1e-10 * r.residual_history[0]);
  bool rises = false;
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) rises |= r.residual_history[i] > r.residual_history[i - 1];
  CHECK(rises);
}

TEST_CASE("CG rejects indefinite maps and non-finite data", "[solvers]") {
  const Dims d{2, 1, 1};
  PcgOptions opt;
  CHECK_THROWS_AS(pcg_solve(diagonal_map({1.0, -1.0}), ComplexVolume(d, 1.0), ComplexVolume(d), opt), DivergenceError);
  ComplexVolume bad(d, 1.0);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pcg_solve(diagonal_map({1.0, 2.0}), bad, ComplexVolume(d), opt), DivergenceError);
}

TEST_CASE("zero right-hand side returns the zero start", "[solvers]") {
  const Dims d{3, 2, 1};
  const auto r = pcg_solve(diagonal_map({1, 2, 3, 4, 5, 6}), ComplexVolume(d), ComplexVolume(d), {});
  CHECK(norm(r.x) == 0.0);
}

TEST_CASE("closed form matches converged PCG on an isometry instance", "[solvers]") {
  const Dims d{16, 16, 4};
  const CartesianOperator op(d, random_masks(d, 0.5, 3));
  const PatchGeometry g(d, {8, 8, 2}, {8, 8, 2});
  const auto x_true = testing::random_volume(d, 4);
  const auto y = op.forward(x_true);
  const auto z = random_patches(g, 5);
  const double lambda = 0.7;

  const auto closed = closed_form_isometry(op, y, z, lambda);
  const NormalSystem system(op, g, lambda);
  const auto rhs = right_hand_side(op.adjoint(y), z, lambda);
  const auto pcg = solve_x_update(system, rhs, ComplexVolume(d), 50, 1e-12);
  double worst = 0.0;
  const double scale = norm(pcg.x) / std::sqrt(static_cast<double>(pcg.x.size()));
  for (std::size_t i = 0; i < closed.size(); ++i) worst = std::max(worst, std::abs(closed[i] - pcg.x[i]));
  CHECK(worst / scale < 1e-6);
  CHECK(testing::relative_difference(closed, pcg.x) < 1e-6);
}

TEST_CASE("closed form limits", "[solvers]") {
  const Dims d{8, 8, 2};
  const CartesianOperator op(d, random_masks(d, 0.5, 6));
  const PatchGeometry g(d, {4, 4, 2}, {4, 4, 2});
  const auto z = random_patches(g, 7);
  const auto y = op.forward(testing::random_volume(d, 8));

  SECTION("dominant regularizer returns the reassembled patches") {
    const auto x = closed_form_isometry(op, y, z, 1e12);
    CHECK(testing::relative_difference(x, reassemble_sum(z)) < 1e-10);
  }
  SECTION("consensus between data and patches is kept") {
    const auto zbar = reassemble_sum(z);
    const auto x = closed_form_isometry(op, op.forward(zbar), z, 1.0);
    CHECK(testing::relative_difference(x, zbar) < 1e-12);
  }
  SECTION("preconditions") {
    const CartesianOperator coils(d, full_masks(d), CoilMaps::synthetic(d.nx, d.ny, 2));
    CHECK_THROWS_AS(closed_form_isometry(coils, coils.forward(ComplexVolume(d, 1.0)), z, 1.0), PreconditionError);
    const PatchGeometry overlap(d, {4, 4, 2}, {2, 2, 1});
    CHECK_THROWS_AS(closed_form_isometry(op, y, PatchSet(overlap), 1.0), PreconditionError);
    CHECK_THROWS_AS(closed_form_isometry(op, y, z, 0.0), PreconditionError);
  }
}

TEST_CASE("ALONE recovers a fully sampled image", "[solvers]") {
  const Dims d{16, 16, 4};
  const CartesianOperator op(d, full_masks(d));
  const auto x_gt = testing::random_volume(d, 10);
  auto cfg = small_config();
  cfg.lambda = 1e-6;
  const auto result = alone_reconstruct(op.forward(x_gt), op, cfg);
  REQUIRE(result.trace.records.size() == 2);
  CHECK(testing::relative_difference(result.x, x_gt) < 1e-3);
  CHECK(result.x.all_finite());
}

TEST_CASE("ALONE stopping rule", "[solvers]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(6, 16, 4));
  const auto y = op.forward(testing::random_volume(d, 11));

  SECTION("huge epsilon stops after one iteration") {
    auto cfg = small_config();
    cfg.max_iterations = 5;
    cfg.epsilon = std::numeric_limits<double>::infinity();
    const auto r = alone_reconstruct(y, op, cfg);
    CHECK(r.trace.records.size() == 1);
    CHECK(r.trace.status == TraceStatus::converged);
  }
  SECTION("T iterations give T records") {
    auto cfg = small_config();
    cfg.max_iterations = 3;
    const auto r = alone_reconstruct(y, op, cfg);
    REQUIRE(r.trace.records.size() == 3);
    CHECK(r.trace.status == TraceStatus::completed);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(r.trace.records[k].iteration == k + 1);
      CHECK(r.trace.records[k].relative_change >= 0.0);
      CHECK(r.trace.records[k].t_train_s >= 0.0);
      CHECK(r.trace.records[k].train_loss >= 0.0);
    }
    CHECK(r.network.has_value());
  }
  SECTION("zero data is reported as degenerate") {
    const KSpaceData zero{op.descriptor(), std::vector<cx>(op.descriptor().n_samples)};
    const auto r = alone_reconstruct(zero, op, small_config());
    CHECK(r.trace.status == TraceStatus::degenerate);
    CHECK(r.trace.records.empty());
  }
}

TEST_CASE("ALONE is deterministic for a fixed seed", "[solvers]") {
  const Dims d{16, 16, 4};
  const RadialOperator op(d, RadialTrajectory::golden_angle(6, 16, 4));
  const auto y = op.forward(testing::random_volume(d, 12));
  const auto cfg = small_config();
  const auto a = alone_reconstruct(y, op, cfg);
  const auto b = alone_reconstruct(y, op, cfg);
  CHECK(a.x == b.x);
  CHECK(*a.network == *b.network);
  auto other = cfg;
  other.seed = 8;
  CHECK_FALSE(alone_reconstruct(y, op, other).x == a.x);
}

TEST_CASE("ALONE configuration checks", "[solvers]") {
  auto cfg = small_config();
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small_config();
  cfg.train_network = false;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.initial_network = net::NetworkParams(net::Mode::real, 2);
  cfg.mode = net::Mode::real;
  CHECK_NOTHROW(validate(cfg));
  cfg.mode = net::Mode::complex;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
