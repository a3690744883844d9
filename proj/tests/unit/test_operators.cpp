#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "alone/normal_system.hpp"
#include "alone/operators.hpp"
#include "alone/reference/encoding.hpp"
#include "alone/trajectory.hpp"
#include "support/probes.hpp"

using namespace alone;
using Catch::Approx;

namespace {

double adjoint_defect(const EncodingOperator& op, std::uint64_t seed) {
  const auto x = testing::random_volume(op.image_dims(), seed);
  const auto y = testing::random_kspace(op.descriptor(), seed + 1000);
  const auto ax = op.forward(x);
  const auto ahy = op.adjoint(y);
  const cx lhs = inner_product(ax.samples, y.samples);
  const cx rhs = inner_product(x, ahy);
  return std::abs(lhs - rhs) / (norm(ax.samples) * norm(y.samples));
}

}  // namespace

TEST_CASE("golden angle spokes", "[operators]") {
  CHECK(spoke_angle(0) == 0.0);
  const double phi = std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(spoke_angle(1) == Approx(phi).epsilon(1e-14));
  CHECK(spoke_angle(1) == Approx(1.94161).margin(1e-5));
  CHECK(spoke_angle(2) == Approx(std::fmod(2.0 * phi, std::numbers::pi)).epsilon(1e-14));

  const auto traj = RadialTrajectory::golden_angle(5, 16, 3);
  for (std::size_t f = 0; f < traj.nt(); ++f) {
    const auto pts = traj.frame_points(f);
    for (std::size_t s = 0; s < traj.spokes_in_frame(f); ++s) {
      const KPoint& centre = pts[s * 16 + 8];
      CHECK(centre.kx == 0.0);
      CHECK(centre.ky == 0.0);
    }
  }
}

TEST_CASE("spoke bookkeeping for acceleration", "[operators]") {
  CHECK(nyquist_spokes(64) == 101);
  CHECK(spokes_for_acceleration(64, 9.0) == 11);
  const double ratio = static_cast<double>(spokes_for_acceleration(64, 9.0)) / nyquist_spokes(64);
  CHECK(std::abs(ratio * 9.0 - 1.0) < 0.05);
  const auto traj = RadialTrajectory::golden_angle_total(23, 8, 4);
  CHECK(traj.total_spokes() == 23);
  CHECK(traj.spokes_in_frame(0) == 6);
  CHECK(traj.spokes_in_frame(3) == 5);
  CHECK(traj.first_spoke(1) == 6);
}

TEST_CASE("zero image maps to zero data", "[operators]") {
  const Dims d{8, 8, 2};
  const RadialOperator radial(d, RadialTrajectory::golden_angle(3, 8, 2));
  const auto y = radial.forward(ComplexVolume(d));
  for (const cx& v : y.samples) CHECK(v == cx{});
  const auto x = radial.adjoint({radial.descriptor(), std::vector<cx>(radial.descriptor().n_samples)});
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == cx{});
}

TEST_CASE("delta at origin has a flat spectrum", "[operators]") {
  const Dims d{8, 4, 2};
  const CartesianOperator op(d, full_masks(d));
  ComplexVolume x(d);
  x(0, 0, 0) = 1.0;
  x(0, 0, 1) = 1.0;
  const auto y = op.forward(x);
  REQUIRE(y.samples.size() == d.size());
  for (const cx& v : y.samples) CHECK(std::abs(v) == Approx(1.0 / std::sqrt(32.0)).epsilon(1e-12));
}

TEST_CASE("Cartesian operator matches the direct DFT", "[operators]") {
  const Dims d{6, 4, 2};
  const auto masks = random_masks(d, 0.5, 4);
  const auto coils = CoilMaps::synthetic(d.nx, d.ny, 3);
  const CartesianOperator op(d, masks, coils);
  const auto x = testing::random_volume(d, 5);
  const auto fast = op.forward(x);
  const auto direct = ref::cartesian_forward(d, masks, coils, x);
  REQUIRE(fast.samples.size() == direct.samples.size());
  double err = 0.0;
  for (std::size_t i = 0; i < fast.samples.size(); ++i) err = std::max(err, std::abs(fast.samples[i] - direct.samples[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("radial operator matches the direct NDFT", "[operators]") {
  const Dims d{8, 6, 3};
  const RadialTrajectory traj = RadialTrajectory::golden_angle(4, 10, 3);
  const auto coils = CoilMaps::synthetic(d.nx, d.ny, 2);
  const RadialOperator op(d, traj, coils);
  const auto x = testing::random_volume(d, 6);
  const auto fast = op.forward(x);
  const auto direct = ref::radial_forward(d, traj, coils, x);
  REQUIRE(fast.samples.size() == direct.samples.size());
  for (std::size_t i = 0; i < fast.samples.size(); ++i) REQUIRE(std::abs(fast.samples[i] - direct.samples[i]) < 1e-11);
  const auto y = testing::random_kspace(op.descriptor(), 7);
  const auto back = op.adjoint(y);
  const auto back_ref = ref::radial_adjoint(d, traj, coils, y);
  CHECK(testing::relative_difference(back, back_ref) < 1e-12);
}

TEST_CASE("adjointness over seeded probes", "[operators]") {
  const Dims d{12, 10, 3};
  const CartesianOperator cart(d, random_masks(d, 0.4, 11));
  const RadialOperator radial(d, RadialTrajectory::golden_angle(5, 12, 3));
  const CartesianOperator cart_coils(d, random_masks(d, 0.4, 12), CoilMaps::synthetic(d.nx, d.ny, 4));
  const RadialOperator radial_coils(d, RadialTrajectory::golden_angle(5, 12, 3), CoilMaps::synthetic(d.nx, d.ny, 4));
  for (std::uint64_t s = 0; s < 20; ++s) {
    REQUIRE(adjoint_defect(cart, s) < 1e-10);
    REQUIRE(adjoint_defect(radial, s) < 1e-10);
    REQUIRE(adjoint_defect(cart_coils, s) < 1e-10);
    REQUIRE(adjoint_defect(radial_coils, s) < 1e-10);
  }
}

TEST_CASE("full single-coil Cartesian sampling is an isometry", "[operators]") {
  const Dims d{16, 8, 3};
  const CartesianOperator op(d, full_masks(d));
  const auto x = testing::random_volume(d, 21);
  CHECK(testing::relative_difference(op.adjoint(op.forward(x)), x) < 1e-10);
  CHECK(testing::relative_difference(op.normal(x), x) < 1e-10);
  CHECK(norm(op.forward(x).samples) == Approx(norm(x)).epsilon(1e-12));
  CHECK(testing::relative_difference(op.ifft(op.fft(x)), x) < 1e-12);
}

TEST_CASE("normalized synthetic coils keep full sampling isometric", "[operators]") {
  const Dims d{8, 8, 2};
  const CartesianOperator op(d, full_masks(d), CoilMaps::synthetic(d.nx, d.ny, 4));
  const auto x = testing::random_volume(d, 22);
  CHECK(testing::relative_difference(op.normal(x), x) < 1e-10);
}

TEST_CASE("radial Toeplitz normal matches the direct route", "[operators]") {
  const Dims d{16, 12, 3};
  const RadialOperator op(d, RadialTrajectory::golden_angle(7, 16, 3), CoilMaps::synthetic(d.nx, d.ny, 2));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = testing::random_volume(d, 30 + s);
    REQUIRE(testing::relative_difference(op.normal(x), op.normal_direct(x)) < 1e-10);
  }
}

TEST_CASE("radial normal operator is Hermitian positive semidefinite", "[operators]") {
  const Dims d{16, 16, 2};
  const RadialOperator op(d, RadialTrajectory::golden_angle(3, 16, 2));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = testing::random_volume(d, 40 + s);
    const cx q = inner_product(op.normal(x), x);
    CHECK(std::abs(q.imag()) < 1e-10 * std::abs(q));
    CHECK(q.real() >= 0.0);
  }
}

TEST_CASE("normal system of the patch problem", "[operators]") {
  const Dims d{8, 8, 4};
  const CartesianOperator full(d, full_masks(d));
  const auto x = testing::random_volume(d, 50);

  SECTION("zero weight reduces to the data term") {
    const PatchGeometry g(d, {4, 4, 2}, {2, 2, 1});
    CHECK(testing::relative_difference(apply_normal_system(full, g, 0.0, x), full.normal(x)) < 1e-14);
  }
  SECTION("non-overlapping tiling scales by one plus lambda") {
    const PatchGeometry g(d, {4, 4, 2}, {4, 4, 2});
    const auto hx = NormalSystem(full, g, 0.3).apply(x);
    CHECK(testing::relative_difference(hx, cx(1.3, 0.0) * x) < 1e-12);
  }
  SECTION("overlapping patches agree with a brute-force sum") {
    const PatchGeometry g(d, {4, 4, 2}, {2, 2, 1});
    ComplexVolume brute = full.normal(x);
    std::vector<cx> buf(g.patch_size());
    ComplexVolume patch_term(d);
    for (std::size_t j = 0; j < g.count(); ++j) {
      extract_patch(x, g, j, buf);
      add_patch_adjoint(buf, g, j, patch_term);
    }
    brute += cx(0.7, 0.0) * patch_term;
    CHECK(testing::relative_difference(NormalSystem(full, g, 0.7).apply(x), brute) < 1e-12);
  }
  SECTION("Hermitian on probes") {
    const RadialOperator radial(d, RadialTrajectory::golden_angle(3, 8, 4));
    const PatchGeometry g(d, {4, 4, 2}, {2, 2, 1});
    const NormalSystem h(radial, g, 0.5);
    const auto u = testing::random_volume(d, 51);
    const auto v = testing::random_volume(d, 52);
    const cx a = inner_product(h(u), v);
    const cx b = inner_product(u, h(v));
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
  }
}
