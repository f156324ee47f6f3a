#include <doctest.h>

#include "gravreg/geometry.hpp"
#include "gravreg/rng.hpp"
#include "oracles.hpp"

using namespace gravreg;

TEST_CASE("rotation_minimal_geodesic identity and quarter turn") {
  const Mat3 id = rotation_minimal_geodesic(Vec3(0, 0, 1), Vec3(0, 0, 1));
  CHECK((id - Mat3::Identity()).norm() < 1e-12);

  const Mat3 r = rotation_minimal_geodesic(Vec3(1, 0, 0), Vec3(0, 1, 0));
  const Mat3 rz = rotation_about_axis(Vec3(0, 0, 1), kPi / 2.0);
  CHECK((r - rz).norm() < 1e-12);
}

TEST_CASE("rotation_minimal_geodesic random pairs") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 a = oracles::random_unit(rng);
    const Vec3 b = oracles::random_unit(rng);
    if (a.dot(b) < -1.0 + 1e-6) continue;
    const Mat3 r = rotation_minimal_geodesic(a, b);
    CHECK((r * a - b).norm() < 1e-9);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-9);
    CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-9);
    // rotation angle equals the geodesic angle
    const double angle =
        std::acos(std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0));
    CHECK(angle == doctest::Approx(std::acos(std::clamp(a.dot(b), -1.0, 1.0)))
                       .epsilon(1e-9));
    // axis perpendicular to both: R leaves a x b fixed
    const Vec3 w = a.cross(b);
    if (w.norm() > 1e-6) {
      CHECK((r * w - w).norm() < 1e-9 * std::max(1.0, w.norm()));
    }
  }
}

TEST_CASE("rotation_minimal_geodesic antipodal throws") {
  CHECK_THROWS_AS(rotation_minimal_geodesic(Vec3(0, 0, 1), Vec3(0, 0, -1)),
                  AntipodalInput);
}

TEST_CASE("rotation_between_resolved handles antipodal input") {
  const Mat3 r = rotation_between_resolved(Vec3(0, 0, -1), Vec3(0, 0, 1));
  CHECK((r * Vec3(0, 0, -1) - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK(std::abs(r.determinant() - 1.0) < 1e-9);

  // near-antipodal still maps a exactly onto b
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a = oracles::random_unit(rng);
    const Vec3 b = (-a + 1e-6 * oracles::random_unit(rng)).normalized();
    const Mat3 m = rotation_between_resolved(a, b);
    CHECK((m * a - b).norm() < 1e-9);
  }
}

TEST_CASE("rotation_about_axis basics") {
  const Mat3 r = rotation_about_axis(Vec3(0, 0, 1), kPi / 2.0);
  CHECK((r * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK((rotation_about_axis(Vec3(0, 0, 1), 0.0) - Mat3::Identity()).norm() <
        1e-15);
  const Mat3 half = rotation_about_axis(Vec3(0, 0, 1), kPi);
  CHECK((half * Vec3(1, 0, 0) - Vec3(-1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("rotation_about_axis same-axis composition") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 axis = oracles::random_unit(rng);
    const double t1 = rng.uniform(-kPi, kPi);
    const double t2 = rng.uniform(-kPi, kPi);
    const Mat3 lhs =
        rotation_about_axis(axis, t1) * rotation_about_axis(axis, t2);
    const Mat3 rhs = rotation_about_axis(axis, t1 + t2);
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("screw_decompose examples") {
  RigidTransform id;
  const ScrewParts p0 = screw_decompose(id, Vec3(0, 0, 1), Vec3(1, 2, 3));
  CHECK((p0.screw_image - Vec3(1, 2, 3)).norm() < 1e-15);
  CHECK(p0.t_parallel.norm() < 1e-15);

  RigidTransform lift;
  lift.translation = Vec3(0, 0, 3);
  const ScrewParts p1 = screw_decompose(lift, Vec3(0, 0, 1), Vec3(1, 1, 0));
  CHECK((p1.screw_image - Vec3(1, 1, 0)).norm() < 1e-15);
  CHECK((p1.t_parallel - Vec3(0, 0, 3)).norm() < 1e-15);
}

TEST_CASE("screw_decompose recomposition and perpendicularity") {
  Rng rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec3 axis = oracles::random_unit(rng);
    RigidTransform t;
    t.rotation = rotation_about_axis(axis, rng.uniform(-kPi, kPi));
    t.translation =
        Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const ScrewParts parts = screw_decompose(t, axis, p);
    CHECK((parts.screw_image + parts.t_parallel - t.apply(p)).norm() < 1e-10);
    CHECK(std::abs(axis.dot(parts.screw_image - p)) < 1e-10);
  }
}

TEST_CASE("exp_map examples") {
  CHECK((exp_map(Vec2(0, 0)) - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((exp_map(Vec2(kPi / 2.0, 0)) - Vec3(1, 0, 0)).norm() < 1e-12);
  const double s2 = std::sqrt(2.0) / 2.0;
  CHECK((exp_map(Vec2(kPi / 4.0, 0)) - Vec3(s2, 0, s2)).norm() < 1e-12);
}

TEST_CASE("exp_map clamps outside the disk and stays on the hemisphere") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 phi(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5));
    const Vec3 h = exp_map(phi);
    CHECK(std::abs(h.norm() - 1.0) < 1e-9);
    CHECK(h.z() >= -1e-12);
  }
}

TEST_CASE("exp_map is injective on the open disk") {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 a(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec2 b(rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (a.norm() >= kPi / 2.0 - 1e-6 || b.norm() >= kPi / 2.0 - 1e-6) continue;
    if ((a - b).norm() < 1e-9) continue;
    CHECK((exp_map(a) - exp_map(b)).norm() > 1e-12);
  }
}

TEST_CASE("orthonormalized projects back onto rotations") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Mat3 noisy =
        rotation_about_axis(oracles::random_unit(rng), rng.uniform(-kPi, kPi));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) noisy(i, j) += 1e-4 * rng.uniform(-1, 1);
    }
    const Mat3 r = orthonormalized(noisy);
    CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-12);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
  }
}
