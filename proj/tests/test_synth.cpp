#include <doctest.h>

#include "gravreg/geometry.hpp"
#include "gravreg/pipeline.hpp"
#include "gravreg/synth.hpp"
#include "gravreg/spcr.hpp"
#include "oracles.hpp"

using namespace gravreg;

TEST_CASE("generate honors the outlier budget") {
  SynthConfig cfg;
  cfg.n = 2000;
  cfg.eta = 0.95;
  cfg.sigma = 0.005;
  cfg.seed = 71;
  const SynthInstance inst = generate(cfg);
  std::size_t inliers = 0;
  for (bool b : inst.inlier_label) inliers += b ? 1 : 0;
  CHECK(inliers == 100);
  CHECK(inst.correspondences.size() == 2000);
}

TEST_CASE("generate is reproducible from the seed") {
  SynthConfig cfg;
  cfg.n = 64;
  cfg.eta = 0.5;
  cfg.sigma = 0.01;
  cfg.seed = 72;
  const SynthInstance a = generate(cfg);
  const SynthInstance b = generate(cfg);
  REQUIRE(a.correspondences.size() == b.correspondences.size());
  for (std::size_t i = 0; i < a.correspondences.size(); ++i) {
    CHECK(a.correspondences.pairs[i].p == b.correspondences.pairs[i].p);
    CHECK(a.correspondences.pairs[i].q == b.correspondences.pairs[i].q);
  }
  CHECK(a.truth.rotation == b.truth.rotation);
  CHECK(a.truth.translation == b.truth.translation);

  cfg.seed = 73;
  const SynthInstance c = generate(cfg);
  CHECK(a.correspondences.pairs[0].p != c.correspondences.pairs[0].p);
}

TEST_CASE("generate inliers satisfy the ground truth") {
  SynthConfig cfg;
  cfg.n = 500;
  cfg.eta = 0.6;
  cfg.sigma = 0.0;
  cfg.seed = 74;
  const SynthInstance inst = generate(cfg);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto& pair = inst.correspondences.pairs[i];
    const double r = (inst.truth.apply(pair.p) - pair.q).norm();
    if (inst.inlier_label[i]) {
      CHECK(r < 1e-12);
    } else {
      CHECK(r > 1e-6);  // replaced by a random point
    }
  }
  // gravity constraint of the generated truth
  const GravityPair& g = inst.correspondences.gravity;
  CHECK((inst.truth.rotation * g.v_p - g.v_q).norm() < 1e-12);
}

TEST_CASE("generate SPCR mode honors the overlap rate") {
  SynthConfig cfg;
  cfg.mode = SynthMode::kSpcr;
  cfg.m = 234;
  cfg.rho = 0.4;
  cfg.sigma = 0.001;
  cfg.seed = 75;
  const SynthInstance inst = generate(cfg);
  CHECK(inst.clouds.source.size() == 234);
  CHECK(inst.clouds.target.size() ==
        static_cast<std::size_t>(std::ceil(0.4 * 234)));
  std::size_t survivors = 0;
  for (bool b : inst.inlier_label) survivors += b ? 1 : 0;
  CHECK(survivors == inst.clouds.target.size());
}

TEST_CASE("noise-free pipeline recovers nearly all labeled inliers") {
  SynthConfig cfg;
  cfg.n = 800;
  cfg.eta = 0.4;
  cfg.sigma = 0.0;
  cfg.seed = 76;
  const SynthInstance inst = generate(cfg);
  const RegistrationResult res =
      solve_register(inst.correspondences, config_for_sigma(0.0));
  std::size_t labeled = 0;
  for (bool b : inst.inlier_label) labeled += b ? 1 : 0;
  std::size_t recovered = 0;
  for (std::size_t i : res.inliers_stage3) {
    if (inst.inlier_label[i]) ++recovered;
  }
  CHECK(recovered * 100 >= labeled * 99);
}

TEST_CASE("evaluate scores stages against the labels") {
  SynthConfig cfg;
  cfg.n = 600;
  cfg.eta = 0.7;
  cfg.sigma = 0.0;
  cfg.seed = 80;
  const SynthInstance inst = generate(cfg);
  const RegistrationResult res =
      solve_register(inst.correspondences, config_for_sigma(0.0));
  const EvalReport report = evaluate(inst, res, 1.0, 0.01);
  CHECK(report.success);
  CHECK(report.re_deg < 1e-6);
  for (int s = 0; s < 3; ++s) {
    CHECK(report.recall[s] >= 0.99);
    CHECK(report.precision[s] > 0.0);
    CHECK(report.precision[s] <= 1.0);
  }
  // later stages only get cleaner
  CHECK(report.precision[2] >= report.precision[0]);
}

TEST_CASE("evaluate scores SPCR candidates by source point") {
  SynthConfig cfg;
  cfg.mode = SynthMode::kSpcr;
  cfg.m = 150;
  cfg.rho = 0.6;
  cfg.sigma = 0.001;
  cfg.seed = 81;
  const SynthInstance inst = generate(cfg);
  SpcrConfig scfg;
  scfg.reg = config_for_sigma(cfg.sigma);
  const RegistrationResult res = solve_spcr(inst.clouds, scfg);
  const EvalReport report = evaluate(inst, res, 2.0, 0.05);
  CHECK(report.success);
  CHECK(report.recall[2] >= 0.8);
  CHECK(report.precision[2] >= 0.8);
}

TEST_CASE("pipeline tolerates a mildly noisy gravity prior") {
  SynthConfig cfg;
  cfg.n = 1000;
  cfg.eta = 0.5;
  cfg.sigma = 0.005;
  cfg.seed = 82;
  cfg.gravity_noise_deg = 0.3;
  const SynthInstance inst = generate(cfg);
  const RegistrationResult res =
      solve_register(inst.correspondences, config_for_sigma(cfg.sigma));
  // the perturbed prior bounds the attainable accuracy; just require a
  // sane registration, not the clean-prior tolerances
  CHECK(rotation_error_deg(inst.truth.rotation, res.transform.rotation) < 2.0);
  CHECK(translation_error(inst.truth.translation, res.transform.translation) <
        0.05);
}

TEST_CASE("rotation_error basics") {
  Rng rng(77);
  const Mat3 r = rotation_about_axis(oracles::random_unit(rng), 1.234);
  CHECK(rotation_error_deg(r, r) == doctest::Approx(0.0));
  const Mat3 q = r * rotation_about_axis(Vec3(1, 0, 0), kPi / 2.0);
  CHECK(rotation_error_deg(r, q) == doctest::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("rotation_error matches the quaternion geodesic oracle") {
  Rng rng(78);
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat3 r1 =
        rotation_about_axis(oracles::random_unit(rng), rng.uniform(-kPi, kPi));
    const Mat3 r2 =
        rotation_about_axis(oracles::random_unit(rng), rng.uniform(-kPi, kPi));
    const double re = rotation_error_deg(r1, r2);
    CHECK(re == doctest::Approx(oracles::quat_geodesic_deg(r1, r2))
                    .epsilon(1e-9));
    CHECK(re >= 0.0);
    CHECK(re <= 180.0);
    // symmetry
    CHECK(re == doctest::Approx(rotation_error_deg(r2, r1)).epsilon(1e-12));
  }
}

TEST_CASE("translation_error basics") {
  CHECK(translation_error(Vec3(1, 2, 3), Vec3(1, 2, 3)) == 0.0);
  CHECK(translation_error(Vec3(0, 0, 0), Vec3(1, 0, 0)) == doctest::Approx(1.0));
  Rng rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 b(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(translation_error(a, b) == doctest::Approx((a - b).norm()));
  }
}

TEST_CASE("gravity_noise_perturb zero std is the identity") {
  GravityPair g;
  g.v_p = Vec3(0, 0, -1);
  g.v_q = Vec3(0.6, 0, -0.8);
  const GravityPair out = gravity_noise_perturb(g, 0.0, 99);
  CHECK(out.v_p == g.v_p);
  CHECK(out.v_q == g.v_q);
}

TEST_CASE("gravity_noise_perturb keeps unit norm and half-normal deviation") {
  GravityPair g;  // defaults (0,0,-1)
  double sum_dev_deg = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const GravityPair out = gravity_noise_perturb(g, 1.0, 1000 + i);
    CHECK(std::abs(out.v_p.norm() - 1.0) < 1e-12);
    CHECK(std::abs(out.v_q.norm() - 1.0) < 1e-12);
    sum_dev_deg +=
        std::acos(std::clamp(out.v_p.dot(g.v_p), -1.0, 1.0)) * 180.0 / kPi;
  }
  // half-normal mean = std * sqrt(2/pi) = 0.7979 degrees
  CHECK(sum_dev_deg / n == doctest::Approx(0.798).epsilon(0.05));
}
