#include "gravreg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "gravreg/geometry.hpp"
#include "gravreg/rng.hpp"

namespace gravreg {

namespace {

Vec3 uniform_cube(Rng& rng, double half_width) {
  const double x = rng.uniform(-half_width, half_width);
  const double y = rng.uniform(-half_width, half_width);
  const double z = rng.uniform(-half_width, half_width);
  return Vec3(x, y, z);
}

void add_noise(std::vector<Vec3>& points, double sigma, Rng& rng) {
  if (sigma <= 0.0) return;
  for (Vec3& p : points) {
    p.x() += rng.gaussian(0.0, sigma);
    p.y() += rng.gaussian(0.0, sigma);
    p.z() += rng.gaussian(0.0, sigma);
  }
}

/// First k entries of a seeded partial Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> pick_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    const std::size_t j = i + rng.bounded(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

SynthInstance generate(const SynthConfig& cfg) {
  Rng rng(cfg.seed);
  SynthInstance inst;
  inst.mode = cfg.mode;

  const Vec3 axis = cfg.axis.normalized();
  const std::size_t count =
      cfg.mode == SynthMode::kCorrespondences ? cfg.n : cfg.m;

  std::vector<Vec3> source(count);
  for (Vec3& p : source) p = uniform_cube(rng, 1.0);

  const double theta = rng.uniform(-kPi, kPi);
  inst.truth.rotation = rotation_about_axis(axis, theta);
  inst.truth.translation = uniform_cube(rng, cfg.translation_half_width);

  GravityPair gravity;
  gravity.v_p = -axis;
  gravity.v_q = -axis;

  if (cfg.mode == SynthMode::kCorrespondences) {
    std::vector<Vec3> target(count);
    for (std::size_t i = 0; i < count; ++i) {
      target[i] = inst.truth.apply(source[i]);
    }

    const std::size_t n_outliers =
        static_cast<std::size_t>(std::llround(cfg.eta * count));
    inst.inlier_label.assign(count, true);
    std::vector<std::size_t> outliers = pick_indices(count, n_outliers, rng);
    std::sort(outliers.begin(), outliers.end());
    for (std::size_t i : outliers) {
      target[i] = uniform_cube(rng, 1.0);
      inst.inlier_label[i] = false;
    }

    add_noise(source, cfg.sigma, rng);
    add_noise(target, cfg.sigma, rng);

    inst.correspondences.gravity = gravity;
    inst.correspondences.pairs.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      inst.correspondences.pairs[i] = {source[i], target[i]};
    }
  } else {
    const std::size_t n_survivors = static_cast<std::size_t>(
        std::ceil(cfg.rho * static_cast<double>(count)));
    std::vector<std::size_t> survivors =
        pick_indices(count, std::max<std::size_t>(n_survivors, 1), rng);
    std::sort(survivors.begin(), survivors.end());

    inst.inlier_label.assign(count, false);
    std::vector<Vec3> target;
    target.reserve(survivors.size());
    for (std::size_t i : survivors) {
      target.push_back(inst.truth.apply(source[i]));
      inst.inlier_label[i] = true;
    }

    add_noise(source, cfg.sigma, rng);
    add_noise(target, cfg.sigma, rng);

    inst.clouds.gravity = gravity;
    inst.clouds.source = std::move(source);
    inst.clouds.target = std::move(target);
  }

  if (cfg.gravity_noise_deg > 0.0) {
    GravityPair& g = cfg.mode == SynthMode::kCorrespondences
                         ? inst.correspondences.gravity
                         : inst.clouds.gravity;
    g = gravity_noise_perturb(g, cfg.gravity_noise_deg, rng.next_u64());
  }
  return inst;
}

EvalReport evaluate(const SynthInstance& instance,
                    const RegistrationResult& result, double re_max_deg,
                    double te_max_m) {
  EvalReport report;
  report.re_deg =
      rotation_error_deg(instance.truth.rotation, result.transform.rotation);
  report.te_m = translation_error(instance.truth.translation,
                                  result.transform.translation);
  report.success = report.re_deg <= re_max_deg && report.te_m <= te_max_m;

  std::size_t labeled = 0;
  for (bool b : instance.inlier_label) labeled += b ? 1 : 0;

  const std::vector<std::size_t>* stages[3] = {&result.inliers_stage1,
                                               &result.inliers_stage2,
                                               &result.inliers_stage3};
  for (int s = 0; s < 3; ++s) {
    const std::vector<std::size_t>& set = *stages[s];
    if (set.empty() || labeled == 0) continue;
    std::size_t hits = 0;
    if (instance.mode == SynthMode::kCorrespondences) {
      for (std::size_t i : set) {
        if (instance.inlier_label[i]) ++hits;
      }
      report.precision[s] = static_cast<double>(hits) / set.size();
      report.recall[s] = static_cast<double>(hits) / labeled;
    } else {
      // SPCR: stage sets index the candidate list; score by source point.
      std::vector<bool> seen(instance.inlier_label.size(), false);
      std::size_t true_sources = 0;
      for (std::size_t row : set) {
        const std::size_t src = result.spcr_candidates[row].first;
        if (instance.inlier_label[src]) {
          ++true_sources;
          if (!seen[src]) {
            seen[src] = true;
            ++hits;
          }
        }
      }
      report.precision[s] = static_cast<double>(true_sources) / set.size();
      report.recall[s] = static_cast<double>(hits) / labeled;
    }
  }
  return report;
}

double rotation_error_deg(const Mat3& r_gt, const Mat3& r_est) {
  // arccos((Tr(R_gt^T R) - 1) / 2) evaluated through the identity
  // |R_gt - R|_F = 2 sqrt(2) sin(angle / 2): the arccos form loses all
  // precision below ~1e-6 degrees, the asin form is exact down to zero.
  const double d = (r_gt - r_est).norm() / (2.0 * std::sqrt(2.0));
  return 2.0 * std::asin(std::clamp(d, 0.0, 1.0)) * 180.0 / kPi;
}

double translation_error(const Vec3& t_gt, const Vec3& t_est) {
  return (t_gt - t_est).norm();
}

namespace {

Vec3 perturb_direction(const Vec3& v, double std_rad, Rng& rng) {
  const Vec3 e1 = antipodal_fallback_axis(v);
  const Vec3 e2 = v.cross(e1).normalized();
  const double beta = rng.uniform(0.0, 2.0 * kPi);
  const Vec3 axis = std::cos(beta) * e1 + std::sin(beta) * e2;
  const double angle = rng.gaussian(0.0, std_rad);
  return (rotation_about_axis(axis, angle) * v).normalized();
}

}  // namespace

GravityPair gravity_noise_perturb(const GravityPair& gravity,
                                  double angle_std_deg, std::uint64_t seed) {
  if (angle_std_deg <= 0.0) return gravity;
  Rng rng(seed);
  const double std_rad = angle_std_deg * kPi / 180.0;
  GravityPair out;
  out.v_p = perturb_direction(gravity.v_p, std_rad, rng);
  out.v_q = perturb_direction(gravity.v_q, std_rad, rng);
  return out;
}

}  // namespace gravreg
