#pragma once

#include <cstdint>

#include "gravreg/pipeline.hpp"
#include "gravreg/types.hpp"

namespace gravreg {

enum class SynthMode { kCorrespondences, kSpcr };

/// Synthetic instance protocol: source points uniform in [-1, 1]^3, a random
/// rotation about `axis` with angle uniform in [-pi, pi], a random
/// translation uniform in [-translation_half_width, +...]^3, an eta-fraction
/// of target points replaced by uniform outliers, and Gaussian noise of
/// standard deviation sigma added to both clouds. Fully reproducible from
/// the seed (draw order documented in the README).
struct SynthConfig {
  std::size_t n = 2000;  // correspondence count (correspondence mode)
  double eta = 0.0;      // outlier rate in [0, 1)
  double sigma = 0.0;    // noise standard deviation (meters)
  std::uint64_t seed = 1;
  Vec3 axis = Vec3(0.0, 0.0, 1.0);
  double translation_half_width = 1.0;
  SynthMode mode = SynthMode::kCorrespondences;
  // Correspondence-free mode:
  std::size_t m = 234;  // source cloud size
  double rho = 1.0;     // overlap rate in (0, 1]
  // Optional gravity-direction perturbation (degrees, 0 = exact prior).
  double gravity_noise_deg = 0.0;
};

struct SynthInstance {
  SynthMode mode = SynthMode::kCorrespondences;
  CorrespondenceSet correspondences;  // correspondence mode
  PointCloudPair clouds;              // SPCR mode
  RigidTransform truth;
  // Correspondence mode: per-correspondence inlier label.
  // SPCR mode: per-source-point label, true when the transformed point
  // survives in the target cloud.
  std::vector<bool> inlier_label;
};

SynthInstance generate(const SynthConfig& cfg);

/// Scorecard of a pipeline result against a generated instance.
struct EvalReport {
  double re_deg = 0.0;
  double te_m = 0.0;
  bool success = false;  // re_deg <= re_max && te_m <= te_max
  // Stage inlier quality against the generator labels. In correspondence
  // mode both are over correspondence indices; in SPCR mode recall counts
  // recovered overlap sources and precision the fraction of stage candidates
  // whose source point is a true survivor.
  double recall[3] = {0.0, 0.0, 0.0};
  double precision[3] = {0.0, 0.0, 0.0};
};

EvalReport evaluate(const SynthInstance& instance,
                    const RegistrationResult& result, double re_max_deg,
                    double te_max_m);

/// Geodesic rotation distance in degrees: arccos((Tr(R_gt^T R) - 1) / 2),
/// argument clamped to [-1, 1].
double rotation_error_deg(const Mat3& r_gt, const Mat3& r_est);

/// Euclidean translation distance.
double translation_error(const Vec3& t_gt, const Vec3& t_est);

/// Perturbs both gravity vectors independently: each is rotated about a
/// uniformly random perpendicular axis by an angle drawn from N(0, std^2),
/// so the angular deviation is exactly half-normal (mean ~0.80 * std).
GravityPair gravity_noise_perturb(const GravityPair& gravity,
                                  double angle_std_deg, std::uint64_t seed);

}  // namespace gravreg
