#pragma once

#include "gravreg/stage1.hpp"
#include "gravreg/stage2.hpp"
#include "gravreg/stage3.hpp"
#include "gravreg/types.hpp"

namespace gravreg {

/// All thresholds and search controls of the three-stage pipeline.
struct RegistrationConfig {
  double delta = 0.015;  // stage-I inlier threshold (meters)
  double tau = 0.03;     // stage-II algebraic point-line threshold
  int angle_bins = 360;  // stage-III grid size s (zeta = pi / s)
  double gamma_min = 1e-6;
  double w_min = 1e-6;
  std::uint64_t max_expansions = 10'000'000;
  int threads = 1;
};

/// Noise-derived defaults. delta = 3 sigma. tau is calibrated on the
/// synthetic benchmark (see README): the bisector residual |n^T C| scales
/// like sqrt(2) sigma times an O(1) geometry factor, and tau = 6 sigma keeps
/// essentially all true inliers across the benchmark scenes. Both thresholds
/// are floored so that noise-free (sigma = 0) instances remain solvable at
/// floating-point resolution, and gamma_min shrinks with tau so the pole
/// search can resolve the tighter consensus region.
RegistrationConfig config_for_sigma(double sigma);

struct StageTimings {
  double stage1_s = 0.0;
  double stage2_s = 0.0;
  double stage3_s = 0.0;
  double total_s = 0.0;
};

struct RegistrationResult {
  RigidTransform transform;
  double theta_star = 0.0;  // refined rotation angle about the gravity axis
  double l_star = 0.0;      // translation component along the gravity axis
  std::vector<std::size_t> inliers_stage1;
  std::vector<std::size_t> inliers_stage2;
  std::vector<std::size_t> inliers_stage3;
  PoleResult pole;
  StageTimings timings;
  // Correspondence-free mode only: the candidate (source, target) pairs the
  // stage-1 stab extracted; the inlier index sets refer to this list.
  std::vector<std::pair<std::size_t, std::size_t>> spcr_candidates;
};

/// Full correspondence-based pipeline: stage I (interval stabbing), stage II
/// (pole BnB on the stage-I inliers), stage III (angle voting + circular-mean
/// refinement), then assembly of R*, t*.
RegistrationResult solve_register(const CorrespondenceSet& c,
                                  const RegistrationConfig& cfg);

/// Stages II-III given an already-computed stage-I solution. Shared by the
/// correspondence-based and correspondence-free front ends.
RegistrationResult solve_from_stage1(const CorrespondenceSet& c,
                                     const Stage1Result& stage1,
                                     const RegistrationConfig& cfg);

}  // namespace gravreg
