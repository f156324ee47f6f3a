#pragma once

#include <cstdint>

#include "gravreg/types.hpp"

namespace gravreg {

struct RansacConfig {
  double epsilon = 0.03;  // 3-D residual inlier threshold (meters)
  std::uint64_t max_iterations = 10'000;
  std::uint64_t seed = 0;
};

struct RansacResult {
  RigidTransform transform;
  std::vector<std::size_t> inliers;   // of the refit model, sorted
  std::uint64_t iterations_run = 0;
};

/// Seeded 4-DOF RANSAC baseline. Each iteration samples two distinct
/// correspondences; after gravity alignment the minimal model is the
/// rotation angle about the axis (from the planar chord directions) plus the
/// full 3-D translation. The best-consensus model is least-squares refit on
/// its inlier set. Throws NoConsensus when no model exceeds 2 inliers.
RansacResult ransac_baseline(const CorrespondenceSet& c,
                             const RansacConfig& cfg);

}  // namespace gravreg
