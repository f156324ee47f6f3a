#pragma once

#include "gravreg/pipeline.hpp"
#include "gravreg/stage1.hpp"
#include "gravreg/types.hpp"

namespace gravreg {

/// A contributing target inside a merged interval, with its raw bounds so
/// that candidates can be re-checked against the original constraint.
struct ContributingTarget {
  std::size_t target = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Disjoint interval produced by merging the raw candidate intervals of one
/// source point.
struct MergedInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<ContributingTarget> targets;
};

/// merged[i] is the sorted disjoint cover of source point i's raw intervals.
using MergedIntervalSet = std::vector<std::vector<MergedInterval>>;

/// All M x N raw candidate intervals of problem (translation along the
/// gravity axis without correspondences), grouped by source point:
/// [-delta - v_q^T (p'_i - q_j), delta - v_q^T (p'_i - q_j)].
/// Intended for desk-scale use and tests; solve_spcr streams instead.
std::vector<std::vector<Interval>> build_spcr_intervals(
    const PointCloudPair& pair, double delta);

/// Classic sort-and-sweep union of one source point's intervals; overlapping
/// or touching intervals coalesce and their contributing targets are pooled.
std::vector<MergedInterval> merge_intervals(std::vector<Interval> raw);

struct SpcrStabResult {
  double l_star = 0.0;
  std::size_t count = 0;  // stabbed source points (at most one each)
  // Candidate correspondences (source, target) whose raw interval contains
  // l_star, sorted lexicographically.
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
};

/// Interval stabbing over all merged intervals. Every source point can
/// contribute at most one stab; each stabbed merged interval emits all its
/// contributing targets whose raw interval contains l*.
SpcrStabResult spcr_stab(const MergedIntervalSet& merged);

struct SpcrConfig {
  RegistrationConfig reg;
  double voxel_resolution = 0.0;  // > 0 enables voxel-grid downsampling
};

/// Voxel-grid downsampling: centroid per occupied cell, cells emitted in
/// lexicographic cell order (deterministic).
std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& points,
                                   double resolution);

/// Correspondence-free pipeline: per-source interval merging + stabbing to
/// recover l* and candidate correspondences, then stages II-III of the
/// correspondence-based pipeline on those candidates.
RegistrationResult solve_spcr(const PointCloudPair& pair,
                              const SpcrConfig& cfg);

}  // namespace gravreg
