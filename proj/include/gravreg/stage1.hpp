#pragma once

#include "gravreg/types.hpp"

namespace gravreg {

/// Closed 1-D interval with the index of the correspondence (or source
/// point) that produced it.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t owner = 0;
};

struct StabResult {
  double position = 0.0;             // midpoint of the max-overlap region
  std::size_t count = 0;             // max-stabbing number
  std::vector<std::size_t> inliers;  // owners stabbed at `position`, sorted
};

/// One interval per correspondence for the axis-parallel translation
/// l = v_q^T t: [-delta - v_q^T (p'_i - q_i), delta - v_q^T (p'_i - q_i)]
/// with p'_i the gravity-aligned source point.
std::vector<Interval> build_axis_intervals(const CorrespondenceSet& c,
                                           double delta);

/// Max-stabbing over closed intervals by endpoint sort and sweep,
/// O(N log N). Endpoint touches count as stabs. Among regions of equal
/// maximal depth the one with the smallest left endpoint wins, and the
/// midpoint of that region is returned.
StabResult interval_stabbing(const std::vector<Interval>& intervals);

struct Stage1Result {
  double l_star = 0.0;
  Vec3 t_parallel = Vec3::Zero();
  std::vector<std::size_t> inliers;
  std::size_t stab_count = 0;
};

/// Stage I: estimate the translation component parallel to the gravity axis,
/// t_parallel = l* v_q.
Stage1Result solve_stage1(const CorrespondenceSet& c, double delta);

}  // namespace gravreg
