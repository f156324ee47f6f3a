#include "gravreg/stage1.hpp"

#include <algorithm>

#include "gravreg/geometry.hpp"

namespace gravreg {

std::vector<Interval> build_axis_intervals(const CorrespondenceSet& c,
                                           double delta) {
  const Mat3 align = rotation_between_resolved(c.gravity.v_p, c.gravity.v_q);
  const Vec3& v_q = c.gravity.v_q;

  std::vector<Interval> intervals;
  intervals.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 p_prime = align * c.pairs[i].p;
    const double z = v_q.dot(p_prime - c.pairs[i].q);
    intervals.push_back({-delta - z, delta - z, i});
  }
  return intervals;
}

StabResult interval_stabbing(const std::vector<Interval>& intervals) {
  if (intervals.empty()) {
    throw EmptyInput("interval_stabbing: no intervals");
  }

  // Events: starts sort before ends at the same coordinate, so touching
  // endpoints overlap (closed intervals).
  struct Event {
    double x;
    bool is_end;
  };
  std::vector<Event> events;
  events.reserve(2 * intervals.size());
  for (const Interval& iv : intervals) {
    events.push_back({iv.lo, false});
    events.push_back({iv.hi, true});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.is_end < b.is_end;
  });

  // First attainment of the global max depth gives the leftmost maximal
  // region; it extends to the next end event.
  std::size_t depth = 0;
  std::size_t best = 0;
  std::size_t best_at = 0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (!events[k].is_end) {
      ++depth;
      if (depth > best) {
        best = depth;
        best_at = k;
      }
    } else {
      --depth;
    }
  }

  const double region_lo = events[best_at].x;
  double region_hi = region_lo;
  for (std::size_t k = best_at + 1; k < events.size(); ++k) {
    if (events[k].is_end) {
      region_hi = events[k].x;
      break;
    }
  }

  StabResult result;
  result.position = 0.5 * (region_lo + region_hi);
  for (const Interval& iv : intervals) {
    if (iv.lo <= result.position && result.position <= iv.hi) {
      result.inliers.push_back(iv.owner);
    }
  }
  std::sort(result.inliers.begin(), result.inliers.end());
  result.count = result.inliers.size();
  return result;
}

Stage1Result solve_stage1(const CorrespondenceSet& c, double delta) {
  const StabResult stab = interval_stabbing(build_axis_intervals(c, delta));
  Stage1Result result;
  result.l_star = stab.position;
  result.t_parallel = stab.position * c.gravity.v_q;
  result.inliers = stab.inliers;
  result.stab_count = stab.count;
  return result;
}

}  // namespace gravreg
