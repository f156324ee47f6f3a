#include "gravreg/spcr.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>

#include "gravreg/geometry.hpp"

namespace gravreg {

std::vector<std::vector<Interval>> build_spcr_intervals(
    const PointCloudPair& pair, double delta) {
  const Mat3 align =
      rotation_between_resolved(pair.gravity.v_p, pair.gravity.v_q);
  const Vec3& v_q = pair.gravity.v_q;

  std::vector<std::vector<Interval>> per_source(pair.source.size());
  for (std::size_t i = 0; i < pair.source.size(); ++i) {
    const double zp = v_q.dot(align * pair.source[i]);
    per_source[i].reserve(pair.target.size());
    for (std::size_t j = 0; j < pair.target.size(); ++j) {
      const double z = zp - v_q.dot(pair.target[j]);
      per_source[i].push_back({-delta - z, delta - z, j});
    }
  }
  return per_source;
}

std::vector<MergedInterval> merge_intervals(std::vector<Interval> raw) {
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.hi != b.hi) return a.hi < b.hi;
    return a.owner < b.owner;
  });

  std::vector<MergedInterval> merged;
  for (const Interval& iv : raw) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
      merged.back().targets.push_back({iv.owner, iv.lo, iv.hi});
    } else {
      MergedInterval m;
      m.lo = iv.lo;
      m.hi = iv.hi;
      m.targets.push_back({iv.owner, iv.lo, iv.hi});
      merged.push_back(std::move(m));
    }
  }
  return merged;
}

SpcrStabResult spcr_stab(const MergedIntervalSet& merged) {
  std::vector<Interval> flat;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    for (const MergedInterval& m : merged[i]) {
      flat.push_back({m.lo, m.hi, i});
    }
  }
  if (flat.empty()) {
    throw EmptyInput("spcr_stab: no merged intervals");
  }
  const StabResult stab = interval_stabbing(flat);

  SpcrStabResult result;
  result.l_star = stab.position;
  result.count = stab.count;
  for (std::size_t i : stab.inliers) {
    for (const MergedInterval& m : merged[i]) {
      if (m.lo <= stab.position && stab.position <= m.hi) {
        for (const ContributingTarget& t : m.targets) {
          if (t.lo <= stab.position && stab.position <= t.hi) {
            result.candidates.emplace_back(i, t.target);
          }
        }
      }
    }
  }
  std::sort(result.candidates.begin(), result.candidates.end());
  return result;
}

std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& points,
                                   double resolution) {
  if (resolution <= 0.0 || points.empty()) return points;

  struct Cell {
    Vec3 sum = Vec3::Zero();
    std::size_t count = 0;
  };
  std::map<std::array<long long, 3>, Cell> cells;
  for (const Vec3& p : points) {
    const std::array<long long, 3> key = {
        static_cast<long long>(std::floor(p.x() / resolution)),
        static_cast<long long>(std::floor(p.y() / resolution)),
        static_cast<long long>(std::floor(p.z() / resolution))};
    Cell& cell = cells[key];
    cell.sum += p;
    cell.count += 1;
  }
  std::vector<Vec3> out;
  out.reserve(cells.size());
  for (const auto& [key, cell] : cells) {
    out.push_back(cell.sum / static_cast<double>(cell.count));
  }
  return out;
}

RegistrationResult solve_spcr(const PointCloudPair& pair,
                              const SpcrConfig& cfg) {
  if (pair.source.empty() || pair.target.empty()) {
    throw EmptyInput("solve_spcr: empty point cloud");
  }
  const auto t_start = std::chrono::steady_clock::now();

  PointCloudPair work = pair;
  if (cfg.voxel_resolution > 0.0) {
    work.source = voxel_downsample(pair.source, cfg.voxel_resolution);
    work.target = voxel_downsample(pair.target, cfg.voxel_resolution);
  }

  const Mat3 align =
      rotation_between_resolved(work.gravity.v_p, work.gravity.v_q);
  const Vec3& v_q = work.gravity.v_q;
  const double delta = cfg.reg.delta;

  // Target heights sorted once; every source point's raw intervals are the
  // same sorted sequence shifted by its own height, so each per-source merge
  // is a single linear sweep.
  std::vector<std::pair<double, std::size_t>> zq(work.target.size());
  for (std::size_t j = 0; j < work.target.size(); ++j) {
    zq[j] = {v_q.dot(work.target[j]), j};
  }
  std::sort(zq.begin(), zq.end());

  std::vector<double> zp(work.source.size());
  std::vector<Interval> merged_flat;
  for (std::size_t i = 0; i < work.source.size(); ++i) {
    zp[i] = v_q.dot(align * work.source[i]);
    double lo = zq[0].first - zp[i] - delta;
    double hi = zq[0].first - zp[i] + delta;
    for (std::size_t k = 1; k < zq.size(); ++k) {
      const double next_lo = zq[k].first - zp[i] - delta;
      if (next_lo <= hi) {
        hi = zq[k].first - zp[i] + delta;
      } else {
        merged_flat.push_back({lo, hi, i});
        lo = next_lo;
        hi = zq[k].first - zp[i] + delta;
      }
    }
    merged_flat.push_back({lo, hi, i});
  }

  const StabResult stab = interval_stabbing(merged_flat);
  const double l_star = stab.position;

  // Candidate correspondences: all targets whose raw interval contains l*.
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t i : stab.inliers) {
    const double z_lo = l_star + zp[i] - delta;
    const double z_hi = l_star + zp[i] + delta;
    auto first = std::lower_bound(
        zq.begin(), zq.end(), std::make_pair(z_lo, std::size_t{0}));
    std::vector<std::size_t> js;
    for (auto it = first; it != zq.end() && it->first <= z_hi; ++it) {
      js.push_back(it->second);
    }
    std::sort(js.begin(), js.end());
    for (std::size_t j : js) candidates.emplace_back(i, j);
  }

  if (candidates.empty()) {
    throw NoConsensus("solve_spcr: stage I produced no candidates");
  }

  CorrespondenceSet cands;
  cands.gravity = work.gravity;
  cands.pairs.reserve(candidates.size());
  for (const auto& [i, j] : candidates) {
    cands.pairs.push_back({work.source[i], work.target[j]});
  }

  Stage1Result stage1;
  stage1.l_star = l_star;
  stage1.t_parallel = l_star * v_q;
  stage1.stab_count = stab.count;
  stage1.inliers.resize(cands.size());
  for (std::size_t k = 0; k < cands.size(); ++k) stage1.inliers[k] = k;
  const double stage1_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  RegistrationResult result = solve_from_stage1(cands, stage1, cfg.reg);
  result.spcr_candidates = std::move(candidates);
  result.timings.stage1_s = stage1_s;
  result.timings.total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

}  // namespace gravreg
