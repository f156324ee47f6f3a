#include "gravreg/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <queue>

#include "gravreg/geometry.hpp"

namespace gravreg {

std::vector<PlaneCorrespondence> project_to_plane(
    const CorrespondenceSet& c, const std::vector<std::size_t>& inliers) {
  const Mat3 align = rotation_between_resolved(c.gravity.v_p, c.gravity.v_q);
  const Mat3 to_ez =
      rotation_between_resolved(c.gravity.v_q, Vec3(0.0, 0.0, 1.0));
  const Mat3 source_map = to_ez * align;

  std::vector<PlaneCorrespondence> projected;
  projected.reserve(inliers.size());
  for (std::size_t idx : inliers) {
    const Vec3 p_tilde = source_map * c.pairs[idx].p;
    const Vec3 q_tilde = to_ez * c.pairs[idx].q;
    projected.push_back(
        {Vec2(p_tilde.x(), p_tilde.y()), Vec2(q_tilde.x(), q_tilde.y()), idx});
  }
  return projected;
}

BisectorLine bisector(const PlaneCorrespondence& pc) {
  BisectorLine line;
  line.owner = pc.owner;
  line.a = pc.q_hat.x() - pc.p_hat.x();
  line.b = pc.q_hat.y() - pc.p_hat.y();
  line.c = -(0.5 * (pc.p_hat.x() + pc.q_hat.x()) * line.a +
             0.5 * (pc.p_hat.y() + pc.q_hat.y()) * line.b);
  line.degenerate =
      std::sqrt(line.a * line.a + line.b * line.b) < kBisectorDegeneracy;
  return line;
}

namespace {

struct LineData {
  double a, b, c;
  double norm;
};

std::vector<LineData> pack_lines(const std::vector<BisectorLine>& lines) {
  std::vector<LineData> packed;
  packed.reserve(lines.size());
  for (const BisectorLine& l : lines) {
    packed.push_back({l.a, l.b, l.c, l.norm()});
  }
  return packed;
}

std::size_t count_lower(const std::vector<LineData>& lines, const Vec3& h,
                        double tau) {
  std::size_t count = 0;
  for (const LineData& l : lines) {
    const double r = std::abs(l.a * h.x() + l.b * h.y() + l.c * h.z());
    if (r <= tau) ++count;
  }
  return count;
}

std::size_t count_upper(const std::vector<LineData>& lines, const Vec3& h,
                        double tau, double gamma) {
  const double spread = std::sqrt(2.0) * gamma;
  std::size_t count = 0;
  for (const LineData& l : lines) {
    if (l.norm <= tau) {
      ++count;  // satisfiable everywhere
      continue;
    }
    const double xi = std::asin(tau / l.norm);
    const double psi =
        (spread + xi < kPi / 2.0) ? l.norm * std::sin(spread + xi) : l.norm;
    const double r = std::abs(l.a * h.x() + l.b * h.y() + l.c * h.z());
    if (r <= psi) ++count;
  }
  return count;
}

}  // namespace

std::pair<std::size_t, std::size_t> bnb_bounds(
    const PoleBranch& branch, const std::vector<BisectorLine>& lines,
    double tau) {
  const std::vector<LineData> packed = pack_lines(lines);
  const Vec3 h = exp_map(branch.center);
  return {count_upper(packed, h, tau, branch.half_side),
          count_lower(packed, h, tau)};
}

std::size_t count_pole_inliers(const Vec3& h,
                               const std::vector<BisectorLine>& lines,
                               double tau) {
  std::size_t count = 0;
  for (const BisectorLine& l : lines) {
    if (std::abs(l.a * h.x() + l.b * h.y() + l.c * h.z()) <= tau) ++count;
  }
  return count;
}

namespace {

struct QueuedBranch {
  Vec2 center;
  double half_side;
  std::size_t upper;
  std::size_t lower;
  std::uint64_t seq;
};

struct BranchOrder {
  bool operator()(const QueuedBranch& a, const QueuedBranch& b) const {
    if (a.upper != b.upper) return a.upper < b.upper;
    if (a.half_side != b.half_side) return a.half_side < b.half_side;
    return a.seq > b.seq;  // earlier insertion wins ties
  }
};

bool intersects_disk(const Vec2& center, double half_side) {
  const double dx = std::max(std::abs(center.x()) - half_side, 0.0);
  const double dy = std::max(std::abs(center.y()) - half_side, 0.0);
  return dx * dx + dy * dy <= (kPi / 2.0) * (kPi / 2.0) * (1.0 + 1e-12);
}

}  // namespace

PoleResult bnb_search(const std::vector<BisectorLine>& lines, double tau,
                      const BnbConfig& cfg) {
  if (lines.empty()) {
    throw EmptyInput("bnb_search: no constraint lines");
  }

  const std::vector<LineData> packed = pack_lines(lines);

  std::priority_queue<QueuedBranch, std::vector<QueuedBranch>, BranchOrder>
      queue;
  std::uint64_t seq = 0;

  std::size_t best_lower = 0;
  Vec3 best_h(0.0, 0.0, 1.0);
  bool have_incumbent = false;

  const auto consider = [&](const Vec2& center, double half_side,
                            std::size_t upper, std::size_t lower) {
    if (lower > best_lower || !have_incumbent) {
      best_lower = lower;
      best_h = exp_map(center);
      have_incumbent = true;
    }
    if (upper > best_lower) {
      queue.push({center, half_side, upper, lower, seq++});
    }
  };

  {
    const Vec2 root_center = Vec2::Zero();
    const double root_half = kPi / 2.0;
    const Vec3 h = exp_map(root_center);
    consider(root_center, root_half, count_upper(packed, h, tau, root_half),
             count_lower(packed, h, tau));
  }

  BnbStats stats;
  std::size_t final_upper = best_lower;

  while (!queue.empty()) {
    const QueuedBranch top = queue.top();
    if (top.upper <= best_lower) {
      final_upper = top.upper;
      break;  // global bound met: gap closed
    }
    if (top.half_side < cfg.gamma_min ||
        stats.branches_expanded >= cfg.max_expansions) {
      final_upper = top.upper;
      break;
    }
    queue.pop();
    ++stats.branches_expanded;
    if (cfg.on_expand) {
      cfg.on_expand({top.center, top.half_side, top.upper, top.lower});
    }

    const double child_half = 0.5 * top.half_side;
    const Vec2 offsets[4] = {Vec2(-child_half, -child_half),
                             Vec2(child_half, -child_half),
                             Vec2(-child_half, child_half),
                             Vec2(child_half, child_half)};

    std::pair<std::size_t, std::size_t> bounds[4];
    bool valid[4];
    const auto eval_child = [&](int k) {
      const Vec2 center = top.center + offsets[k];
      valid[k] = intersects_disk(center, child_half);
      if (!valid[k]) return;
      const Vec3 h = exp_map(center);
      bounds[k] = {count_upper(packed, h, tau, child_half),
                   count_lower(packed, h, tau)};
    };

    if (cfg.threads > 1) {
      // Workers evaluate bounds; results are integrated in fixed child
      // order, so the expansion sequence does not depend on thread count.
      std::future<void> jobs[4];
      for (int k = 0; k < 4; ++k) {
        jobs[k] = std::async(std::launch::async, eval_child, k);
      }
      for (int k = 0; k < 4; ++k) jobs[k].wait();
    } else {
      for (int k = 0; k < 4; ++k) eval_child(k);
    }

    for (int k = 0; k < 4; ++k) {
      if (valid[k]) {
        consider(top.center + offsets[k], child_half, bounds[k].first,
                 bounds[k].second);
      }
    }
  }
  if (queue.empty()) {
    final_upper = best_lower;
  }

  if (best_lower == 0) {
    throw NoConsensus("bnb_search: no pole satisfies any constraint");
  }

  PoleResult result;
  result.witness = best_h;
  if (result.witness.z() < 0.0) result.witness = -result.witness;
  result.c_hat = polish_pole_witness(result.witness, lines, tau);
  if (result.c_hat.z() < 0.0) result.c_hat = -result.c_hat;
  result.stats = stats;
  result.stats.final_gap =
      final_upper > best_lower ? final_upper - best_lower : 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double r = std::abs(packed[i].a * result.witness.x() +
                              packed[i].b * result.witness.y() +
                              packed[i].c * result.witness.z());
    if (r <= tau) result.inliers.push_back(i);
  }
  const std::optional<Vec2> c0 = recover_pole(result.c_hat, cfg.w_min);
  result.at_infinity = !c0.has_value();
  if (c0) result.c0 = *c0;
  return result;
}

std::optional<Vec2> recover_pole(const Vec3& c_hat, double w_min) {
  if (std::abs(c_hat.z()) < w_min) {
    return std::nullopt;
  }
  return Vec2(c_hat.x() / c_hat.z(), c_hat.y() / c_hat.z());
}

namespace {

Vec2 chart_of(const Vec3& h) {
  const double xy = std::sqrt(h.x() * h.x() + h.y() * h.y());
  if (xy < 1e-300) return Vec2::Zero();
  const double omega = std::atan2(xy, h.z());
  return Vec2(h.x() / xy * omega, h.y() / xy * omega);
}

}  // namespace

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double m = v[n / 2];
  if (n % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.begin() + n / 2);
    m = 0.5 * (m + v[n / 2 - 1]);
  }
  return m;
}

/// Concurrency-point estimate: coordinatewise median of the pairwise
/// intersections of the member lines in the pole plane. Robust to a
/// minority of coincidental in-band outlier lines; near-parallel pairs are
/// skipped. Returns false when too few pairs cross usefully (e.g. the
/// pure-translation case, where the lines form a parallel pencil).
bool median_intersection(const std::vector<LineData>& packed,
                         const std::vector<std::size_t>& members, Vec3* out) {
  // Cap the O(K^2) pair enumeration with a deterministic stride subsample.
  std::vector<std::size_t> subset;
  const std::size_t max_members = 600;
  if (members.size() > max_members) {
    const std::size_t stride = (members.size() + max_members - 1) / max_members;
    for (std::size_t m = 0; m < members.size(); m += stride) {
      subset.push_back(members[m]);
    }
  } else {
    subset = members;
  }

  // Medians are taken in hemisphere coordinates: for a far pole the
  // intersections scatter wildly along the near-parallel pencil, and the
  // homogeneous chart turns that ill-conditioned distance into a bounded
  // 1/distance coordinate while keeping the well-measured direction.
  std::vector<double> hx, hy, hz;
  for (std::size_t a = 0; a + 1 < subset.size(); ++a) {
    const LineData& la = packed[subset[a]];
    const double na = std::sqrt(la.a * la.a + la.b * la.b);
    if (na < 1e-12) continue;
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const LineData& lb = packed[subset[b]];
      const double nb = std::sqrt(lb.a * lb.a + lb.b * lb.b);
      if (nb < 1e-12) continue;
      const double det = la.a * lb.b - lb.a * la.b;
      if (std::abs(det) < 0.02 * na * nb) continue;  // near-parallel pair
      const double x = (la.b * lb.c - lb.b * la.c) / det;
      const double y = (lb.a * la.c - la.a * lb.c) / det;
      const double inv = 1.0 / std::sqrt(1.0 + x * x + y * y);
      hx.push_back(x * inv);
      hy.push_back(y * inv);
      hz.push_back(inv);
    }
  }
  if (hx.size() < 3) return false;
  Vec3 h(median_inplace(hx), median_inplace(hy), median_inplace(hz));
  const double norm = h.norm();
  if (norm < 1e-12) return false;
  *out = h / norm;
  return true;
}

}  // namespace

Vec3 polish_pole_witness(const Vec3& h0,
                         const std::vector<BisectorLine>& lines, double tau) {
  const std::vector<LineData> packed = pack_lines(lines);

  // The inlier set of the witness, fixed for the whole polish.
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < packed.size(); ++i) {
    const double r = std::abs(packed[i].a * h0.x() + packed[i].b * h0.y() +
                              packed[i].c * h0.z());
    if (r <= tau) members.push_back(i);
  }
  if (members.empty()) return h0;

  const std::size_t k = members.size();
  const std::size_t trim = std::min(k - 1, std::max<std::size_t>(1, k / 20));
  std::vector<double> residuals(k);

  const auto objective = [&](const Vec3& h) {
    for (std::size_t m = 0; m < k; ++m) {
      const LineData& l = packed[members[m]];
      residuals[m] = std::abs(l.a * h.x() + l.b * h.y() + l.c * h.z());
    }
    std::nth_element(residuals.begin(), residuals.begin() + (k - 1 - trim),
                     residuals.end());
    return residuals[k - 1 - trim];
  };

  const std::size_t base_count = count_lower(packed, h0, tau);

  Vec3 best_h = h0;
  double best_obj = objective(h0);

  // Averaging estimate of the concurrency point, re-selected at shrinking
  // residual radii: lines that only graze the consensus region drop out, so
  // coincidental in-band outliers stop dragging the estimate. The final
  // count guard is a safety net against a structurally wrong median (e.g. a
  // near-parallel pencil), not an exact-count requirement: the count-maximal
  // sliver itself can sit off the concurrency core.
  Vec3 h_med;
  if (median_intersection(packed, members, &h_med)) {
    for (const double radius : {0.5 * tau, 0.25 * tau}) {
      std::vector<std::size_t> refined;
      for (std::size_t i : members) {
        const LineData& l = packed[i];
        const double r = std::abs(l.a * h_med.x() + l.b * h_med.y() +
                                  l.c * h_med.z());
        if (r <= radius) refined.push_back(i);
      }
      if (refined.size() < std::max<std::size_t>(6, members.size() / 4)) {
        break;
      }
      Vec3 h_next;
      if (!median_intersection(packed, refined, &h_next)) break;
      h_med = h_next;
    }
    const std::size_t guard =
        std::max<std::size_t>(3, (3 * base_count) / 4);
    if (count_lower(packed, h_med, tau) >= guard) {
      return h_med;
    }
  }

  // Fallback: trimmed-minimax pattern search from the witness.
  Vec2 phi = chart_of(best_h);
  const Vec2 dirs[8] = {Vec2(1, 0),  Vec2(-1, 0), Vec2(0, 1),  Vec2(0, -1),
                        Vec2(1, 1),  Vec2(1, -1), Vec2(-1, 1), Vec2(-1, -1)};
  double step = 0.05;
  const double step_min = 1e-10;
  int evals = 0;
  while (step >= step_min && evals < 20000) {
    bool improved = false;
    for (const Vec2& d : dirs) {
      const Vec2 cand = phi + step * d;
      const Vec3 h = exp_map(cand);
      const double obj = objective(h);
      ++evals;
      if (obj < best_obj && count_lower(packed, h, tau) >= base_count) {
        best_obj = obj;
        best_h = h;
        phi = cand;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_h;
}

}  // namespace gravreg
