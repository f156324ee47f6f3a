#include "gravreg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gravreg/geometry.hpp"

namespace gravreg {

RegistrationConfig config_for_sigma(double sigma) {
  RegistrationConfig cfg;
  cfg.delta = std::max(3.0 * sigma, 1e-12);
  cfg.tau = std::max(6.0 * sigma, 1e-12);
  cfg.gamma_min = std::clamp(cfg.tau / 64.0, 1e-14, 1e-6);
  return cfg;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

RegistrationResult solve_from_stage1(const CorrespondenceSet& c,
                                     const Stage1Result& stage1,
                                     const RegistrationConfig& cfg) {
  RegistrationResult result;
  result.l_star = stage1.l_star;
  result.inliers_stage1 = stage1.inliers;

  // Stage II: pole search over the stage-I inlier set.
  const auto t_stage2 = std::chrono::steady_clock::now();
  const std::vector<PlaneCorrespondence> projected =
      project_to_plane(c, stage1.inliers);
  std::vector<BisectorLine> lines;
  lines.reserve(projected.size());
  for (const PlaneCorrespondence& pc : projected) {
    lines.push_back(bisector(pc));
  }
  BnbConfig bnb_cfg;
  bnb_cfg.gamma_min = cfg.gamma_min;
  bnb_cfg.w_min = cfg.w_min;
  bnb_cfg.max_expansions = cfg.max_expansions;
  bnb_cfg.threads = cfg.threads;
  result.pole = bnb_search(lines, cfg.tau, bnb_cfg);
  result.inliers_stage2.reserve(result.pole.inliers.size());
  for (std::size_t row : result.pole.inliers) {
    result.inliers_stage2.push_back(projected[row].owner);
  }
  std::sort(result.inliers_stage2.begin(), result.inliers_stage2.end());
  result.timings.stage2_s = seconds_since(t_stage2);

  // Stage III: rotation angle by voting, then circular-mean refinement.
  const auto t_stage3 = std::chrono::steady_clock::now();
  std::vector<PlaneCorrespondence> stage2_projected;
  stage2_projected.reserve(result.pole.inliers.size());
  for (std::size_t row : result.pole.inliers) {
    stage2_projected.push_back(projected[row]);
  }

  double theta = 0.0;
  if (result.pole.at_infinity) {
    // Pure translation: every stage-II inlier carries over.
    result.inliers_stage3 = result.inliers_stage2;
  } else {
    std::vector<double> angles;
    std::vector<std::size_t> angle_owner;
    angles.reserve(stage2_projected.size());
    for (const PlaneCorrespondence& pc : stage2_projected) {
      const Vec2 u = pc.p_hat - result.pole.c0;
      const Vec2 v = pc.q_hat - result.pole.c0;
      if (u.norm() < 1e-12 || v.norm() < 1e-12) {
        continue;  // degenerate: excluded from the vote
      }
      angles.push_back(per_pair_angle(pc.p_hat, pc.q_hat, result.pole.c0));
      angle_owner.push_back(pc.owner);
    }
    if (angles.empty()) {
      throw NoConsensus("solve_from_stage1: all stage-II inliers degenerate");
    }
    AngleVoteConfig vote_cfg;
    vote_cfg.bins = cfg.angle_bins;
    const VoteResult vote = vote_angle(angles, vote_cfg);
    std::vector<double> winning_angles;
    winning_angles.reserve(vote.inliers.size());
    result.inliers_stage3.reserve(vote.inliers.size());
    for (std::size_t pos : vote.inliers) {
      winning_angles.push_back(angles[pos]);
      result.inliers_stage3.push_back(angle_owner[pos]);
    }
    std::sort(result.inliers_stage3.begin(), result.inliers_stage3.end());
    theta = refine_theta(winning_angles);
  }

  result.theta_star = theta;
  result.transform = assemble_transform(theta, result.pole, stage2_projected,
                                        stage1.t_parallel, c.gravity);
  result.timings.stage3_s = seconds_since(t_stage3);
  result.timings.total_s = result.timings.stage2_s + result.timings.stage3_s;
  return result;
}

RegistrationResult solve_register(const CorrespondenceSet& c,
                                  const RegistrationConfig& cfg) {
  if (c.pairs.empty()) {
    throw EmptyInput("solve_register: empty correspondence set");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const Stage1Result stage1 = solve_stage1(c, cfg.delta);
  const double stage1_s = seconds_since(t_start);

  RegistrationResult result = solve_from_stage1(c, stage1, cfg);
  result.timings.stage1_s = stage1_s;
  result.timings.total_s = seconds_since(t_start);
  return result;
}

}  // namespace gravreg
