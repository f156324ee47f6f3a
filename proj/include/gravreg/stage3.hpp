#pragma once

#include "gravreg/stage2.hpp"
#include "gravreg/types.hpp"

namespace gravreg {

/// Uniform 1-D grid over [0, 2pi): s bins centered at (2k+1) pi / s
/// (k = 0..s-1), each with half-width zeta = pi / s.
struct AngleVoteConfig {
  int bins = 360;

  double zeta() const { return kPiAngle / bins; }

 private:
  static constexpr double kPiAngle = 3.14159265358979323846;
};

struct VoteResult {
  double theta_star = 0.0;           // winning grid center
  std::vector<std::size_t> inliers;  // positions into the angle list, sorted
};

/// Signed rotation angle from (p_hat - c0) to (q_hat - c0), counterclockwise,
/// wrapped to [0, 2pi). Throws DegeneratePoint when either vector is shorter
/// than 1e-12.
double per_pair_angle(const Vec2& p_hat, const Vec2& q_hat, const Vec2& c0);

/// Consensus voting over the angle grid; circular distance, closed
/// comparison, ties broken by the smallest bin index.
VoteResult vote_angle(const std::vector<double>& angles,
                      const AngleVoteConfig& cfg);

/// Circular mean of the stage-3 inlier angles, wrapped to [0, 2pi). Removes
/// the grid quantization floor of the vote.
double refine_theta(const std::vector<double>& inlier_angles);

/// Lift the planar solution back to 3-D:
///   t_perp_hat = (I - R2(theta)) C0,
///   R = A^T Rz(theta) A G,   t = A^T [t_perp_hat; 0] + t_parallel,
/// with A the rotation taking v_q to e_z and G the one taking v_p to v_q.
/// When the pole is at infinity the motion is a pure translation: theta = 0
/// and t_perp_hat is the componentwise median of (q_hat - p_hat) over the
/// given stage-II inlier projections.
RigidTransform assemble_transform(double theta, const PoleResult& pole,
                                  const std::vector<PlaneCorrespondence>&
                                      stage2_inlier_projections,
                                  const Vec3& t_parallel,
                                  const GravityPair& gravity);

}  // namespace gravreg
