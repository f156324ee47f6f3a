#include "gravreg/stage3.hpp"

#include <algorithm>
#include <cmath>

#include "gravreg/geometry.hpp"

namespace gravreg {

namespace {

double wrap_two_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double circular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * kPi));
}

}  // namespace

double per_pair_angle(const Vec2& p_hat, const Vec2& q_hat, const Vec2& c0) {
  const Vec2 u = p_hat - c0;
  const Vec2 v = q_hat - c0;
  if (u.norm() < 1e-12 || v.norm() < 1e-12) {
    throw DegeneratePoint("per_pair_angle: point coincides with the pole");
  }
  const double cross = u.x() * v.y() - u.y() * v.x();
  return wrap_two_pi(std::atan2(cross, u.dot(v)));
}

VoteResult vote_angle(const std::vector<double>& angles,
                      const AngleVoteConfig& cfg) {
  if (angles.empty()) {
    throw EmptyInput("vote_angle: no angles");
  }
  if (cfg.bins < 4) {
    throw RegistrationError("vote_angle: grid needs at least 4 bins");
  }
  const int s = cfg.bins;
  const double zeta = cfg.zeta();
  const double bin_width = 2.0 * kPi / s;
  const auto center = [&](int k) { return (2.0 * k + 1.0) * kPi / s; };

  // Bins tile the circle; an angle can only fall within zeta of its own bin
  // center or an adjacent one (boundary touches count for both).
  std::vector<std::size_t> counts(s, 0);
  for (double a : angles) {
    const double w = wrap_two_pi(a);
    const int j = std::min(static_cast<int>(w / bin_width), s - 1);
    for (int d = -1; d <= 1; ++d) {
      const int k = (j + d + s) % s;
      if (circular_distance(w, center(k)) <= zeta) ++counts[k];
    }
  }

  int best = 0;
  for (int k = 1; k < s; ++k) {
    if (counts[k] > counts[best]) best = k;
  }

  VoteResult result;
  result.theta_star = center(best);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (circular_distance(wrap_two_pi(angles[i]), result.theta_star) <= zeta) {
      result.inliers.push_back(i);
    }
  }
  return result;
}

double refine_theta(const std::vector<double>& inlier_angles) {
  if (inlier_angles.empty()) {
    throw EmptyInput("refine_theta: no inlier angles");
  }
  double sum_sin = 0.0;
  double sum_cos = 0.0;
  for (double a : inlier_angles) {
    sum_sin += std::sin(a);
    sum_cos += std::cos(a);
  }
  return wrap_two_pi(std::atan2(sum_sin, sum_cos));
}

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

RigidTransform assemble_transform(
    double theta, const PoleResult& pole,
    const std::vector<PlaneCorrespondence>& stage2_inlier_projections,
    const Vec3& t_parallel, const GravityPair& gravity) {
  double theta_eff = theta;
  Vec2 t_perp_hat = Vec2::Zero();

  if (pole.at_infinity) {
    // Pure translation in the plane: robust componentwise median over the
    // stage-II inliers.
    theta_eff = 0.0;
    if (!stage2_inlier_projections.empty()) {
      std::vector<double> dx, dy;
      dx.reserve(stage2_inlier_projections.size());
      dy.reserve(stage2_inlier_projections.size());
      for (const PlaneCorrespondence& pc : stage2_inlier_projections) {
        dx.push_back(pc.q_hat.x() - pc.p_hat.x());
        dy.push_back(pc.q_hat.y() - pc.p_hat.y());
      }
      t_perp_hat = Vec2(median_of(std::move(dx)), median_of(std::move(dy)));
    }
  } else {
    t_perp_hat = (Mat2::Identity() - rotation_2d(theta_eff)) * pole.c0;
  }

  const Mat3 r_theta = rotation_z(theta_eff);
  const Vec3 t_perp_tilde(t_perp_hat.x(), t_perp_hat.y(), 0.0);

  const Mat3 to_ez =
      rotation_between_resolved(gravity.v_q, Vec3(0.0, 0.0, 1.0));
  const Mat3 align = rotation_between_resolved(gravity.v_p, gravity.v_q);

  RigidTransform result;
  // Composition chain of four rotations; project back onto SO(3).
  result.rotation =
      orthonormalized(to_ez.transpose() * r_theta * to_ez * align);
  result.translation = to_ez.transpose() * t_perp_tilde + t_parallel;
  return result;
}

}  // namespace gravreg
