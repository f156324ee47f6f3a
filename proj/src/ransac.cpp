#include "gravreg/ransac.hpp"

#include <algorithm>
#include <cmath>

#include "gravreg/geometry.hpp"
#include "gravreg/rng.hpp"

namespace gravreg {

namespace {

struct AlignedPoint {
  double px, py, pz;
  double qx, qy, qz;
};

std::size_t count_model_inliers(const std::vector<AlignedPoint>& pts,
                                double theta, const Vec3& t, double eps2,
                                std::vector<std::size_t>* out) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::size_t count = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const AlignedPoint& a = pts[k];
    const double rx = c * a.px - s * a.py + t.x() - a.qx;
    const double ry = s * a.px + c * a.py + t.y() - a.qy;
    const double rz = a.pz + t.z() - a.qz;
    if (rx * rx + ry * ry + rz * rz <= eps2) {
      ++count;
      if (out) out->push_back(k);
    }
  }
  return count;
}

}  // namespace

RansacResult ransac_baseline(const CorrespondenceSet& c,
                             const RansacConfig& cfg) {
  const std::size_t n = c.size();
  if (n < 2) {
    throw EmptyInput("ransac_baseline: need at least 2 correspondences");
  }

  // Work in the frame where the gravity axis is e_z: the model reduces to a
  // z-rotation plus translation and residual norms are unchanged.
  const Mat3 align = rotation_between_resolved(c.gravity.v_p, c.gravity.v_q);
  const Mat3 to_ez =
      rotation_between_resolved(c.gravity.v_q, Vec3(0.0, 0.0, 1.0));
  const Mat3 source_map = to_ez * align;

  std::vector<AlignedPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = source_map * c.pairs[i].p;
    const Vec3 b = to_ez * c.pairs[i].q;
    pts[i] = {a.x(), a.y(), a.z(), b.x(), b.y(), b.z()};
  }

  Rng rng(cfg.seed);
  const double eps2 = cfg.epsilon * cfg.epsilon;

  std::size_t best_count = 0;
  double best_theta = 0.0;
  Vec3 best_t = Vec3::Zero();

  RansacResult result;
  for (std::uint64_t it = 0; it < cfg.max_iterations; ++it) {
    ++result.iterations_run;
    const std::size_t i = rng.bounded(n);
    std::size_t j = rng.bounded(n - 1);
    if (j >= i) ++j;

    const double dax = pts[j].px - pts[i].px;
    const double day = pts[j].py - pts[i].py;
    const double dbx = pts[j].qx - pts[i].qx;
    const double dby = pts[j].qy - pts[i].qy;
    const double na = dax * dax + day * day;
    const double nb = dbx * dbx + dby * dby;
    if (na < 1e-18 || nb < 1e-18) continue;  // degenerate sample

    const double theta =
        std::atan2(dax * dby - day * dbx, dax * dbx + day * dby);
    const double cth = std::cos(theta);
    const double sth = std::sin(theta);
    const Vec3 t(pts[i].qx - (cth * pts[i].px - sth * pts[i].py),
                 pts[i].qy - (sth * pts[i].px + cth * pts[i].py),
                 pts[i].qz - pts[i].pz);

    const std::size_t count =
        count_model_inliers(pts, theta, t, eps2, nullptr);
    if (count > best_count) {
      best_count = count;
      best_theta = theta;
      best_t = t;
    }
  }

  if (best_count <= 2) {
    throw NoConsensus("ransac_baseline: no model exceeds 2 inliers");
  }

  // Refit on the best consensus set: closed-form 1-DOF angle from centered
  // planar coordinates, translation from the means.
  std::vector<std::size_t> consensus;
  count_model_inliers(pts, best_theta, best_t, eps2, &consensus);

  double mpx = 0.0, mpy = 0.0, mpz = 0.0, mqx = 0.0, mqy = 0.0, mqz = 0.0;
  for (std::size_t k : consensus) {
    mpx += pts[k].px;
    mpy += pts[k].py;
    mpz += pts[k].pz;
    mqx += pts[k].qx;
    mqy += pts[k].qy;
    mqz += pts[k].qz;
  }
  const double inv = 1.0 / static_cast<double>(consensus.size());
  mpx *= inv;
  mpy *= inv;
  mpz *= inv;
  mqx *= inv;
  mqy *= inv;
  mqz *= inv;

  double sum_cross = 0.0;
  double sum_dot = 0.0;
  for (std::size_t k : consensus) {
    const double ax = pts[k].px - mpx;
    const double ay = pts[k].py - mpy;
    const double bx = pts[k].qx - mqx;
    const double by = pts[k].qy - mqy;
    sum_cross += ax * by - ay * bx;
    sum_dot += ax * bx + ay * by;
  }
  const double theta_fit = std::atan2(sum_cross, sum_dot);
  const double cf = std::cos(theta_fit);
  const double sf = std::sin(theta_fit);
  const Vec3 t_fit(mqx - (cf * mpx - sf * mpy), mqy - (sf * mpx + cf * mpy),
                   mqz - mpz);

  result.inliers.clear();
  count_model_inliers(pts, theta_fit, t_fit, eps2, &result.inliers);

  result.transform.rotation = orthonormalized(
      to_ez.transpose() * rotation_z(theta_fit) * source_map);
  result.transform.translation = to_ez.transpose() * t_fit;
  return result;
}

}  // namespace gravreg
