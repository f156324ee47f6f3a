#include "gravreg/geometry.hpp"

#include <cmath>

namespace gravreg {

Mat3 rotation_about_axis(const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 k;
  k << 0.0, -axis.z(), axis.y(),
       axis.z(), 0.0, -axis.x(),
       -axis.y(), axis.x(), 0.0;
  return Mat3::Identity() + s * k + (1.0 - c) * k * k;
}

Mat3 rotation_minimal_geodesic(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b);
  if (c < kAntipodalDot) {
    throw AntipodalInput("rotation_minimal_geodesic: inputs are antipodal");
  }
  const Vec3 w = a.cross(b);
  Mat3 k;
  k << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  // R = I + [w]x + [w]x^2 / (1 + c); singular only at c = -1.
  return Mat3::Identity() + k + k * k / (1.0 + c);
}

Vec3 antipodal_fallback_axis(const Vec3& v) {
  int smallest = 0;
  double best = std::abs(v[0]);
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i]) < best) {
      best = std::abs(v[i]);
      smallest = i;
    }
  }
  Vec3 basis = Vec3::Zero();
  basis[smallest] = 1.0;
  return v.cross(basis).normalized();
}

Mat3 rotation_between_resolved(const Vec3& a, const Vec3& b) {
  if (a.dot(b) >= kAntipodalDot) {
    return rotation_minimal_geodesic(a, b);
  }
  // Rotate pi about a fixed perpendicular axis, then close the small
  // remaining gap between -a and b with the well-conditioned construction.
  const Mat3 flip = rotation_about_axis(antipodal_fallback_axis(a), kPi);
  const Vec3 a_flipped = flip * a;
  return rotation_minimal_geodesic(a_flipped, b) * flip;
}

Mat3 orthonormalized(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 d = Mat3::Identity();
    d(2, 2) = -1.0;
    r = svd.matrixU() * d * svd.matrixV().transpose();
  }
  return r;
}

ScrewParts screw_decompose(const RigidTransform& t, const Vec3& axis,
                           const Vec3& p) {
  ScrewParts parts;
  parts.t_parallel = axis.dot(t.translation) * axis;
  parts.screw_image = t.apply(p) - parts.t_parallel;
  return parts;
}

Vec3 exp_map(const Vec2& phi) {
  double omega = phi.norm();
  if (omega <= 0.0) {
    return Vec3(0.0, 0.0, 1.0);
  }
  const Vec2 dir = phi / omega;
  if (omega > kPi / 2.0) {
    omega = kPi / 2.0;
  }
  const double s = std::sin(omega);
  return Vec3(s * dir.x(), s * dir.y(), std::cos(omega));
}

Mat3 rotation_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Mat2 rotation_2d(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, -s,
       s, c;
  return r;
}

}  // namespace gravreg
