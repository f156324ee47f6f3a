#pragma once

#include "gravreg/types.hpp"

namespace gravreg {

inline constexpr double kPi = 3.14159265358979323846;

/// Dot-product threshold below which two unit vectors are treated as
/// antipodal and the minimal-geodesic axis is considered undefined.
inline constexpr double kAntipodalDot = -1.0 + 1e-9;

/// Rodrigues rotation of `angle` radians about a unit `axis`.
Mat3 rotation_about_axis(const Vec3& axis, double angle);

/// Rotation taking unit vector `a` onto unit vector `b` along the minimal
/// geodesic (axis perpendicular to both). Throws AntipodalInput when
/// a . b < -1 + 1e-9; callers that must handle antipodal pairs use
/// rotation_between_resolved().
Mat3 rotation_minimal_geodesic(const Vec3& a, const Vec3& b);

/// For a (near-)antipodal direction pair the minimal-geodesic axis is
/// undefined; this returns the deterministic fallback axis: the normalized
/// cross product of `v` with the standard basis vector whose component in
/// `v` has the smallest magnitude (lowest index on ties).
Vec3 antipodal_fallback_axis(const Vec3& v);

/// Like rotation_minimal_geodesic but never throws: near-antipodal pairs are
/// resolved by first rotating pi about antipodal_fallback_axis(a) and then
/// closing the (well-conditioned) remaining gap. Still satisfies R a = b.
Mat3 rotation_between_resolved(const Vec3& a, const Vec3& b);

/// Nearest rotation matrix in the Frobenius sense (SVD projection). Used to
/// keep composition chains orthonormal.
Mat3 orthonormalized(const Mat3& m);

struct ScrewParts {
  Vec3 screw_image;  // point reached by the screw rotation alone
  Vec3 t_parallel;   // translation along the screw axis
};

/// Splits T(p) = R p + t into the screw-rotation image and the axis-parallel
/// translation: t_parallel = (axis . t) axis and screw_image = T(p) - t_parallel,
/// so that screw_image + t_parallel recomposes T(p).
ScrewParts screw_decompose(const RigidTransform& t, const Vec3& axis,
                           const Vec3& p);

/// Exponential mapping from the plane onto the upper unit hemisphere:
/// omega = |phi| (clamped to pi/2), h = [sin(omega) phi/|phi|, cos(omega)].
/// phi = 0 maps to (0, 0, 1). Inputs outside the pi/2 disk (legal for branch
/// centers of the circumscribed square) are clamped to the equator.
Vec3 exp_map(const Vec2& phi);

/// Rotation about the z axis.
Mat3 rotation_z(double angle);

/// 2D rotation matrix.
Mat2 rotation_2d(double angle);

}  // namespace gravreg
