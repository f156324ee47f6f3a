#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "gravreg/types.hpp"

namespace gravreg {

/// A correspondence projected onto the plane through the origin and
/// perpendicular to the (aligned) gravity axis.
struct PlaneCorrespondence {
  Vec2 p_hat = Vec2::Zero();
  Vec2 q_hat = Vec2::Zero();
  std::size_t owner = 0;  // index into the original correspondence set
};

/// Perpendicular bisector of the segment p_hat q_hat as a line
/// a x + b y + c = 0, stored with homogeneous coefficients n = [a, b, c].
struct BisectorLine {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::size_t owner = 0;
  bool degenerate = false;  // |(a, b)| below the degeneracy threshold

  double norm() const { return std::sqrt(a * a + b * b + c * c); }
};

inline constexpr double kBisectorDegeneracy = 1e-12;

/// Square sub-region of the exponential-mapping plane.
struct PoleBranch {
  Vec2 center = Vec2::Zero();
  double half_side = 0.0;
  std::size_t upper = 0;
  std::size_t lower = 0;
};

struct BnbConfig {
  double gamma_min = 1e-6;  // stop refining below this branch half-side
  double w_min = 1e-6;      // pole-at-infinity detection threshold
  std::uint64_t max_expansions = 10'000'000;
  int threads = 1;
  // Called for every branch the search expands, with bounds filled in.
  std::function<void(const PoleBranch&)> on_expand;
};

struct BnbStats {
  std::uint64_t branches_expanded = 0;
  std::size_t final_gap = 0;  // global upper - best lower at termination
};

struct PoleResult {
  // Refined pole estimate handed to stage III (unit, w >= 0).
  Vec3 c_hat = Vec3(0.0, 0.0, 1.0);
  bool at_infinity = false;
  Vec2 c0 = Vec2::Zero();  // dehomogenized c_hat, valid when !at_infinity
  // Count-optimal branch-center witness found by the search. `inliers` is
  // its consensus set, so |inliers| equals the certified optimum even when
  // the refined pole sits a hair outside the count-maximal sliver.
  Vec3 witness = Vec3(0.0, 0.0, 1.0);
  std::vector<std::size_t> inliers;  // indices into the line array, sorted
  BnbStats stats;
};

/// Projects the selected correspondences: rotate p'_i and q_i into the frame
/// where the gravity axis is e_z, then drop the z component.
std::vector<PlaneCorrespondence> project_to_plane(
    const CorrespondenceSet& c, const std::vector<std::size_t>& inliers);

/// Perpendicular bisector coefficients: a = x_q - x_p, b = y_q - y_p,
/// c = -((x_p + x_q)/2 a + (y_p + y_q)/2 b).
BisectorLine bisector(const PlaneCorrespondence& pc);

/// Upper/lower consensus bounds for a branch evaluated at its center
/// h_c = exp_map(center):
///   lower counts |n_i^T h_c| <= tau,
///   upper counts |n_i^T h_c| <= Psi_i with
///   Psi_i = |n_i| sin(sqrt(2) gamma + xi_i) while the argument stays below
///   pi/2 and |n_i| otherwise, xi_i = arcsin(tau / |n_i|).
/// Lines with |n_i| <= tau are satisfiable everywhere and count in both.
std::pair<std::size_t, std::size_t> bnb_bounds(
    const PoleBranch& branch, const std::vector<BisectorLine>& lines,
    double tau);

/// Consensus count at a specific hemisphere point (the lower-bound rule).
std::size_t count_pole_inliers(const Vec3& h,
                               const std::vector<BisectorLine>& lines,
                               double tau);

/// Best-first branch-and-bound over the circumscribed square (half-side
/// pi/2) of the exponential-map disk. Deterministic: ties on the upper bound
/// break toward larger half-side, then insertion order; each expansion
/// splits a square into 4 equal children in a fixed order.
///
/// The returned witness is sharpened by polish_pole_witness(): the
/// count-optimal consensus certificate is unchanged, only the reported pole
/// moves to the center of the consensus region.
PoleResult bnb_search(const std::vector<BisectorLine>& lines, double tau,
                      const BnbConfig& cfg);

/// Deterministic pattern search in the exponential chart that minimizes the
/// trimmed maximum residual over the witness's inlier set (trim ~5%, at
/// least one line, so coincidental in-band outliers cannot drag the pole).
/// A move is accepted only if the full consensus count at tau does not drop,
/// which keeps the branch-and-bound optimality certificate intact. Any
/// branch-center witness sits anywhere inside the consensus region, i.e. up
/// to O(tau) away from the region center; centering removes that bias.
Vec3 polish_pole_witness(const Vec3& h0, const std::vector<BisectorLine>& lines,
                         double tau);

/// Dehomogenize: C0 = (c_x / w, c_y / w) when |w| >= w_min, otherwise the
/// pole lies at infinity (pure-translation motion).
std::optional<Vec2> recover_pole(const Vec3& c_hat, double w_min);

}  // namespace gravreg
