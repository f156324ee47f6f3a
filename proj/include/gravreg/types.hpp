#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gravreg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform q = R p + t. The rotation is kept as a plain 3x3 matrix;
/// there is no quaternion anywhere in the public surface.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// Unit gravity directions observed in the source (v_p) and target (v_q)
/// frames. A valid registration must map v_p onto v_q.
struct GravityPair {
  Vec3 v_p = Vec3(0.0, 0.0, -1.0);
  Vec3 v_q = Vec3(0.0, 0.0, -1.0);
};

struct Correspondence {
  Vec3 p;
  Vec3 q;
};

/// Putative point-to-point correspondences plus the gravity prior.
struct CorrespondenceSet {
  std::vector<Correspondence> pairs;
  GravityPair gravity;

  std::size_t size() const { return pairs.size(); }
};

/// Raw source/target clouds for the correspondence-free mode.
struct PointCloudPair {
  std::vector<Vec3> source;
  std::vector<Vec3> target;
  GravityPair gravity;
};

// ---------------------------------------------------------------------------
// Error types

class RegistrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rotation between two directions is requested for (near-)antipodal inputs;
/// the minimal-geodesic axis is undefined.
class AntipodalInput : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

class EmptyInput : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

/// No usable consensus set was found.
class NoConsensus : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

/// A projected point coincides with the pole; its rotation angle is undefined.
class DegeneratePoint : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

class ParseError : public RegistrationError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : RegistrationError(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

class IndexOutOfRange : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

class UnsupportedFormat : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

class IoError : public RegistrationError {
 public:
  using RegistrationError::RegistrationError;
};

}  // namespace gravreg
