#pragma once

#include <optional>
#include <string>

#include "gravreg/pipeline.hpp"
#include "gravreg/types.hpp"

namespace gravreg {

enum class CloudFormat { kAuto, kXyz, kPlyAscii };

/// XYZ: one "x y z" triple per line, '#' comments and blank lines ignored.
/// PLY: ASCII only (binary rejected with UnsupportedFormat); the x/y/z float
/// properties of the vertex element are extracted, everything else skipped.
/// kAuto picks PLY for a ".ply" extension, XYZ otherwise.
std::vector<Vec3> read_cloud(const std::string& path,
                             CloudFormat format = CloudFormat::kAuto);

/// Writes XYZ at 17 significant digits (lossless round trip).
void write_cloud_xyz(const std::string& path, const std::vector<Vec3>& points);

/// Correspondence file: either 6 columns "px py pz qx qy qz" per line, or
/// 2 columns "i j" of 0-based indices into the two clouds (which must then
/// be supplied). '#' comments and blank lines ignored. Gravity is filled by
/// the caller.
CorrespondenceSet read_correspondences(
    const std::string& path, const std::vector<Vec3>* source = nullptr,
    const std::vector<Vec3>* target = nullptr);

void write_correspondences(const std::string& path,
                           const CorrespondenceSet& c);

/// Flat key-value result report. Timings are optional: they are excluded by
/// default so that result files are byte-identical across reruns and thread
/// counts (the determinism contract); pass with_timings to include them.
struct ResultRecord {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double theta_star = 0.0;
  double l_star = 0.0;
  std::size_t inliers_stage1 = 0;
  std::size_t inliers_stage2 = 0;
  std::size_t inliers_stage3 = 0;
  std::optional<StageTimings> timings;
};

ResultRecord to_record(const RegistrationResult& result);

/// Values at 17 significant digits; written to a temporary file first and
/// renamed into place, so failures leave no partial output.
void write_result(const ResultRecord& record, const std::string& path,
                  bool with_timings = false);

ResultRecord read_result(const std::string& path);

/// Truth file: "rotation" + "translation" lines in the result format.
void write_truth(const std::string& path, const RigidTransform& truth);
RigidTransform read_truth(const std::string& path);

}  // namespace gravreg
