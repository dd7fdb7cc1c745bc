#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace edi {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// One raw IMU measurement. Timestamps are seconds relative to the first
// sample of the stream; omega is the raw gyroscope rate (rad/s), accel the
// raw specific force (m/s^2).
struct ImuSample {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

// Known camera-to-body rigid transform [R_bc | p_bc].
struct Extrinsics {
  Mat3 R_bc = Mat3::Identity();
  Vec3 p_bc = Vec3::Zero();
};

// Orientation of the body frame reported by the external pose source at a
// keyframe (extrinsics already applied).
struct OrientationObservation {
  double t = 0.0;
  Mat3 r_wb = Mat3::Identity();
};

// Keyframe window used by the alignment steps: timestamps, world-frame body
// orientations and up-to-scale camera positions.
struct KeyframeTrack {
  std::vector<double> times;
  std::vector<Mat3> R_wb;      // body orientation R^w_b per keyframe
  std::vector<Vec3> p_wc_bar;  // up-to-scale camera position per keyframe

  std::size_t size() const { return times.size(); }
};

}  // namespace edi
