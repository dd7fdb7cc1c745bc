#pragma once

#include <span>
#include <vector>

#include "edi/types.hpp"

namespace edi {

// Relative motion between two keyframes integrated from raw IMU samples:
// dp, dv and the internal rotation increment dR, together with the Jacobians
// of dp/dv with respect to the accelerometer bias used.
struct PreintegratedDelta {
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Mat3 dR = Mat3::Identity();
  double dt = 0.0;
  Mat3 J_dp_dba = Mat3::Zero();
  Mat3 J_dv_dba = Mat3::Zero();
  Vec3 bg_used = Vec3::Zero();
  Vec3 ba_used = Vec3::Zero();
};

// Midpoint-rule integration of a sample stream at the given bias estimates.
// Between consecutive samples the angular rate and specific force are
// averaged and applied at the sub-step's midpoint rotation. Throws
// InputError on fewer than 2 samples or non-monotonic timestamps.
PreintegratedDelta preintegrate(std::span<const ImuSample> samples,
                                const Vec3& bg, const Vec3& ba);

// Exact re-integration of the same sample stream at a new gyroscope bias
// (not a first-order correction); the accelerometer bias is kept.
PreintegratedDelta repreintegrate(const PreintegratedDelta& delta,
                                  std::span<const ImuSample> samples,
                                  const Vec3& bg_new);

// Standard composition of two consecutive deltas (second starts where the
// first ends, same biases).
PreintegratedDelta compose(const PreintegratedDelta& a,
                           const PreintegratedDelta& b);

// Samples covering [t0, t1] with boundary samples linearly interpolated at
// t0 and t1 when the stream does not sample those instants exactly.
// Throws InputError when the stream does not cover the interval.
std::vector<ImuSample> segment_between(std::span<const ImuSample> samples,
                                       double t0, double t1);

}  // namespace edi
