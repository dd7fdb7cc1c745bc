#pragma once

#include <span>
#include <utility>
#include <vector>

#include "edi/types.hpp"

namespace edi {

// Nominal state: world-frame body orientation and gyroscope bias.
struct EskfNominal {
  Mat3 R = Mat3::Identity();
  Vec3 bg = Vec3::Zero();
};

// Error state [dtheta; dbg] with covariance P. The mean is kept at zero:
// every update injects the estimated error into the nominal state and resets.
struct EskfError {
  Vec3 dtheta = Vec3::Zero();
  Vec3 dbg = Vec3::Zero();
  Mat6 P = Mat6::Zero();
};

struct EskfNoise {
  double sigma_wn = 1.7e-4;          // gyro white noise, rad/s
  double sigma_ww = 2e-5;            // gyro random walk, rad/(s*sqrt(s))
  Mat3 V = 1e-6 * Mat3::Identity();  // orientation observation noise, rad^2
};

struct EskfParams {
  EskfNoise noise;
  double p0_theta_var = 1e-4;  // rad^2
  double p0_bg_var = 1e-2;     // (rad/s)^2
};

// Propagate nominal orientation and error covariance through a gyro segment
// spanning dt. The segment timestamps must cover dt; the angular rate is
// averaged between consecutive samples and the transition composed per
// sub-step. Throws InputError on dt <= 0, an empty segment, or a non-reset
// error state.
std::pair<EskfNominal, EskfError> predict(const EskfNominal& state,
                                          const EskfError& err,
                                          const EskfNoise& noise,
                                          std::span<const ImuSample> gyro,
                                          double dt);

// Fuse one orientation observation: Kalman update on the error state,
// injection into the nominal state, then reset (covariance kept).
// Throws NumericError when the innovation covariance is near-singular.
std::pair<EskfNominal, EskfError> update(const EskfNominal& state,
                                         const EskfError& err,
                                         const EskfNoise& noise,
                                         const OrientationObservation& obs);

struct GyroBiasEstimate {
  Vec3 bg = Vec3::Zero();
  std::vector<Mat3> corrected_R;  // post-injection orientation per keyframe
};

// Run the filter over a keyframe window: predict between keyframes through
// the IMU stream, update at each keyframe orientation. The bias from the
// last update is the window estimate. Throws InputError on fewer than 2
// keyframes, an uncovered window, or IMU gaps above twice the nominal period.
GyroBiasEstimate estimate_gyro_bias(const KeyframeTrack& track,
                                    std::span<const ImuSample> imu,
                                    const EskfParams& params);

}  // namespace edi
