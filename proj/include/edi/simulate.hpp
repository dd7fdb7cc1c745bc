#pragma once

#include <cstdint>
#include <vector>

#include "edi/types.hpp"

namespace edi {

// Sinusoidal excitation per axis; defaults keep the midpoint integration
// error of a 200 Hz stream well below the exact-recovery tolerances while
// still exciting scale, gravity and bias observability.
struct TrajectoryConfig {
  double duration = 1.0;       // s
  double imu_rate = 200.0;     // Hz
  double keyframe_rate = 10.0; // Hz
  Vec3 pos_amp{1.30, 1.00, 1.15};    // m
  Vec3 pos_freq{0.084, 0.105, 0.070}; // Hz
  Vec3 ang_amp{0.15, 0.13, 0.11};    // rad/s
  Vec3 ang_freq{0.060, 0.085, 0.070}; // Hz
  double gravity_mag = 9.81;
  std::uint64_t seed = 1;
};

struct NoiseConfig {
  double gyro_noise_std = 0.0;   // rad/s, per sample
  double gyro_walk_std = 0.0;    // rad/(s*sqrt(s))
  double accel_noise_std = 0.0;  // m/s^2, per sample
  double accel_walk_std = 0.0;   // m/(s^2*sqrt(s))
  Vec3 bg_true = Vec3::Zero();   // rad/s
  Vec3 ba_true = Vec3::Zero();   // m/s^2
  double rot_obs_noise_std = 0.0;  // rad, per axis on keyframe orientations
};

// World-frame state at the keyframes plus the constants needed to score an
// estimate against it.
struct GroundTruth {
  std::vector<double> times;
  std::vector<Mat3> R_wb;
  std::vector<Vec3> p_wb;  // metric
  std::vector<Vec3> v_wb;
  Vec3 g_w = Vec3(0.0, 0.0, -9.81);
  double s_true = 1.0;
  Vec3 bg_true = Vec3::Zero();
  Vec3 ba_true = Vec3::Zero();
};

// Smooth trajectory with analytic position/velocity/acceleration and a
// rotation integrated from the body angular rate on a fine grid (two-point
// Gauss Magnus steps). Deterministic for a fixed seed.
class Trajectory {
 public:
  explicit Trajectory(const TrajectoryConfig& cfg);

  const TrajectoryConfig& config() const { return cfg_; }

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
  Vec3 angular_rate(double t) const;  // body frame
  Mat3 rotation(double t) const;      // R^w_b

  Vec3 gravity() const { return Vec3(0.0, 0.0, -cfg_.gravity_mag); }

  int num_imu_samples() const;
  int num_keyframes() const;
  double imu_time(int i) const;
  double keyframe_time(int k) const;

  // Keyframe-sampled ground truth (s_true/biases left at defaults).
  GroundTruth keyframe_truth() const;

 private:
  TrajectoryConfig cfg_;
  Vec3 pos_phase_ = Vec3::Zero();
  Vec3 ang_phase_ = Vec3::Zero();
  std::int64_t imu_period_ns_ = 0;
  std::int64_t kf_period_ns_ = 0;
  double grid_h_ = 0.0;
  std::vector<Mat3> R_grid_;
};

// Raw IMU stream sampled at the configured rate: biases, random walk and
// white noise applied on top of the true rates/specific force.
std::vector<ImuSample> gen_imu(const Trajectory& traj, const NoiseConfig& noise);

struct SimulatedKeyframes {
  KeyframeTrack track;  // R_wb holds the (possibly noisy) body observations
  std::vector<OrientationObservation> observations;
};

// Up-to-scale camera positions and body orientation observations, with the
// configured per-axis rotation noise composed onto the true orientations.
SimulatedKeyframes gen_keyframes(const Trajectory& traj, double s_true,
                                 const NoiseConfig& noise,
                                 const Extrinsics& extrinsics);

}  // namespace edi
