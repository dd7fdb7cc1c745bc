#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edi/simulate.hpp"
#include "edi/types.hpp"

namespace edi {

// Everything the pipeline and the evaluation read from a config file.
// Every key has a default; an empty file is a valid config.
struct PipelineConfig {
  // ESKF (step 1)
  double gyro_noise_std = 1.7e-4;  // rad/s
  double gyro_walk_std = 2e-5;     // rad/(s*sqrt(s))
  double obs_rot_var = 1e-6;       // rad^2, isotropic observation noise
  double p0_theta_var = 1e-4;      // rad^2
  double p0_bg_var = 1e-2;         // (rad/s)^2
  // Solvers (steps 2-3)
  double gravity_magnitude = 9.81;
  int pcg_iterations = 4;
  int irls_passes = 2;
  double lambda_ba = 0.0;
  int window_size = 10;
  Extrinsics extrinsics;
  // Simulator
  TrajectoryConfig sim;
  NoiseConfig sim_noise;
  double sim_scale = 1.0;
  // Sweep axes
  std::vector<double> sweep_rot_noise = {0.0, 0.1};
  std::vector<int> sweep_window = {10};
  int sweep_seeds = 20;
};

// Parse a key-value config; unknown keys warn on stderr (suppressed by
// EDI_LOG=quiet), malformed values throw InputError with the line number.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(std::istream& in, const std::string& origin);

// Full snapshot of a config, parse-roundtrip exact.
void write_config(const std::string& path, const PipelineConfig& cfg);

// EuRoC-style CSV `timestamp_ns,wx,wy,wz,ax,ay,az`; '#' headers allowed.
// Timestamps become seconds relative to the first sample; the first raw
// nanosecond stamp is reported through epoch_ns when given.
std::vector<ImuSample> load_imu_csv(const std::string& path,
                                    std::int64_t* epoch_ns = nullptr);
void write_imu_csv(const std::string& path, std::span<const ImuSample> samples,
                   std::int64_t epoch_ns = 0);

// TUM trajectory rows `t tx ty tz qx qy qz qw` (camera or body poses).
struct TrajectoryFile {
  std::vector<double> times;
  std::vector<Vec3> positions;
  std::vector<Mat3> rotations;
};
TrajectoryFile load_trajectory(const std::string& path);
void write_trajectory(const std::string& path, const TrajectoryFile& traj);

// Aligned inputs of one initialization run.
struct DatasetBundle {
  std::vector<ImuSample> imu;
  KeyframeTrack track;  // R_wb holds body-frame orientation observations
  std::vector<OrientationObservation> observations;
  Extrinsics extrinsics;
  std::optional<GroundTruth> ground_truth;
};

// Select keyframes from a (possibly dense) camera trajectory at the
// configured keyframe rate, convert orientations to the body frame via the
// extrinsics and clip to the configured window size. Absolute trajectory
// timestamps are shifted onto the IMU time base using epoch_ns.
DatasetBundle make_bundle(std::vector<ImuSample> imu, std::int64_t epoch_ns,
                          const TrajectoryFile& camera_traj,
                          const PipelineConfig& cfg);

// Ground truth as written by the simulator: body poses in groundtruth.txt
// plus scale/gravity/bias/velocity truth in sim_truth.json (optional; real
// datasets typically provide poses only).
struct LoadedTruth {
  GroundTruth gt;
  bool has_inertial = false;
};
LoadedTruth load_ground_truth(const std::string& dir);
void write_ground_truth(const std::string& dir, const GroundTruth& gt);

}  // namespace edi
