#include "edi/simulate.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "edi/errors.hpp"
#include "edi/so3.hpp"

namespace edi {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Independent RNG streams for the IMU and keyframe generators.
constexpr std::uint64_t kImuStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kKeyframeStream = 0xd1b54a32d192ed03ULL;

// Rotation grid substeps per IMU sample interval.
constexpr int kOversample = 8;

// R(t + h) = R(t) * Exp(Omega) with two-point Gauss nodes; fourth order for
// the body-rate system dR/dt = R * skew(omega).
Mat3 magnus_step(const Mat3& R, double t, double h,
                 const std::function<Vec3(double)>& omega) {
  static const double kGaussOff = std::sqrt(3.0) / 6.0;
  const Vec3 w1 = omega(t + (0.5 - kGaussOff) * h);
  const Vec3 w2 = omega(t + (0.5 + kGaussOff) * h);
  const Vec3 Omega = 0.5 * h * (w1 + w2) +
                     (std::sqrt(3.0) / 12.0) * h * h * w1.cross(w2);
  return R * exp_so3(Omega);
}

}  // namespace

Trajectory::Trajectory(const TrajectoryConfig& cfg) : cfg_(cfg) {
  if (cfg_.duration <= 0.0 || cfg_.imu_rate <= 0.0 || cfg_.keyframe_rate <= 0.0) {
    throw InputError("Trajectory: rates and duration must be positive");
  }
  if (cfg_.imu_rate < 10.0 * cfg_.keyframe_rate) {
    throw InputError("Trajectory: imu_rate must be at least 10x keyframe_rate");
  }

  std::mt19937_64 rng(cfg_.seed);
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  for (int i = 0; i < 3; ++i) pos_phase_[i] = uni(rng);
  for (int i = 0; i < 3; ++i) ang_phase_[i] = uni(rng);

  imu_period_ns_ = std::llround(1e9 / cfg_.imu_rate);
  kf_period_ns_ = std::llround(1e9 / cfg_.keyframe_rate);

  grid_h_ = 1.0 / (cfg_.imu_rate * kOversample);
  const int grid_n = static_cast<int>(std::ceil(cfg_.duration / grid_h_)) + 2;
  R_grid_.reserve(grid_n + 1);
  R_grid_.push_back(Mat3::Identity());
  auto omega = [this](double t) { return angular_rate(t); };
  for (int j = 0; j < grid_n; ++j) {
    R_grid_.push_back(magnus_step(R_grid_.back(), j * grid_h_, grid_h_, omega));
  }
}

Vec3 Trajectory::position(double t) const {
  Vec3 p;
  for (int i = 0; i < 3; ++i) {
    p[i] = cfg_.pos_amp[i] * std::sin(kTwoPi * cfg_.pos_freq[i] * t + pos_phase_[i]);
  }
  return p;
}

Vec3 Trajectory::velocity(double t) const {
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    const double w = kTwoPi * cfg_.pos_freq[i];
    v[i] = cfg_.pos_amp[i] * w * std::cos(w * t + pos_phase_[i]);
  }
  return v;
}

Vec3 Trajectory::acceleration(double t) const {
  Vec3 a;
  for (int i = 0; i < 3; ++i) {
    const double w = kTwoPi * cfg_.pos_freq[i];
    a[i] = -cfg_.pos_amp[i] * w * w * std::sin(w * t + pos_phase_[i]);
  }
  return a;
}

Vec3 Trajectory::angular_rate(double t) const {
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    w[i] = cfg_.ang_amp[i] * std::sin(kTwoPi * cfg_.ang_freq[i] * t + ang_phase_[i]);
  }
  return w;
}

Mat3 Trajectory::rotation(double t) const {
  if (t < 0.0) throw InputError("Trajectory::rotation: negative time");
  int j = static_cast<int>(std::floor(t / grid_h_));
  j = std::min(j, static_cast<int>(R_grid_.size()) - 1);
  const double rem = t - j * grid_h_;
  auto omega = [this](double tau) { return angular_rate(tau); };
  if (rem <= 1e-15) return R_grid_[j];
  return magnus_step(R_grid_[j], j * grid_h_, rem, omega);
}

int Trajectory::num_imu_samples() const {
  const auto dur_ns = static_cast<std::int64_t>(std::llround(cfg_.duration * 1e9));
  return static_cast<int>(dur_ns / imu_period_ns_) + 1;
}

int Trajectory::num_keyframes() const {
  const auto dur_ns = static_cast<std::int64_t>(std::llround(cfg_.duration * 1e9));
  return static_cast<int>(dur_ns / kf_period_ns_);
}

double Trajectory::imu_time(int i) const { return (i * imu_period_ns_) * 1e-9; }

double Trajectory::keyframe_time(int k) const { return (k * kf_period_ns_) * 1e-9; }

GroundTruth Trajectory::keyframe_truth() const {
  GroundTruth gt;
  gt.g_w = gravity();
  const int n = num_keyframes();
  gt.times.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = keyframe_time(k);
    gt.times.push_back(t);
    gt.R_wb.push_back(rotation(t));
    gt.p_wb.push_back(position(t));
    gt.v_wb.push_back(velocity(t));
  }
  return gt;
}

std::vector<ImuSample> gen_imu(const Trajectory& traj, const NoiseConfig& noise) {
  std::mt19937_64 rng(traj.config().seed ^ kImuStream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto normal3 = [&]() { return Vec3(gauss(rng), gauss(rng), gauss(rng)); };

  const Vec3 g_w = traj.gravity();
  const int n = traj.num_imu_samples();
  Vec3 gyro_walk = Vec3::Zero();
  Vec3 accel_walk = Vec3::Zero();
  double t_prev = 0.0;

  std::vector<ImuSample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = traj.imu_time(i);
    if (i > 0) {
      const double sq = std::sqrt(t - t_prev);
      gyro_walk += noise.gyro_walk_std * sq * normal3();
      accel_walk += noise.accel_walk_std * sq * normal3();
    }
    ImuSample s;
    s.t = t;
    s.omega = traj.angular_rate(t) + noise.bg_true + gyro_walk +
              noise.gyro_noise_std * normal3();
    s.accel = traj.rotation(t).transpose() * (traj.acceleration(t) - g_w) +
              noise.ba_true + accel_walk + noise.accel_noise_std * normal3();
    samples.push_back(s);
    t_prev = t;
  }
  return samples;
}

SimulatedKeyframes gen_keyframes(const Trajectory& traj, double s_true,
                                 const NoiseConfig& noise,
                                 const Extrinsics& extrinsics) {
  if (!(s_true > 0.0)) throw InputError("gen_keyframes: s_true must be positive");

  std::mt19937_64 rng(traj.config().seed ^ kKeyframeStream);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SimulatedKeyframes out;
  const int n = traj.num_keyframes();
  for (int k = 0; k < n; ++k) {
    const double t = traj.keyframe_time(k);
    const Mat3 R_wb = traj.rotation(t);
    const Vec3 p_wc = traj.position(t) + R_wb * extrinsics.p_bc;

    Mat3 r_obs = R_wb;
    if (noise.rot_obs_noise_std > 0.0) {
      const Vec3 n_rot = noise.rot_obs_noise_std *
                         Vec3(gauss(rng), gauss(rng), gauss(rng));
      r_obs = R_wb * exp_so3(n_rot);
    }
    out.track.times.push_back(t);
    out.track.R_wb.push_back(r_obs);
    out.track.p_wc_bar.push_back(p_wc / s_true);
    out.observations.push_back(OrientationObservation{t, r_obs});
  }
  return out;
}

}  // namespace edi
