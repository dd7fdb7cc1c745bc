#include "edi/pipeline.hpp"

#include <chrono>

#include "edi/errors.hpp"
#include "edi/preintegration.hpp"

namespace edi {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t us_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
}

}  // namespace

InitResult run_init(const DatasetBundle& bundle, const PipelineConfig& cfg) {
  if (bundle.track.size() < 4) {
    throw InputError("run_init: at least 4 keyframes required");
  }

  EskfParams eskf_params;
  eskf_params.noise.sigma_wn = cfg.gyro_noise_std;
  eskf_params.noise.sigma_ww = cfg.gyro_walk_std;
  eskf_params.noise.V = cfg.obs_rot_var * Mat3::Identity();
  eskf_params.p0_theta_var = cfg.p0_theta_var;
  eskf_params.p0_bg_var = cfg.p0_bg_var;

  InitResult out;
  const auto t0 = Clock::now();

  // Step 1: gyro bias + corrected keyframe rotations.
  GyroBiasEstimate gyro = estimate_gyro_bias(bundle.track, bundle.imu, eskf_params);
  out.bg = gyro.bg;
  out.corrected_R = gyro.corrected_R;
  const auto t1 = Clock::now();

  // Re-integrate every keyframe interval at the estimated bias.
  KeyframeTrack corrected = bundle.track;
  corrected.R_wb = gyro.corrected_R;
  std::vector<PreintegratedDelta> deltas;
  deltas.reserve(corrected.size() - 1);
  for (std::size_t k = 0; k + 1 < corrected.size(); ++k) {
    const auto seg =
        segment_between(bundle.imu, corrected.times[k], corrected.times[k + 1]);
    deltas.push_back(preintegrate(seg, out.bg, Vec3::Zero()));
  }
  const auto t2 = Clock::now();

  // Step 2: linear solve for velocities, gravity, scale.
  out.linear = solve_initial(corrected, bundle.extrinsics, deltas);
  const auto t3 = Clock::now();

  // Step 3: weighted refinement with gravity in its tangent plane.
  RefineOptions opts;
  opts.pcg_iterations = cfg.pcg_iterations;
  opts.irls_passes = cfg.irls_passes;
  opts.lambda_ba = cfg.lambda_ba;
  opts.gravity_mag = cfg.gravity_magnitude;
  out.refined = refine(out.linear, corrected, bundle.extrinsics, deltas, opts);
  const TangentBasis basis =
      tangent_basis(out.linear.g_w.normalized(), cfg.gravity_magnitude);
  out.g_refined = recover_gravity(out.refined, basis);
  const auto t4 = Clock::now();

  out.timing.eskf_us = us_between(t0, t1);
  out.timing.preint_us = us_between(t1, t2);
  out.timing.linear_us = us_between(t2, t3);
  out.timing.refine_us = us_between(t3, t4);
  out.timing.total_us = us_between(t0, t4);
  return out;
}

}  // namespace edi
