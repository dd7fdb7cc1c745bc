#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edi/errors.hpp"
#include "edi/preintegration.hpp"
#include "edi/simulate.hpp"
#include "edi/so3.hpp"
#include "test_utils.hpp"

using namespace edi;
using test_util::make_rng;
using test_util::random_vec3;

namespace {

std::vector<ImuSample> rest_stream(double duration, double rate) {
  std::vector<ImuSample> s;
  const int n = static_cast<int>(duration * rate) + 1;
  for (int i = 0; i < n; ++i) {
    s.push_back(ImuSample{i / rate, Vec3::Zero(), Vec3(0, 0, 9.81)});
  }
  return s;
}

// Eq-style residuals of one keyframe interval against simulator truth.
double dv_residual(const PreintegratedDelta& d, const GroundTruth& gt, int k) {
  const Mat3 R_bk_w = gt.R_wb[k].transpose();
  const double dt = d.dt;
  return (d.dv - R_bk_w * (gt.v_wb[k + 1] - gt.v_wb[k] - gt.g_w * dt)).norm();
}

double dp_residual(const PreintegratedDelta& d, const GroundTruth& gt, int k) {
  const Mat3 R_bk_w = gt.R_wb[k].transpose();
  const double dt = d.dt;
  return (d.dp - R_bk_w * (gt.p_wb[k + 1] - gt.p_wb[k] - gt.v_wb[k] * dt -
                           0.5 * gt.g_w * dt * dt))
      .norm();
}

}  // namespace

TEST_CASE("rest case integrates gravity exactly") {
  const auto samples = rest_stream(0.5, 200.0);
  const auto d = preintegrate(samples, Vec3::Zero(), Vec3::Zero());
  CHECK(d.dt == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((d.dv - Vec3(0, 0, 4.905)).norm() < 1e-12);
  CHECK((d.dp - Vec3(0, 0, 1.22625)).norm() < 1e-12);
  CHECK((d.dR - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("input validation") {
  std::vector<ImuSample> one{ImuSample{0.0, Vec3::Zero(), Vec3::Zero()}};
  CHECK_THROWS_AS(preintegrate(one, Vec3::Zero(), Vec3::Zero()), InputError);

  std::vector<ImuSample> bad{ImuSample{0.0, Vec3::Zero(), Vec3::Zero()},
                             ImuSample{0.2, Vec3::Zero(), Vec3::Zero()},
                             ImuSample{0.1, Vec3::Zero(), Vec3::Zero()}};
  CHECK_THROWS_AS(preintegrate(bad, Vec3::Zero(), Vec3::Zero()), InputError);
}

TEST_CASE("accel-bias Jacobians match central differences") {
  TrajectoryConfig cfg;
  cfg.seed = 3;
  const Trajectory traj(cfg);
  const auto imu = gen_imu(traj, NoiseConfig{});
  const auto seg = segment_between(imu, 0.2, 0.3);

  const Vec3 bg(0.01, -0.02, 0.005);
  const Vec3 ba(0.03, 0.01, -0.02);
  const auto d0 = preintegrate(seg, bg, ba);

  const double h = 1e-4;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 e = Vec3::Zero();
    e[axis] = h;
    const auto dp = preintegrate(seg, bg, ba + e);
    const auto dm = preintegrate(seg, bg, ba - e);
    const Vec3 col_dv = (dp.dv - dm.dv) / (2.0 * h);
    const Vec3 col_dp = (dp.dp - dm.dp) / (2.0 * h);
    CHECK((col_dv - d0.J_dv_dba.col(axis)).norm() <
          1e-4 * std::max(1.0, d0.J_dv_dba.col(axis).norm()));
    CHECK((col_dp - d0.J_dp_dba.col(axis)).norm() <
          1e-4 * std::max(1.0, d0.J_dp_dba.col(axis).norm()));
  }

  // First-order prediction against a re-run at a perturbed bias.
  auto rng = make_rng(5);
  const Vec3 delta = 1e-4 * random_vec3(rng).normalized();
  const auto dpert = preintegrate(seg, bg, ba + delta);
  CHECK((dpert.dv - (d0.dv + d0.J_dv_dba * delta)).norm() <= 1e-6 * delta.norm());
  CHECK((dpert.dp - (d0.dp + d0.J_dp_dba * delta)).norm() <= 1e-6 * delta.norm());
}

TEST_CASE("zero-noise residuals against simulator truth") {
  TrajectoryConfig cfg;
  cfg.seed = 11;
  const Trajectory traj(cfg);
  const auto imu = gen_imu(traj, NoiseConfig{});
  const GroundTruth gt = traj.keyframe_truth();

  for (std::size_t k = 0; k + 1 < gt.times.size(); ++k) {
    const auto seg = segment_between(imu, gt.times[k], gt.times[k + 1]);
    const auto d = preintegrate(seg, Vec3::Zero(), Vec3::Zero());
    CHECK(dv_residual(d, gt, static_cast<int>(k)) < 1e-6);
    CHECK(dp_residual(d, gt, static_cast<int>(k)) < 1e-6);
  }
}

TEST_CASE("concatenation matches direct integration") {
  TrajectoryConfig cfg;
  cfg.seed = 13;
  const Trajectory traj(cfg);
  const auto imu = gen_imu(traj, NoiseConfig{});
  const Vec3 bg(0.004, -0.002, 0.003);
  const Vec3 ba(0.02, 0.01, -0.015);

  SUBCASE("split at a sample instant") {
    const auto whole = preintegrate(segment_between(imu, 0.1, 0.3), bg, ba);
    const auto first = preintegrate(segment_between(imu, 0.1, 0.2), bg, ba);
    const auto second = preintegrate(segment_between(imu, 0.2, 0.3), bg, ba);
    const auto joined = compose(first, second);
    CHECK((joined.dp - whole.dp).norm() < 1e-9);
    CHECK((joined.dv - whole.dv).norm() < 1e-9);
    CHECK((joined.dR - whole.dR).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((joined.J_dv_dba - whole.J_dv_dba).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((joined.J_dp_dba - whole.J_dp_dba).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("split at an interpolated instant") {
    // The interpolated boundary sample changes the sub-step layout, so the
    // agreement is limited by the scheme's own O(h^3) step error.
    const auto whole = preintegrate(segment_between(imu, 0.1, 0.3), bg, ba);
    const auto first = preintegrate(segment_between(imu, 0.1, 0.2137), bg, ba);
    const auto second = preintegrate(segment_between(imu, 0.2137, 0.3), bg, ba);
    const auto joined = compose(first, second);
    CHECK((joined.dp - whole.dp).norm() < 1e-7);
    CHECK((joined.dv - whole.dv).norm() < 1e-7);
  }
}

TEST_CASE("repreintegrate") {
  TrajectoryConfig cfg;
  cfg.seed = 17;
  const Trajectory traj(cfg);
  NoiseConfig noise;
  noise.bg_true = Vec3(0.02, 0.0, 0.0);
  const auto imu = gen_imu(traj, noise);
  const GroundTruth gt = traj.keyframe_truth();
  const auto seg = segment_between(imu, gt.times[0], gt.times[1]);

  SUBCASE("no-op at the same bias") {
    const auto d = preintegrate(seg, noise.bg_true, Vec3::Zero());
    const auto d2 = repreintegrate(d, seg, noise.bg_true);
    CHECK((d2.dp - d.dp).norm() < 1e-12);
    CHECK((d2.dv - d.dv).norm() < 1e-12);
    CHECK((d2.dR - d.dR).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("re-integrating at the true bias reduces the residual") {
    const auto at_zero = preintegrate(seg, Vec3::Zero(), Vec3::Zero());
    const auto at_true = repreintegrate(at_zero, seg, noise.bg_true);
    CHECK(dv_residual(at_true, gt, 0) < dv_residual(at_zero, gt, 0));
    CHECK(dv_residual(at_true, gt, 0) < 1e-6);
  }

  SUBCASE("rotation response to a bias change is locally linear") {
    const auto d0 = preintegrate(seg, Vec3::Zero(), Vec3::Zero());
    auto rng = make_rng(23);
    const Vec3 delta = 1e-3 * random_vec3(rng).normalized();
    const auto d1 = repreintegrate(d0, seg, delta);
    const auto dhalf = repreintegrate(d0, seg, 0.5 * delta);
    const Vec3 full = log_so3(d0.dR.transpose() * d1.dR);
    const Vec3 half = log_so3(d0.dR.transpose() * dhalf.dR);
    CHECK((2.0 * half - full).norm() < 0.05 * full.norm());
  }
}

TEST_CASE("segment_between boundary handling") {
  std::vector<ImuSample> s;
  for (int i = 0; i <= 100; ++i) {
    const double t = i * 0.01;
    s.push_back(ImuSample{t, Vec3(t, 2 * t, -t), Vec3(1 + t, 0, 3 * t)});
  }

  const auto seg = segment_between(s, 0.013, 0.057);
  CHECK(seg.front().t == doctest::Approx(0.013).epsilon(1e-15));
  CHECK(seg.back().t == doctest::Approx(0.057).epsilon(1e-15));
  // Linear signals interpolate exactly.
  CHECK((seg.front().omega - Vec3(0.013, 0.026, -0.013)).norm() < 1e-12);
  CHECK((seg.back().accel - Vec3(1.057, 0, 0.171)).norm() < 1e-12);
  for (std::size_t i = 1; i < seg.size(); ++i) CHECK(seg[i].t > seg[i - 1].t);

  CHECK_THROWS_AS(segment_between(s, -0.5, 0.5), InputError);
  CHECK_THROWS_AS(segment_between(s, 0.9, 1.5), InputError);
}
