#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "edi/errors.hpp"
#include "edi/linear_align.hpp"
#include "edi/simulate.hpp"
#include "edi/so3.hpp"
#include "test_utils.hpp"

using namespace edi;
using test_util::make_rng;
using test_util::random_vec3;

namespace {

// An exactly consistent instance: body kinematics drawn at random and the
// deltas constructed from them, so the stacked equations hold to machine
// precision. Exercises the block layout without integration error.
struct ExactInstance {
  KeyframeTrack track;
  Extrinsics extrinsics;
  std::vector<PreintegratedDelta> deltas;
  std::vector<Vec3> v_true;
  Vec3 g_true;
  double s_true;
};

ExactInstance make_exact(std::mt19937_64& rng, int n, double s_true) {
  ExactInstance inst;
  inst.s_true = s_true;
  inst.g_true = 9.81 * test_util::random_unit(rng);
  inst.extrinsics.R_bc = exp_so3(random_vec3(rng, 0.5));
  inst.extrinsics.p_bc = random_vec3(rng, 0.05);

  const double dt = 0.1;
  std::vector<Vec3> p_b;
  Vec3 p = random_vec3(rng, 1.0);
  for (int k = 0; k < n; ++k) {
    inst.track.times.push_back(dt * k);
    inst.track.R_wb.push_back(exp_so3(random_vec3(rng, 1.0)));
    inst.v_true.push_back(random_vec3(rng, 0.8));
    p_b.push_back(p);
    p += random_vec3(rng, 0.1);
  }
  for (int k = 0; k < n; ++k) {
    inst.track.p_wc_bar.push_back(
        (p_b[k] + inst.track.R_wb[k] * inst.extrinsics.p_bc) / s_true);
  }
  for (int k = 0; k + 1 < n; ++k) {
    const Mat3 R_bk_w = inst.track.R_wb[k].transpose();
    PreintegratedDelta d;
    d.dt = dt;
    d.dv = R_bk_w * (inst.v_true[k + 1] - inst.v_true[k] - inst.g_true * dt);
    d.dp = R_bk_w * (p_b[k + 1] - p_b[k] - inst.v_true[k] * dt -
                     0.5 * inst.g_true * dt * dt);
    inst.deltas.push_back(d);
  }
  return inst;
}

Eigen::VectorXd pack(const ExactInstance& inst) {
  const int n = static_cast<int>(inst.track.size());
  Eigen::VectorXd x(3 * n + 4);
  for (int k = 0; k < n; ++k) x.segment<3>(3 * k) = inst.v_true[k];
  x.segment<3>(3 * n) = inst.g_true;
  x(3 * n + 3) = inst.s_true;
  return x;
}

}  // namespace

TEST_CASE("block dimensions") {
  auto rng = make_rng(1);
  const ExactInstance inst = make_exact(rng, 2, 1.0);
  auto [A, B] = build_block(0, inst.track, inst.extrinsics, inst.deltas[0]);
  CHECK(A.rows() == 6);
  CHECK(A.cols() == 10);
  CHECK_THROWS_AS(build_block(1, inst.track, inst.extrinsics, inst.deltas[0]),
                  InputError);
  CHECK_THROWS_AS(build_block(-1, inst.track, inst.extrinsics, inst.deltas[0]),
                  InputError);
}

TEST_CASE("stationary identity case reduces B to the deltas") {
  KeyframeTrack track;
  for (int k = 0; k < 2; ++k) {
    track.times.push_back(0.1 * k);
    track.R_wb.push_back(Mat3::Identity());
    track.p_wc_bar.push_back(Vec3::Zero());
  }
  PreintegratedDelta d;
  d.dt = 0.1;
  d.dp = Vec3(0.1, 0.2, 0.3);
  d.dv = Vec3(-0.4, 0.5, -0.6);
  auto [A, B] = build_block(0, track, Extrinsics{}, d);
  CHECK((B.head<3>() - d.dp).norm() == 0.0);
  CHECK((B.tail<3>() - d.dv).norm() == 0.0);
}

TEST_CASE("ground truth satisfies the block equations") {
  auto rng = make_rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ExactInstance inst = make_exact(rng, 6, 0.5 + trial * 0.2);
    const Eigen::VectorXd x = pack(inst);
    for (std::size_t k = 0; k + 1 < inst.track.size(); ++k) {
      auto [A, B] = build_block(static_cast<int>(k), inst.track,
                                inst.extrinsics, inst.deltas[k]);
      CHECK((A * x - B).norm() < 1e-8);
    }
  }
}

TEST_CASE("exact recovery on consistent instances") {
  auto rng = make_rng(11);
  for (double s_true : {0.5, 1.0, 2.0, 5.0}) {
    const ExactInstance inst = make_exact(rng, 10, s_true);
    const LinearSolution sol = solve_initial(inst.track, inst.extrinsics, inst.deltas);
    CHECK(std::abs(sol.s - s_true) / s_true < 1e-6);
    CHECK((sol.g_w - inst.g_true).norm() < 1e-6);
    for (int k = 0; k < 10; ++k) CHECK((sol.v[k] - inst.v_true[k]).norm() < 1e-6);
  }
}

TEST_CASE("recovery from simulated IMU data") {
  TrajectoryConfig sim;
  sim.seed = 5;
  const Trajectory traj(sim);
  const auto imu = gen_imu(traj, NoiseConfig{});
  const auto kf = gen_keyframes(traj, 2.0, NoiseConfig{}, Extrinsics{});
  const GroundTruth gt = traj.keyframe_truth();

  std::vector<PreintegratedDelta> deltas;
  for (std::size_t k = 0; k + 1 < gt.times.size(); ++k) {
    deltas.push_back(preintegrate(
        segment_between(imu, gt.times[k], gt.times[k + 1]), Vec3::Zero(),
        Vec3::Zero()));
  }
  const LinearSolution sol = solve_initial(kf.track, Extrinsics{}, deltas);
  // Limited by the 200 Hz integration accuracy, not by the solver.
  CHECK(std::abs(sol.s - 2.0) / 2.0 < 1e-5);
  CHECK((sol.g_w - gt.g_w).norm() < 1e-4);
  CHECK(sol.g_w.norm() == doctest::Approx(9.81).epsilon(0.01));
}

TEST_CASE("matches the dense pseudoinverse solve") {
  auto rng = make_rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const ExactInstance base = make_exact(rng, 8, 1.5);
    // Perturb the right-hand side so the system is inconsistent and the
    // least-squares character matters.
    auto deltas = base.deltas;
    for (auto& d : deltas) {
      d.dp += random_vec3(rng, 1e-3);
      d.dv += random_vec3(rng, 1e-3);
    }
    const int n = 8, cols = 3 * n + 4;
    Eigen::MatrixXd A(6 * (n - 1), cols);
    Eigen::VectorXd B(6 * (n - 1));
    for (int k = 0; k < n - 1; ++k) {
      auto [Ak, Bk] = build_block(k, base.track, base.extrinsics, deltas[k]);
      A.middleRows<6>(6 * k) = Ak;
      B.segment<6>(6 * k) = Bk;
    }
    const Eigen::VectorXd x_normal =
        (A.transpose() * A).ldlt().solve(A.transpose() * B);

    const LinearSolution sol = solve_initial(base.track, base.extrinsics, deltas);
    Eigen::VectorXd x_sol(cols);
    for (int k = 0; k < n; ++k) x_sol.segment<3>(3 * k) = sol.v[k];
    x_sol.segment<3>(3 * n) = sol.g_w;
    x_sol(cols - 1) = sol.s;
    CHECK((x_sol - x_normal).norm() < 1e-8 * std::max(1.0, x_normal.norm()));
  }
}

TEST_CASE("world-frame equivariance") {
  auto rng = make_rng(17);
  const ExactInstance inst = make_exact(rng, 7, 1.3);
  const LinearSolution sol = solve_initial(inst.track, inst.extrinsics, inst.deltas);

  const Mat3 R0 = exp_so3(random_vec3(rng, 2.0));
  KeyframeTrack rotated = inst.track;
  for (std::size_t k = 0; k < rotated.size(); ++k) {
    rotated.R_wb[k] = R0 * rotated.R_wb[k];
    rotated.p_wc_bar[k] = R0 * rotated.p_wc_bar[k];
  }
  const LinearSolution rsol = solve_initial(rotated, inst.extrinsics, inst.deltas);
  CHECK(std::abs(rsol.s - sol.s) < 1e-9);
  CHECK((rsol.g_w - R0 * sol.g_w).norm() < 1e-9);
  for (std::size_t k = 0; k < sol.v.size(); ++k) {
    CHECK((rsol.v[k] - R0 * sol.v[k]).norm() < 1e-9);
  }
}

TEST_CASE("input-scale covariance") {
  auto rng = make_rng(19);
  const ExactInstance inst = make_exact(rng, 7, 1.0);
  const LinearSolution sol = solve_initial(inst.track, inst.extrinsics, inst.deltas);

  const double lambda = 3.7;
  KeyframeTrack scaled = inst.track;
  for (auto& p : scaled.p_wc_bar) p *= lambda;
  const LinearSolution ssol = solve_initial(scaled, inst.extrinsics, inst.deltas);
  CHECK(std::abs(ssol.s - sol.s / lambda) < 1e-9);
  CHECK((ssol.g_w - sol.g_w).norm() < 1e-9);
  for (std::size_t k = 0; k < sol.v.size(); ++k) {
    CHECK((ssol.v[k] - sol.v[k]).norm() < 1e-9);
  }
}

TEST_CASE("least-squares optimality spot check") {
  auto rng = make_rng(23);
  ExactInstance inst = make_exact(rng, 6, 1.0);
  for (auto& d : inst.deltas) {
    d.dp += random_vec3(rng, 1e-2);
    d.dv += random_vec3(rng, 1e-2);
  }
  const int n = 6, cols = 3 * n + 4;
  Eigen::MatrixXd A(6 * (n - 1), cols);
  Eigen::VectorXd B(6 * (n - 1));
  for (int k = 0; k < n - 1; ++k) {
    auto [Ak, Bk] = build_block(k, inst.track, inst.extrinsics, inst.deltas[k]);
    A.middleRows<6>(6 * k) = Ak;
    B.segment<6>(6 * k) = Bk;
  }
  const LinearSolution sol = solve_initial(inst.track, inst.extrinsics, inst.deltas);
  Eigen::VectorXd x(cols);
  for (int k = 0; k < n; ++k) x.segment<3>(3 * k) = sol.v[k];
  x.segment<3>(3 * n) = sol.g_w;
  x(cols - 1) = sol.s;

  const double best = (A * x - B).squaredNorm();
  std::uniform_real_distribution<double> uni(-1e-4, 1e-4);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd d(cols);
    for (int i = 0; i < cols; ++i) d(i) = uni(rng);
    CHECK(best <= (A * (x + d) - B).squaredNorm() + 1e-12);
  }
}

TEST_CASE("error paths") {
  auto rng = make_rng(29);

  SUBCASE("too few keyframes") {
    const ExactInstance inst = make_exact(rng, 3, 1.0);
    CHECK_THROWS_AS(solve_initial(inst.track, inst.extrinsics, inst.deltas),
                    InputError);
  }

  SUBCASE("delta count mismatch") {
    ExactInstance inst = make_exact(rng, 5, 1.0);
    inst.deltas.pop_back();
    CHECK_THROWS_AS(solve_initial(inst.track, inst.extrinsics, inst.deltas),
                    InputError);
  }

  SUBCASE("rank deficiency on unexcited motion") {
    // Constant velocity, no rotation: scale, gravity and velocity are
    // mutually indistinguishable.
    KeyframeTrack track;
    std::vector<PreintegratedDelta> deltas;
    const Vec3 v(0.3, 0.1, -0.2);
    const Vec3 g(0, 0, -9.81);
    for (int k = 0; k < 6; ++k) {
      track.times.push_back(0.1 * k);
      track.R_wb.push_back(Mat3::Identity());
      track.p_wc_bar.push_back(v * (0.1 * k));
    }
    for (int k = 0; k < 5; ++k) {
      PreintegratedDelta d;
      d.dt = 0.1;
      d.dv = -g * d.dt;
      d.dp = -0.5 * g * d.dt * d.dt;
      deltas.push_back(d);
    }
    CHECK_THROWS_AS(solve_initial(track, Extrinsics{}, deltas), NumericError);
  }

  SUBCASE("negative scale is rejected") {
    ExactInstance inst = make_exact(rng, 6, 1.0);
    for (auto& p : inst.track.p_wc_bar) p = -p;
    CHECK_THROWS_AS(solve_initial(inst.track, inst.extrinsics, inst.deltas),
                    NumericError);
  }
}
