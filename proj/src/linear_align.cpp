#include "edi/linear_align.hpp"

#include <Eigen/Dense>

#include "edi/errors.hpp"

namespace edi {

BlockRow build_block(int k, const KeyframeTrack& track,
                     const Extrinsics& extrinsics,
                     const PreintegratedDelta& delta) {
  const int n = static_cast<int>(track.size());
  if (k < 0 || k > n - 2) throw InputError("build_block: keyframe index out of range");

  const Mat3 R_bk_w = track.R_wb[k].transpose();
  const double dt = delta.dt;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 3 * n + 4);
  A.block<3, 3>(0, 3 * k) = -R_bk_w * dt;
  A.block<3, 3>(0, 3 * n) = -0.5 * R_bk_w * dt * dt;
  A.block<3, 1>(0, 3 * n + 3) =
      R_bk_w * (track.p_wc_bar[k + 1] - track.p_wc_bar[k]);
  A.block<3, 3>(3, 3 * k) = -R_bk_w;
  A.block<3, 3>(3, 3 * (k + 1)) = R_bk_w;
  A.block<3, 3>(3, 3 * n) = -R_bk_w * dt;

  Eigen::Matrix<double, 6, 1> B;
  B.head<3>() = delta.dp - extrinsics.p_bc +
                R_bk_w * track.R_wb[k + 1] * extrinsics.p_bc;
  B.tail<3>() = delta.dv;
  return {A, B};
}

LinearSolution solve_initial(const KeyframeTrack& track,
                             const Extrinsics& extrinsics,
                             std::span<const PreintegratedDelta> deltas) {
  const int n = static_cast<int>(track.size());
  if (n < 4) {
    throw InputError(
        "solve_initial: at least 4 keyframes required (3N+4 unknowns vs 6(N-1) equations)");
  }
  if (deltas.size() != static_cast<std::size_t>(n - 1)) {
    throw InputError("solve_initial: expected one delta per consecutive keyframe pair");
  }

  const int cols = 3 * n + 4;
  Eigen::MatrixXd A(6 * (n - 1), cols);
  Eigen::VectorXd B(6 * (n - 1));
  for (int k = 0; k < n - 1; ++k) {
    auto [Ak, Bk] = build_block(k, track, extrinsics, deltas[k]);
    A.middleRows<6>(6 * k) = Ak;
    B.segment<6>(6 * k) = Bk;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < cols) {
    throw NumericError("solve_initial: rank-deficient system (insufficient excitation)");
  }
  const Eigen::VectorXd x = qr.solve(B);

  LinearSolution sol;
  sol.v.reserve(n);
  for (int k = 0; k < n; ++k) sol.v.push_back(x.segment<3>(3 * k));
  sol.g_w = x.segment<3>(3 * n);
  sol.s = x(3 * n + 3);
  if (sol.s < 1e-3) {
    throw NumericError("solve_initial: non-positive or near-zero scale (degenerate geometry)");
  }
  return sol;
}

}  // namespace edi
