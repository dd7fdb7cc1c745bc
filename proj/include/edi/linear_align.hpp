#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

#include "edi/preintegration.hpp"
#include "edi/types.hpp"

namespace edi {

// Solution of the initial alignment: per-keyframe world velocities, gravity
// and the monocular scale factor.
struct LinearSolution {
  std::vector<Vec3> v;
  Vec3 g_w = Vec3::Zero();
  double s = 1.0;
};

using BlockRow = std::pair<Eigen::MatrixXd, Eigen::Matrix<double, 6, 1>>;

// One 6x(3N+4) equation block relating keyframes k and k+1 to the unknowns
// [v_0..v_{N-1}, g_w, s]. The track rotations must be the corrected body
// orientations from the filter step.
BlockRow build_block(int k, const KeyframeTrack& track,
                     const Extrinsics& extrinsics,
                     const PreintegratedDelta& delta);

// Stack all N-1 blocks and solve by column-pivoted QR. Throws InputError on
// N < 4 or a delta-count mismatch, NumericError on numerical rank deficiency
// (insufficient excitation) or a non-positive scale estimate.
LinearSolution solve_initial(const KeyframeTrack& track,
                             const Extrinsics& extrinsics,
                             std::span<const PreintegratedDelta> deltas);

}  // namespace edi
