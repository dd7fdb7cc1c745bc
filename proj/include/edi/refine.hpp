#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

#include "edi/linear_align.hpp"
#include "edi/preintegration.hpp"
#include "edi/types.hpp"

namespace edi {

// Fixed-magnitude seed gravity and the orthogonal basis of its tangent plane.
struct TangentBasis {
  Vec3 g0 = Vec3::Zero();
  Vec3 b1 = Vec3::Zero();
  Vec3 b2 = Vec3::Zero();
};

// Refined alignment: velocities, accelerometer bias, gravity tangent
// coefficients and scale.
struct RefinedSolution {
  std::vector<Vec3> v;
  Vec3 ba = Vec3::Zero();
  double w1 = 0.0;
  double w2 = 0.0;
  double s = 1.0;
};

// Residual-driven diagonal weights of one keyframe pair: exp(-||e||) per
// 3-row block.
struct PairWeights {
  double w_alpha = 1.0;
  double w_beta = 1.0;
  Vec3 e_alpha = Vec3::Zero();
  Vec3 e_beta = Vec3::Zero();
};

struct RefineOptions {
  int pcg_iterations = 4;
  int irls_passes = 2;
  double lambda_ba = 0.0;     // optional Tikhonov damping on ba
  double gravity_mag = 9.81;  // m/s^2
};

// Orthogonal tangent-plane basis at a unit gravity direction. The auxiliary
// axis is x unless the direction is within ~25 degrees of it.
TangentBasis tangent_basis(const Vec3& g_unit, double gravity_mag = 9.81);

// One 6x(3N+6) equation block over [v_0..v_{N-1}, ba, w1, w2, s], with the
// seed gravity moved into the right-hand side.
BlockRow build_refined_block(int k, const KeyframeTrack& track,
                             const Extrinsics& extrinsics,
                             const PreintegratedDelta& delta,
                             const TangentBasis& basis);

// Weights of one pair at the given stacked iterate.
PairWeights compute_weights(const Eigen::MatrixXd& H_k,
                            const Eigen::Matrix<double, 6, 1>& Z_k,
                            const Eigen::VectorXd& x);

// Preconditioned conjugate gradient on the normal equations M x = b,
// starting from x0, running `iterations` steps (early exit on a negligible
// residual). The preconditioner is the factorization of a fixed reference
// operator, typically the unweighted normal matrix: factored once, it makes
// a handful of iterations track the reweighted solutions through the IRLS
// passes. Throws NumericError on an indefinite operator or divergence.
Eigen::VectorXd pcg_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& x0, int iterations,
                          const Eigen::LDLT<Eigen::MatrixXd>& preconditioner);

// Iteratively reweighted solve seeded by the linear step: per pass, weights
// are taken at the current iterate and the weighted normal equations are
// advanced by a fixed number of PCG steps.
RefinedSolution refine(const LinearSolution& seed, const KeyframeTrack& track,
                       const Extrinsics& extrinsics,
                       std::span<const PreintegratedDelta> deltas,
                       const RefineOptions& opts = {});

// Gravity vector from the tangent coefficients, rescaled to the seed
// magnitude exactly.
Vec3 recover_gravity(const RefinedSolution& sol, const TangentBasis& basis);

}  // namespace edi
