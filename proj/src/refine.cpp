#include "edi/refine.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "edi/errors.hpp"

namespace edi {

TangentBasis tangent_basis(const Vec3& g_unit, double gravity_mag) {
  if (g_unit.norm() < 1e-12) throw InputError("tangent_basis: zero direction");
  if (std::abs(g_unit.norm() - 1.0) > 1e-6) {
    throw InputError("tangent_basis: direction must be a unit vector");
  }
  Vec3 aux = Vec3::UnitX();
  if (std::abs(g_unit.dot(aux)) > 0.9) aux = Vec3::UnitY();

  TangentBasis basis;
  basis.b1 = g_unit.cross(aux).normalized();
  basis.b2 = g_unit.cross(basis.b1);
  basis.g0 = gravity_mag * g_unit;
  return basis;
}

BlockRow build_refined_block(int k, const KeyframeTrack& track,
                             const Extrinsics& extrinsics,
                             const PreintegratedDelta& delta,
                             const TangentBasis& basis) {
  const int n = static_cast<int>(track.size());
  if (k < 0 || k > n - 2) {
    throw InputError("build_refined_block: keyframe index out of range");
  }

  const Mat3 R_bk_w = track.R_wb[k].transpose();
  const double dt = delta.dt;
  Eigen::Matrix<double, 3, 2> B32;
  B32.col(0) = basis.b1;
  B32.col(1) = basis.b2;

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(6, 3 * n + 6);
  H.block<3, 3>(0, 3 * k) = -R_bk_w * dt;
  H.block<3, 3>(0, 3 * n) = -delta.J_dp_dba;
  H.block<3, 2>(0, 3 * n + 3) = -0.5 * dt * dt * R_bk_w * B32;
  H.block<3, 1>(0, 3 * n + 5) =
      R_bk_w * (track.p_wc_bar[k + 1] - track.p_wc_bar[k]);
  H.block<3, 3>(3, 3 * k) = -R_bk_w;
  H.block<3, 3>(3, 3 * (k + 1)) = R_bk_w;
  H.block<3, 3>(3, 3 * n) = -delta.J_dv_dba;
  H.block<3, 2>(3, 3 * n + 3) = -dt * R_bk_w * B32;

  Eigen::Matrix<double, 6, 1> Z;
  Z.head<3>() = delta.dp - extrinsics.p_bc +
                R_bk_w * track.R_wb[k + 1] * extrinsics.p_bc +
                0.5 * dt * dt * R_bk_w * basis.g0;
  Z.tail<3>() = delta.dv + dt * R_bk_w * basis.g0;
  return {H, Z};
}

PairWeights compute_weights(const Eigen::MatrixXd& H_k,
                            const Eigen::Matrix<double, 6, 1>& Z_k,
                            const Eigen::VectorXd& x) {
  if (x.size() != H_k.cols()) {
    throw InputError("compute_weights: iterate dimension mismatch");
  }
  PairWeights w;
  w.e_alpha = H_k.topRows<3>() * x - Z_k.head<3>();
  w.e_beta = H_k.bottomRows<3>() * x - Z_k.tail<3>();
  w.w_alpha = std::exp(-w.e_alpha.norm());
  w.w_beta = std::exp(-w.e_beta.norm());
  return w;
}

Eigen::VectorXd pcg_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& x0, int iterations,
                          const Eigen::LDLT<Eigen::MatrixXd>& preconditioner) {
  if ((M.diagonal().array() <= 0.0).any()) {
    throw NumericError("pcg_solve: non-positive diagonal in normal equations");
  }

  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = b - M * x;
  const double stop = 1e-14 * b.norm();
  Eigen::VectorXd z = preconditioner.solve(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < iterations; ++it) {
    if (r.norm() <= stop) break;
    const Eigen::VectorXd Mp = M * p;
    const double pMp = p.dot(Mp);
    if (!(pMp > 0.0) || !std::isfinite(pMp)) {
      throw NumericError("pcg_solve: operator is not positive definite");
    }
    const double alpha = rz / pMp;
    x += alpha * p;
    r -= alpha * Mp;
    z = preconditioner.solve(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (!x.allFinite()) throw NumericError("pcg_solve: iterate diverged");
  return x;
}

RefinedSolution refine(const LinearSolution& seed, const KeyframeTrack& track,
                       const Extrinsics& extrinsics,
                       std::span<const PreintegratedDelta> deltas,
                       const RefineOptions& opts) {
  const int n = static_cast<int>(track.size());
  if (n < 2 || deltas.size() != static_cast<std::size_t>(n - 1)) {
    throw InputError("refine: keyframe/delta count mismatch");
  }
  if (!(seed.s > 0.0)) throw InputError("refine: seed scale must be positive");
  if (seed.g_w.norm() < 1e-6) throw InputError("refine: seed gravity near zero");

  const TangentBasis basis =
      tangent_basis(seed.g_w.normalized(), opts.gravity_mag);

  const int dim = 3 * n + 6;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  for (int k = 0; k < n; ++k) x.segment<3>(3 * k) = seed.v[k];
  x(dim - 1) = seed.s;

  std::vector<BlockRow> blocks;
  blocks.reserve(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    blocks.push_back(build_refined_block(k, track, extrinsics, deltas[k], basis));
  }

  // Reference operator for the preconditioner: the unweighted normal matrix,
  // factored once and reused across the IRLS passes.
  Eigen::MatrixXd M0 = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [H, Z] : blocks) M0 += H.transpose() * H;
  if (opts.lambda_ba > 0.0) {
    M0.block<3, 3>(3 * n, 3 * n) += opts.lambda_ba * Mat3::Identity();
  }
  const Eigen::LDLT<Eigen::MatrixXd> precond(M0);
  if (precond.info() != Eigen::Success ||
      (precond.vectorD().array() <= 0.0).any()) {
    throw NumericError("refine: normal equations are not positive definite");
  }

  for (int pass = 0; pass < opts.irls_passes; ++pass) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (const auto& [H, Z] : blocks) {
      const PairWeights w = compute_weights(H, Z, x);
      const double wa2 = w.w_alpha * w.w_alpha;
      const double wb2 = w.w_beta * w.w_beta;
      M += wa2 * H.topRows<3>().transpose() * H.topRows<3>() +
           wb2 * H.bottomRows<3>().transpose() * H.bottomRows<3>();
      rhs += wa2 * H.topRows<3>().transpose() * Z.head<3>() +
             wb2 * H.bottomRows<3>().transpose() * Z.tail<3>();
    }
    if (opts.lambda_ba > 0.0) {
      M.block<3, 3>(3 * n, 3 * n) += opts.lambda_ba * Mat3::Identity();
    }
    x = pcg_solve(M, rhs, x, opts.pcg_iterations, precond);
  }

  RefinedSolution sol;
  sol.v.reserve(n);
  for (int k = 0; k < n; ++k) sol.v.push_back(x.segment<3>(3 * k));
  sol.ba = x.segment<3>(3 * n);
  sol.w1 = x(3 * n + 3);
  sol.w2 = x(3 * n + 4);
  sol.s = x(dim - 1);
  if (!std::isfinite(sol.s) || sol.s <= 0.0 ||
      std::max(std::abs(sol.w1), std::abs(sol.w2)) > 0.5 * opts.gravity_mag) {
    throw NumericError("refine: solution diverged");
  }
  return sol;
}

Vec3 recover_gravity(const RefinedSolution& sol, const TangentBasis& basis) {
  const Vec3 g = basis.g0 + sol.w1 * basis.b1 + sol.w2 * basis.b2;
  return g * (basis.g0.norm() / g.norm());
}

}  // namespace edi
