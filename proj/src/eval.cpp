#include "edi/eval.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "edi/errors.hpp"
#include "edi/so3.hpp"

namespace edi {

Similarity align_umeyama(std::span<const Vec3> est, std::span<const Vec3> gt,
                         bool with_scale) {
  if (est.size() != gt.size()) {
    throw InputError("align_umeyama: sequence length mismatch");
  }
  const std::size_t n = est.size();
  if (n < 3) throw InputError("align_umeyama: at least 3 correspondences required");

  Vec3 mu_e = Vec3::Zero(), mu_g = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_e += est[i];
    mu_g += gt[i];
  }
  mu_e /= static_cast<double>(n);
  mu_g /= static_cast<double>(n);

  Mat3 cov = Mat3::Zero();
  double var_e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (gt[i] - mu_g) * (est[i] - mu_e).transpose();
    var_e += (est[i] - mu_e).squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_e /= static_cast<double>(n);

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (sv(1) < 1e-12 * std::max(1.0, sv(0))) {
    throw NumericError("align_umeyama: degenerate (collinear) point set");
  }

  Mat3 S = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    S(2, 2) = -1.0;
  }

  Similarity sim;
  sim.R = svd.matrixU() * S * svd.matrixV().transpose();
  sim.s = with_scale ? (sv.dot(S.diagonal()) / var_e) : 1.0;
  sim.t = mu_g - sim.s * sim.R * mu_e;
  return sim;
}

double scale_error_pct(double s_hat) { return std::abs(1.0 - s_hat) * 100.0; }

double rotation_rmse(std::span<const Mat3> est, std::span<const Mat3> gt,
                     bool remove_offset) {
  if (est.size() != gt.size()) {
    throw InputError("rotation_rmse: sequence length mismatch");
  }
  if (est.empty()) throw InputError("rotation_rmse: empty sequences");

  Mat3 offset = Mat3::Identity();
  if (remove_offset) {
    // Chordal mean of gt_i * est_i^T: the left offset maximizing
    // sum_i tr(gt_i^T * offset * est_i).
    Mat3 acc = Mat3::Zero();
    for (std::size_t i = 0; i < est.size(); ++i) {
      acc += est[i] * gt[i].transpose();
    }
    offset = project_to_so3(acc).transpose();
  }

  double sum_sq = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sum_sq += log_so3(gt[i].transpose() * offset * est[i]).squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(est.size()));
}

double ate_rmse(std::span<const Vec3> est, std::span<const Vec3> gt) {
  const Similarity sim = align_umeyama(est, gt, /*with_scale=*/false);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sum_sq += (gt[i] - (sim.R * est[i] + sim.t)).squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(est.size()));
}

std::string report_csv_header() {
  return "seed,scale_error_pct,scale_error_linear_pct,grav_angle_err_deg,"
         "rot_rmse_rad,obs_rot_rmse_rad,ate_m,bg_err,ba_err,vel_rmse,"
         "s_pipeline,s_residual,s_total,eskf_us,preint_us,linear_us,"
         "refine_us,total_us";
}

std::string report_csv_row(const EvalReport& r) {
  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%.17g,%.17g,%lld,%lld,%lld,%lld,%lld",
                static_cast<unsigned long long>(r.seed), r.scale_error_pct,
                r.scale_error_linear_pct, r.grav_angle_err_deg, r.rot_rmse_rad,
                r.obs_rot_rmse_rad, r.ate_m, r.bg_err, r.ba_err, r.vel_rmse,
                r.s_pipeline, r.s_residual, r.s_total,
                static_cast<long long>(r.eskf_us),
                static_cast<long long>(r.preint_us),
                static_cast<long long>(r.linear_us),
                static_cast<long long>(r.refine_us),
                static_cast<long long>(r.total_us));
  return std::string(buf);
}

}  // namespace edi
