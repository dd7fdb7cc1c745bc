#pragma once

#include <span>
#include <string>
#include <vector>

#include "edi/types.hpp"

namespace edi {

// Similarity (or rigid, s = 1) transform mapping est onto gt:
// gt ~ s * R * est + t.
struct Similarity {
  double s = 1.0;
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

// Closed-form least-squares alignment of point sets. Throws InputError on
// fewer than 3 points, NumericError on degenerate (collinear) geometry.
Similarity align_umeyama(std::span<const Vec3> est, std::span<const Vec3> gt,
                         bool with_scale);

// |s* - s_hat| / |s*| * 100 with s* = 1.
double scale_error_pct(double s_hat);

// Root-mean-square geodesic rotation error. By default the single best
// global (left-multiplied, chordal-mean) rotation offset is removed first;
// disable for the raw per-frame error.
double rotation_rmse(std::span<const Mat3> est, std::span<const Mat3> gt,
                     bool remove_offset = true);

// Position RMSE after rigid (SE(3)-only) alignment.
double ate_rmse(std::span<const Vec3> est, std::span<const Vec3> gt);

// Flat report emitted as JSON and as a CSV row by the CLI.
struct EvalReport {
  double scale_error_pct = 0.0;
  double scale_error_linear_pct = 0.0;  // before the refinement step
  double grav_angle_err_deg = 0.0;
  double rot_rmse_rad = 0.0;
  double obs_rot_rmse_rad = 0.0;  // raw observations vs truth
  double ate_m = 0.0;
  double bg_err = 0.0;
  double ba_err = 0.0;
  double vel_rmse = 0.0;
  double s_pipeline = 1.0;
  double s_residual = 1.0;  // alignment scale of the metric reconstruction
  double s_total = 1.0;
  std::int64_t eskf_us = 0;
  std::int64_t preint_us = 0;
  std::int64_t linear_us = 0;
  std::int64_t refine_us = 0;
  std::int64_t total_us = 0;
  std::uint64_t seed = 0;
};

std::string report_csv_header();
std::string report_csv_row(const EvalReport& r);

}  // namespace edi
