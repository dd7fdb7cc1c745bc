#include "edi/eskf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "edi/errors.hpp"
#include "edi/preintegration.hpp"
#include "edi/so3.hpp"

namespace edi {

namespace {

void require_reset(const EskfError& err) {
  if (err.dtheta.norm() > 0.0 || err.dbg.norm() > 0.0) {
    throw InputError("eskf: error state must be reset (zero mean)");
  }
}

}  // namespace

std::pair<EskfNominal, EskfError> predict(const EskfNominal& state,
                                          const EskfError& err,
                                          const EskfNoise& noise,
                                          std::span<const ImuSample> gyro,
                                          double dt) {
  if (!(dt > 0.0)) throw InputError("eskf predict: dt must be positive");
  if (gyro.size() < 2) throw InputError("eskf predict: empty gyro segment");
  require_reset(err);

  const double span = gyro.back().t - gyro.front().t;
  if (std::abs(span - dt) > 1e-6) {
    throw InputError("eskf predict: gyro segment does not span dt");
  }

  EskfNominal out = state;
  EskfError perr = err;
  for (std::size_t i = 0; i + 1 < gyro.size(); ++i) {
    const double h = gyro[i + 1].t - gyro[i].t;
    const Vec3 u = (0.5 * (gyro[i].omega + gyro[i + 1].omega) - out.bg) * h;
    out.R = out.R * exp_so3(u);

    // Exact discrete Jacobian of the sub-step map; the right Jacobian
    // reduces to the identity as the sub-step shrinks.
    Mat6 F = Mat6::Identity();
    F.topLeftCorner<3, 3>() = exp_so3(-u);
    F.topRightCorner<3, 3>() = -h * right_jacobian(u);
    Mat6 Q = Mat6::Zero();
    Q.topLeftCorner<3, 3>() =
        noise.sigma_wn * noise.sigma_wn * h * h * Mat3::Identity();
    Q.bottomRightCorner<3, 3>() =
        noise.sigma_ww * noise.sigma_ww * h * Mat3::Identity();
    perr.P = F * perr.P * F.transpose() + Q;
    perr.P = 0.5 * (perr.P + perr.P.transpose()).eval();
  }
  out.R = project_to_so3(out.R);
  return {out, perr};
}

std::pair<EskfNominal, EskfError> update(const EskfNominal& state,
                                         const EskfError& err,
                                         const EskfNoise& noise,
                                         const OrientationObservation& obs) {
  require_reset(err);

  const Vec3 e_r = log_so3(state.R.transpose() * obs.r_wb);
  Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
  H.leftCols<3>() = right_jacobian_inv(e_r);

  const Mat3 S = H * err.P * H.transpose() + noise.V;
  Eigen::SelfAdjointEigenSolver<Mat3> es(S);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12) {
    throw NumericError("eskf update: innovation covariance is near-singular");
  }

  const Eigen::Matrix<double, 6, 3> K =
      S.ldlt().solve(H * err.P).transpose();
  const Eigen::Matrix<double, 6, 1> delta = K * e_r;

  EskfNominal out = state;
  out.R = project_to_so3(out.R * exp_so3(delta.head<3>()));
  out.bg += delta.tail<3>();

  // Joseph form keeps P positive semi-definite across long runs.
  EskfError perr = err;
  const Mat6 IKH = Mat6::Identity() - K * H;
  perr.P = IKH * err.P * IKH.transpose() + K * noise.V * K.transpose();
  perr.P = 0.5 * (perr.P + perr.P.transpose()).eval();
  perr.dtheta.setZero();
  perr.dbg.setZero();
  return {out, perr};
}

GyroBiasEstimate estimate_gyro_bias(const KeyframeTrack& track,
                                    std::span<const ImuSample> imu,
                                    const EskfParams& params) {
  const std::size_t n = track.size();
  if (n < 2) throw InputError("estimate_gyro_bias: at least 2 keyframes required");
  if (imu.size() < 2) throw InputError("estimate_gyro_bias: empty IMU stream");
  if (imu.front().t > track.times.front() + 1e-9 ||
      imu.back().t < track.times.back() - 1e-9) {
    throw InputError("estimate_gyro_bias: IMU stream does not cover the window");
  }

  // Gap check against the nominal (median) sample period inside the window.
  std::vector<double> periods;
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (imu[i].t >= track.times.front() && imu[i - 1].t <= track.times.back()) {
      periods.push_back(imu[i].t - imu[i - 1].t);
    }
  }
  if (periods.empty()) {
    throw InputError("estimate_gyro_bias: no IMU samples inside the window");
  }
  std::nth_element(periods.begin(), periods.begin() + periods.size() / 2,
                   periods.end());
  const double nominal = periods[periods.size() / 2];
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (imu[i - 1].t >= track.times.front() && imu[i].t <= track.times.back() &&
        imu[i].t - imu[i - 1].t > 2.0 * nominal) {
      throw InputError("estimate_gyro_bias: IMU gap inside the window");
    }
  }

  EskfNominal state{track.R_wb.front(), Vec3::Zero()};
  EskfError err;
  err.P.topLeftCorner<3, 3>() = params.p0_theta_var * Mat3::Identity();
  err.P.bottomRightCorner<3, 3>() = params.p0_bg_var * Mat3::Identity();

  GyroBiasEstimate est;
  est.corrected_R.reserve(n);
  est.corrected_R.push_back(state.R);
  for (std::size_t k = 1; k < n; ++k) {
    const double t0 = track.times[k - 1];
    const double t1 = track.times[k];
    const auto seg = segment_between(imu, t0, t1);
    std::tie(state, err) = predict(state, err, params.noise, seg, t1 - t0);
    std::tie(state, err) =
        update(state, err, params.noise, OrientationObservation{t1, track.R_wb[k]});
    est.corrected_R.push_back(state.R);
  }
  est.bg = state.bg;
  return est;
}

}  // namespace edi
