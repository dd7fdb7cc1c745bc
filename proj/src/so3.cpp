#include "edi/so3.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "edi/errors.hpp"

namespace edi {

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return S;
}

Mat3 exp_so3(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 W = skew(phi);
  if (theta < 1e-8) {
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / theta2;
  return Mat3::Identity() + a * W + b * W * W;
}

Vec3 log_so3(const Mat3& R) {
  if (!is_rotation(R, 1e-6)) {
    throw InputError("log_so3: input is not a rotation matrix");
  }

  // Quaternion extraction picking the largest of {trace, R00, R11, R22};
  // stable for every angle, including pi where the antisymmetric part of R
  // vanishes.
  double qw, qx, qy, qz;
  const double tr = R.trace();
  if (tr >= R(0, 0) && tr >= R(1, 1) && tr >= R(2, 2)) {
    const double s = 2.0 * std::sqrt(tr + 1.0);
    qw = 0.25 * s;
    qx = (R(2, 1) - R(1, 2)) / s;
    qy = (R(0, 2) - R(2, 0)) / s;
    qz = (R(1, 0) - R(0, 1)) / s;
  } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2));
    qw = (R(2, 1) - R(1, 2)) / s;
    qx = 0.25 * s;
    qy = (R(0, 1) + R(1, 0)) / s;
    qz = (R(0, 2) + R(2, 0)) / s;
  } else if (R(1, 1) >= R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2));
    qw = (R(0, 2) - R(2, 0)) / s;
    qx = (R(0, 1) + R(1, 0)) / s;
    qy = 0.25 * s;
    qz = (R(1, 2) + R(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1));
    qw = (R(1, 0) - R(0, 1)) / s;
    qx = (R(0, 2) + R(2, 0)) / s;
    qy = (R(1, 2) + R(2, 1)) / s;
    qz = 0.25 * s;
  }

  if (qw < 0.0) {  // canonical: magnitude in [0, pi]
    qw = -qw;
    qx = -qx;
    qy = -qy;
    qz = -qz;
  }
  Vec3 v(qx, qy, qz);
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v;

  const double theta = 2.0 * std::atan2(vn, qw);
  Vec3 axis = v / vn;
  if (qw < 1e-14) {
    // Exactly at pi both axis signs are valid; fix the sign by making the
    // largest-magnitude component positive.
    int m = 0;
    axis.cwiseAbs().maxCoeff(&m);
    if (axis[m] < 0.0) axis = -axis;
  }
  return theta * axis;
}

Mat3 right_jacobian(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 W = skew(phi);
  if (theta < 1e-6) {
    return Mat3::Identity() - 0.5 * W + (1.0 / 6.0) * W * W;
  }
  const double b = (1.0 - std::cos(theta)) / theta2;
  const double c = (theta - std::sin(theta)) / (theta2 * theta);
  return Mat3::Identity() - b * W + c * W * W;
}

Mat3 right_jacobian_inv(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 W = skew(phi);
  if (theta < 1e-6) {
    return Mat3::Identity() + 0.5 * W + (1.0 / 12.0) * W * W;
  }
  const double d =
      1.0 / theta2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * W + d * W * W;
}

bool is_rotation(const Mat3& R, double tol) {
  if (!R.allFinite()) return false;
  const Mat3 err = R.transpose() * R - Mat3::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && R.determinant() > 0.0;
}

Mat3 project_to_so3(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 D = Mat3::Identity();
    D(2, 2) = -1.0;
    R = svd.matrixU() * D * svd.matrixV().transpose();
  }
  return R;
}

}  // namespace edi
