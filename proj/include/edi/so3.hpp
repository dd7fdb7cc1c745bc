#pragma once

#include "edi/types.hpp"

namespace edi {

// Skew-symmetric matrix such that skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v);

// Rodrigues exponential map; second-order Taylor series below 1e-8 rad.
Mat3 exp_so3(const Vec3& phi);

// Logarithm map returning the canonical axis-angle vector (magnitude in
// [0, pi]). Angles near pi are resolved through the largest diagonal element
// of the symmetric part; the returned axis has its largest-|component|
// coordinate positive. Throws InputError if R is not a rotation
// (orthonormality residual above 1e-6 or negative determinant).
Vec3 log_so3(const Mat3& R);

// Right Jacobian of SO(3) and its inverse; Taylor fallback below 1e-6 rad.
Mat3 right_jacobian(const Vec3& phi);
Mat3 right_jacobian_inv(const Vec3& phi);

// True when R'R = I within tol (entrywise) and det(R) > 0.
bool is_rotation(const Mat3& R, double tol = 1e-6);

// Nearest rotation matrix in the Frobenius sense (SVD projection).
Mat3 project_to_so3(const Mat3& M);

}  // namespace edi
