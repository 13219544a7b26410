#pragma once

#include <random>

#include "sesync/types.hpp"

namespace sesync {

/// Checks R^T R = I and det(R) = +1 within tol.
bool is_rotation(const Matrix& R, Scalar tol = 1e-12);

/// Projects a square matrix to the nearest special-orthogonal matrix
/// (Frobenius norm), via SVD with the smallest singular direction
/// sign-corrected so the result has determinant +1.
Matrix nearest_rotation(const Matrix& M);

/// 2x2 rotation by angle (radians).
Matrix rotation2d(Scalar angle);

/// Matrix exponential of the skew-symmetric matrix hat(w), w in R^3.
Matrix exp_so3(const Eigen::Vector3d& w);

/// Geodesic distance on SO(d) between two rotations, in radians.
Scalar rotation_angle(const Matrix& Ra, const Matrix& Rb);

/// Uniform (Haar) random rotation in dimension d, d in {2,3}.
Matrix random_rotation(int d, std::mt19937_64& rng);

/// Rotation matrix <-> quaternion (x, y, z, w ordering), d = 3.
Eigen::Vector4d rotation_to_quaternion(const Matrix& R);
Matrix quaternion_to_rotation(Scalar qx, Scalar qy, Scalar qz, Scalar qw);

} // namespace sesync
