#include "sesync/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

namespace sesync {

bool is_rotation(const Matrix& R, Scalar tol) {
  if (R.rows() != R.cols()) return false;
  const int d = static_cast<int>(R.rows());
  if ((R.transpose() * R - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

Matrix nearest_rotation(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix& U = svd.matrixU();
  const Matrix& V = svd.matrixV();
  Vector s = Vector::Ones(M.rows());
  s(M.rows() - 1) = (U * V.transpose()).determinant() > 0 ? 1.0 : -1.0;
  return U * s.asDiagonal() * V.transpose();
}

Matrix rotation2d(Scalar angle) {
  Matrix R(2, 2);
  const Scalar c = std::cos(angle), s = std::sin(angle);
  R << c, -s, s, c;
  return R;
}

Matrix exp_so3(const Eigen::Vector3d& w) {
  const Scalar theta = w.norm();
  Matrix W(3, 3);
  W << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  if (theta < 1e-12)
    return Matrix::Identity(3, 3) + W + 0.5 * W * W;
  return Matrix::Identity(3, 3) + (std::sin(theta) / theta) * W +
         ((1.0 - std::cos(theta)) / (theta * theta)) * W * W;
}

Scalar rotation_angle(const Matrix& Ra, const Matrix& Rb) {
  const Matrix Rel = Ra.transpose() * Rb;
  const int d = static_cast<int>(Rel.rows());
  if (d == 2) return std::abs(std::atan2(Rel(1, 0), Rel(0, 0)));
  // d == 3: trace formula, clamped against roundoff
  const Scalar c = std::min(1.0, std::max(-1.0, (Rel.trace() - 1.0) / 2.0));
  return std::acos(c);
}

Matrix random_rotation(int d, std::mt19937_64& rng) {
  if (d != 2 && d != 3)
    throw std::invalid_argument("random_rotation: dimension must be 2 or 3");
  std::normal_distribution<Scalar> gauss;
  Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  if (Q.determinant() < 0) Q.col(d - 1) = -Q.col(d - 1);
  return Q;
}

Eigen::Vector4d rotation_to_quaternion(const Matrix& R) {
  const Eigen::Matrix3d R3 = R;
  Eigen::Quaterniond q(R3);
  q.normalize();
  return {q.x(), q.y(), q.z(), q.w()};
}

Matrix quaternion_to_rotation(Scalar qx, Scalar qy, Scalar qz, Scalar qw) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  q.normalize();
  return q.toRotationMatrix();
}

} // namespace sesync
