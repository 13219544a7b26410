#include "sesync/rounding.hpp"

#include <Eigen/SVD>
#include <iostream>
#include <stdexcept>

#include "sesync/geometry.hpp"

namespace sesync {

namespace {

Matrix project_blocks(const Matrix& R_raw, int d) {
  const int n = static_cast<int>(R_raw.cols()) / d;
  Matrix out(d, d * n);
  for (int i = 0; i < n; ++i)
    out.middleCols(d * i, d) = nearest_rotation(R_raw.middleCols(d * i, d));
  return out;
}

Scalar rounded_cost(const DataMatrixSet& mats, const Matrix& R) {
  return (mats.apply_Q(R).array() * R.array()).sum();
}

} // namespace

Matrix round_solution(const Matrix& Y, int d, const DataMatrixSet* mats) {
  if (Y.cols() % d != 0) throw std::invalid_argument("round_solution: bad block size");
  const int n = static_cast<int>(Y.cols()) / d;

  // Rank-d truncated SVD of Y; the d x dn candidate is Xi_d V_d^T.
  Eigen::BDCSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv(d - 1) <= 1e-12 * sv(0))
    std::cerr << "warning: round_solution: nearly rank-deficient solution "
                 "(sigma_d/sigma_1 = "
              << sv(d - 1) / sv(0) << "); rounding will open a gap\n";
  Matrix R_raw = sv.head(d).asDiagonal() * svd.matrixV().leftCols(d).transpose();

  // Determinant vote: if fewer than ceil(n/2) blocks are proper, reverse the
  // global orientation.
  int positive = 0;
  for (int i = 0; i < n; ++i)
    if (R_raw.middleCols(d * i, d).determinant() > 0) ++positive;

  Matrix flip = Matrix::Identity(d, d);
  flip(d - 1, d - 1) = -1;

  if (positive < (n + 1) / 2) {
    R_raw = flip * R_raw;
  } else if (n % 2 == 0 && positive == n / 2 && mats != nullptr) {
    // Tie: pick the orientation whose rounded cost is lower.
    const Matrix keep = project_blocks(R_raw, d);
    const Matrix flipped = project_blocks(flip * R_raw, d);
    return rounded_cost(*mats, flipped) < rounded_cost(*mats, keep) ? flipped : keep;
  }

  return project_blocks(R_raw, d);
}

PoseEstimate align_gauge(const PoseEstimate& est, const PoseEstimate& ref) {
  const int n = est.size(), d = est.dim();
  if (ref.size() != n || ref.dim() != d)
    throw std::invalid_argument("align_gauge: size mismatch");

  const Matrix P = est.translation_block(); // d x n
  const Matrix Q = ref.translation_block();
  const Vector cp = P.rowwise().mean();
  const Vector cq = Q.rowwise().mean();

  // Rotation-only Procrustes between the centered translation point sets.
  const Matrix H = (P.colwise() - cp) * (Q.colwise() - cq).transpose();
  Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector s = Vector::Ones(d);
  s(d - 1) = (svd.matrixV() * svd.matrixU().transpose()).determinant() > 0 ? 1.0 : -1.0;
  const Matrix Rg = svd.matrixV() * s.asDiagonal() * svd.matrixU().transpose();
  const Vector tg = cq - Rg * cp;

  PoseEstimate out;
  out.rotations.reserve(n);
  out.translations.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.rotations.push_back(Rg * est.rotations[i]);
    out.translations.push_back(Rg * est.translations[i] + tg);
  }
  return out;
}

} // namespace sesync
