#include "sesync/stiefel.hpp"

#include <Eigen/QR>
#include <stdexcept>
#include <string>

namespace sesync {

StiefelProduct::StiefelProduct(int n, int d, int r) : n_(n), d_(d), r_(r) {
  if (n < 1 || d < 1 || r < d)
    throw std::invalid_argument("StiefelProduct: need n >= 1, 1 <= d <= r");
}

void StiefelProduct::check_shape(const Matrix& Y, const char* where) const {
  if (Y.rows() != r_ || Y.cols() != static_cast<long>(d_) * n_)
    throw std::invalid_argument(std::string(where) + ": expected " + std::to_string(r_) +
                                " x " + std::to_string(d_ * n_) + " matrix, got " +
                                std::to_string(Y.rows()) + " x " + std::to_string(Y.cols()));
}

Matrix StiefelProduct::sym_block_diag(const Matrix& M, int d) {
  if (M.rows() != M.cols() || M.rows() % d != 0)
    throw std::invalid_argument("sym_block_diag: input does not partition into d x d blocks");
  const int n = static_cast<int>(M.rows()) / d;
  Matrix out(d, d * n);
  for (int i = 0; i < n; ++i) {
    const Matrix B = M.block(d * i, d * i, d, d);
    out.block(0, d * i, d, d) = 0.5 * (B + B.transpose());
  }
  return out;
}

Matrix StiefelProduct::sym_blocks(const Matrix& Y, const Matrix& X) const {
  check_shape(Y, "sym_blocks(Y)");
  check_shape(X, "sym_blocks(X)");
  Matrix out(d_, d_ * n_);
  for (int i = 0; i < n_; ++i) {
    const Matrix B =
        Y.middleCols(d_ * i, d_).transpose() * X.middleCols(d_ * i, d_);
    out.middleCols(d_ * i, d_) = 0.5 * (B + B.transpose());
  }
  return out;
}

Matrix StiefelProduct::block_multiply(const Matrix& X, const Matrix& blocks) const {
  Matrix out(X.rows(), d_ * n_);
  for (int i = 0; i < n_; ++i)
    out.middleCols(d_ * i, d_) = X.middleCols(d_ * i, d_) * blocks.middleCols(d_ * i, d_);
  return out;
}

Matrix StiefelProduct::project_tangent(const Matrix& Y, const Matrix& X) const {
  return X - block_multiply(Y, sym_blocks(Y, X));
}

Matrix StiefelProduct::retract(const Matrix& Y, const Matrix& V) const {
  check_shape(Y, "retract(Y)");
  check_shape(V, "retract(V)");
  Matrix out(r_, d_ * n_);
  for (int i = 0; i < n_; ++i) {
    const Matrix W = Y.middleCols(d_ * i, d_) + V.middleCols(d_ * i, d_);
    Eigen::HouseholderQR<Matrix> qr(W);
    Matrix Q = qr.householderQ() * Matrix::Identity(r_, d_);
    const Matrix R = qr.matrixQR().topRows(d_).triangularView<Eigen::Upper>();
    for (int j = 0; j < d_; ++j) {
      if (std::abs(R(j, j)) < 1e-14 * std::max(1.0, W.norm()))
        throw std::runtime_error("retract: rank-deficient block (step too large)");
      if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    }
    out.middleCols(d_ * i, d_) = Q;
  }
  return out;
}

Matrix StiefelProduct::random_point(std::mt19937_64& rng) const {
  std::normal_distribution<Scalar> gauss;
  Matrix Y(r_, d_ * n_);
  for (int i = 0; i < n_; ++i) {
    Matrix G(r_, d_);
    for (int row = 0; row < r_; ++row)
      for (int col = 0; col < d_; ++col) G(row, col) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(r_, d_);
    const Matrix R = qr.matrixQR().topRows(d_).triangularView<Eigen::Upper>();
    for (int j = 0; j < d_; ++j)
      if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    Y.middleCols(d_ * i, d_) = Q;
  }
  return Y;
}

Matrix StiefelProduct::random_point(unsigned long seed) const {
  std::mt19937_64 rng(seed);
  return random_point(rng);
}

Matrix StiefelProduct::random_tangent(const Matrix& Y, std::mt19937_64& rng) const {
  std::normal_distribution<Scalar> gauss;
  Matrix X(r_, d_ * n_);
  for (int row = 0; row < r_; ++row)
    for (int col = 0; col < d_ * n_; ++col) X(row, col) = gauss(rng);
  return project_tangent(Y, X);
}

Scalar StiefelProduct::orthonormality_error(const Matrix& Y) const {
  check_shape(Y, "orthonormality_error");
  Scalar err = 0;
  for (int i = 0; i < n_; ++i) {
    const Matrix B = Y.middleCols(d_ * i, d_);
    err = std::max(err,
                   (B.transpose() * B - Matrix::Identity(d_, d_)).cwiseAbs().maxCoeff());
  }
  return err;
}

} // namespace sesync
