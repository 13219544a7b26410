#include "sesync/objective.hpp"

#include <Eigen/Cholesky>

namespace sesync {

Objective::Objective(const DataMatrixSet& mats, int rank)
    : mats_(&mats), manifold_(mats.n(), mats.d(), rank) {
  const int d = mats.d(), n = mats.n();
  const Matrix diag_blocks = Matrix(mats.L_rho() + mats.translational_block_diag());
  precond_block_inv_.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Matrix B = diag_blocks.block(d * i, d * i, d, d);
    Eigen::LDLT<Matrix> ldlt(B);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        ldlt.vectorD().minCoeff() > 1e-12 * std::max(1.0, B.norm()))
      precond_block_inv_.push_back(ldlt.solve(Matrix::Identity(d, d)));
    else
      precond_block_inv_.push_back(Matrix::Identity(d, d)); // near-singular block
  }
}

const Matrix& Objective::product(const Matrix& Y) const {
  if (!cache_valid_ || cached_Y_.rows() != Y.rows() || cached_Y_.cols() != Y.cols() ||
      cached_Y_ != Y) {
    cached_Y_ = Y;
    cached_YQ_ = mats_->apply_Q(Y);
    // SymBlockDiag(Qtilde Y^T Y): block i = sym((Y Qtilde)_i^T Y_i)
    cached_multiplier_ = manifold_.sym_blocks(cached_YQ_, Y);
    cache_valid_ = true;
  }
  return cached_YQ_;
}

Scalar Objective::cost(const Matrix& Y) const {
  return StiefelProduct::inner(product(Y), Y);
}

Matrix Objective::euclidean_gradient(const Matrix& Y) const { return 2.0 * product(Y); }

Matrix Objective::riemannian_gradient(const Matrix& Y) const {
  return manifold_.project_tangent(Y, euclidean_gradient(Y));
}

Matrix Objective::hessian_vector_product(const Matrix& Y, const Matrix& V) const {
  product(Y); // refresh multiplier cache
  const Matrix HV = 2.0 * mats_->apply_Q(V) -
                    2.0 * manifold_.block_multiply(V, cached_multiplier_);
  return manifold_.project_tangent(Y, HV);
}

Matrix Objective::precondition(const Matrix& Y, const Matrix& V) const {
  if (!precond_enabled_) return V;
  const int d = manifold_.d();
  Matrix out(V.rows(), V.cols());
  for (int i = 0; i < manifold_.n(); ++i)
    out.middleCols(d * i, d) = V.middleCols(d * i, d) * precond_block_inv_[i];
  return manifold_.project_tangent(Y, out);
}

Matrix Objective::multiplier_blocks(const Matrix& Y) const {
  product(Y);
  return cached_multiplier_;
}

} // namespace sesync
