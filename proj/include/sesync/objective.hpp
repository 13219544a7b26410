#pragma once

#include <vector>

#include "sesync/data_matrices.hpp"
#include "sesync/stiefel.hpp"
#include "sesync/types.hpp"

namespace sesync {

/// Cost F(Y) = tr(Qtilde Y^T Y) on St(d, r)^n together with its Euclidean
/// and Riemannian derivatives. Caches the last (Y, Y Qtilde) pair - the
/// product is the dominant expense and the trust-region loop asks for cost,
/// gradient, and Hessian products at the same point. The cache makes a
/// handle single-user: one handle per solver thread.
class Objective {
 public:
  Objective(const DataMatrixSet& mats, int rank);

  const DataMatrixSet& mats() const { return *mats_; }
  const StiefelProduct& manifold() const { return manifold_; }
  int rank() const { return manifold_.r(); }

  Scalar cost(const Matrix& Y) const;

  /// 2 Y Qtilde.
  Matrix euclidean_gradient(const Matrix& Y) const;

  /// proj_Y(2 Y Qtilde).
  Matrix riemannian_gradient(const Matrix& Y) const;

  /// proj_Y(2 V Qtilde - V SymBlockDiag(Y^T 2 Y Qtilde)), V tangent at Y.
  Matrix hessian_vector_product(const Matrix& Y, const Matrix& V) const;

  /// Optional block-Jacobi preconditioner: per-block inverse of the d x d
  /// diagonal blocks of L_rho + T^T Omega T, composed with tangent
  /// projection; identity when disabled. SPD on the tangent space.
  Matrix precondition(const Matrix& Y, const Matrix& V) const;

  void set_preconditioner_enabled(bool enabled) { precond_enabled_ = enabled; }
  bool preconditioner_enabled() const { return precond_enabled_; }

  /// SymBlockDiag(Qtilde Y^T Y) blocks (d x dn packed): the Lagrange
  /// multiplier blocks of the certificate matrix.
  Matrix multiplier_blocks(const Matrix& Y) const;

 private:
  const Matrix& product(const Matrix& Y) const; // cached Y * Qtilde

  const DataMatrixSet* mats_;
  StiefelProduct manifold_;
  bool precond_enabled_ = false;
  std::vector<Matrix> precond_block_inv_; // n blocks, d x d

  mutable Matrix cached_Y_;
  mutable Matrix cached_YQ_;
  mutable Matrix cached_multiplier_; // sym blocks of (Y Qtilde)^T-vs-Y
  mutable bool cache_valid_ = false;
};

} // namespace sesync
