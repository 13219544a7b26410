#pragma once

#include <random>

#include "sesync/types.hpp"

namespace sesync {

/// Geometry kernel for the product manifold St(d, r)^n, realized as r x dn
/// matrices whose i-th r x d block (columns [d*i, d*i + d)) has orthonormal
/// columns. Metric: the ambient trace inner product. All operations are pure,
/// reentrant, and block-independent.
class StiefelProduct {
 public:
  StiefelProduct(int n, int d, int r);

  int n() const { return n_; }
  int d() const { return d_; }
  int r() const { return r_; }
  int ambient_rows() const { return r_; }
  int ambient_cols() const { return d_ * n_; }

  /// The n symmetrized d x d diagonal blocks of a (dn x dn)-conformal
  /// product, packed as a d x dn matrix (block i in columns [d*i, d*i + d)).
  static Matrix sym_block_diag(const Matrix& M, int d);

  /// Blocks of SymBlockDiag(Y^T X) computed without forming Y^T X:
  /// block i = 0.5 (Y_i^T X_i + X_i^T Y_i), packed d x dn.
  Matrix sym_blocks(const Matrix& Y, const Matrix& X) const;

  /// Per-block product X_i * B_i for packed d x dn blocks B.
  Matrix block_multiply(const Matrix& X, const Matrix& blocks) const;

  /// Orthogonal projection onto the tangent space at Y:
  /// X - Y SymBlockDiag(Y^T X).
  Matrix project_tangent(const Matrix& Y, const Matrix& X) const;

  /// Blockwise QR retraction Y_i' = qf(Y_i + V_i), Q factor with positive
  /// R diagonal. Throws std::runtime_error if a block is rank deficient
  /// (pathologically large step; callers shrink the trust region).
  Matrix retract(const Matrix& Y, const Matrix& V) const;

  /// Haar-uniform random point (blockwise QR of standard Gaussians with sign
  /// correction); deterministic per generator state.
  Matrix random_point(std::mt19937_64& rng) const;
  Matrix random_point(unsigned long seed) const;

  /// Gaussian ambient matrix projected to the tangent space at Y.
  Matrix random_tangent(const Matrix& Y, std::mt19937_64& rng) const;

  /// Trace inner product and norm.
  static Scalar inner(const Matrix& A, const Matrix& B) {
    return (A.array() * B.array()).sum();
  }
  static Scalar norm(const Matrix& A) { return A.norm(); }

  /// Max blockwise deviation from orthonormality (invariant check).
  Scalar orthonormality_error(const Matrix& Y) const;

  void check_shape(const Matrix& Y, const char* where) const;

 private:
  int n_, d_, r_;
};

} // namespace sesync
