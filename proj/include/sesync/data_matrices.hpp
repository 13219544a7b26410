#pragma once

#include <Eigen/SparseCholesky>
#include <memory>

#include "sesync/measurement_graph.hpp"
#include "sesync/types.hpp"

namespace sesync {

/// Sparse matrices of the translation-eliminated synchronization problem,
/// plus cached factorizations. Immutable after construction; the product
/// operators are reentrant.
///
/// The quadratic-form matrix is never formed densely. Products use
///   Qtilde = L_rho + T^T Omega^{1/2} Pi Omega^{1/2} T,
///   Pi w   = w - Omega^{1/2} A_red^T (A_red Omega A_red^T)^{-1} A_red Omega^{1/2} w,
/// with the inner inverse applied through a cached sparse Cholesky factor of
/// the reduced weighted Laplacian A_red Omega A_red^T (mathematically the
/// thin-LQ factor of A_red Omega^{1/2}, up to column signs that cancel).
class DataMatrixSet {
 public:
  explicit DataMatrixSet(const MeasurementGraph& g);

  int n() const { return n_; }
  int d() const { return d_; }
  int m() const { return m_; }

  const SparseMatrix& L_tau() const { return L_tau_; }
  const SparseMatrix& L_rho() const { return L_rho_; }
  const SparseMatrix& V() const { return V_; }
  const SparseMatrix& T() const { return T_; }
  const Vector& omega() const { return omega_; }
  const SparseMatrix& A_reduced() const { return A_reduced_; }

  /// Block diagonal of T^T Omega T (same n-block d x d structure as L_rho's
  /// diagonal); L_rho + this is the cheap sparse upper bound for Qtilde used
  /// for scale estimates.
  const SparseMatrix& translational_block_diag() const { return trans_block_diag_; }

  /// Mean diagonal entry of L_rho + T^T Omega T; the problem's magnitude
  /// scale for eigenvalue tolerances.
  Scalar diagonal_scale() const { return diagonal_scale_; }

  /// Upper bound for lambda_max(Qtilde), from the 1-norm of the sparse
  /// upper bound L_rho + T^T Omega T (Pi contracts).
  Scalar q_norm_bound() const { return q_norm_bound_; }

  /// Y * Qtilde for a (r x dn) matrix Y, without forming Qtilde.
  Matrix apply_Q(const Matrix& Y) const;

  /// Qtilde * v for a dn-vector (Qtilde is symmetric).
  Vector apply_Q(const Vector& v) const;

  /// Pi * W for an (m x k) matrix: two sparse triangular solves per column.
  Matrix apply_Pi(const Matrix& W) const;

  /// Diagonal of the Cholesky factor of the reduced weighted Laplacian
  /// (conditioning diagnostics).
  Vector cholesky_diagonal() const;

  /// Solves the reduced (node 0 pinned) system L_tau[1:,1:] X = rhs.
  Matrix solve_reduced_laplacian(const Matrix& rhs) const;

 private:
  int n_ = 0, d_ = 0, m_ = 0;
  SparseMatrix L_tau_;
  SparseMatrix L_rho_;
  SparseMatrix V_;
  SparseMatrix T_;
  Vector omega_;
  Vector omega_sqrt_;
  SparseMatrix A_reduced_;
  SparseMatrix trans_block_diag_;
  Scalar diagonal_scale_ = 0;
  Scalar q_norm_bound_ = 0;
  // Factor of A_red Omega A_red^T == the reduced L_tau; serves both the
  // projection Pi and translation recovery.
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> reduced_laplacian_chol_;
};

/// Builds all data matrices and factorizations for a connected graph.
DataMatrixSet build_data_matrices(const MeasurementGraph& g);

/// Optimal translations (d x n, t_0 pinned to the origin) for a fixed block
/// rotation matrix R (d x dn): solves the pinned linear system
/// L_tau t = -(V R^T) over nodes 1..n-1.
Matrix recover_translations(const DataMatrixSet& mats, const Matrix& R);

/// The full maximum-likelihood cost of Problem 1:
/// sum over directed edges of kappa ||R_j - R_i R~_ij||_F^2
///                          + tau ||t_j - t_i - R_i t~_ij||^2.
Scalar evaluate_full_cost(const MeasurementGraph& g, const PoseEstimate& x);

} // namespace sesync
