#pragma once

#include <vector>

#include "sesync/data_matrices.hpp"
#include "sesync/min_eig.hpp"
#include "sesync/objective.hpp"
#include "sesync/rtr.hpp"
#include "sesync/types.hpp"

namespace sesync {

/// Machine-checkable evidence of global optimality for a staircase solution:
/// the minimum eigenvalue of the certificate matrix
///   S(Y) = Qtilde - SymBlockDiag(Qtilde Y^T Y)
/// and the relative duality gap between the rounded feasible estimate and
/// the lower bound tr(Qtilde Y^T Y).
struct Certificate {
  Scalar lambda_min = 0;
  Vector eigenvector;
  Scalar sdp_value = 0;
  Scalar rounded_value = 0;
  Scalar rel_gap = 0;
  bool certified = false;
  bool eig_converged = false;
  Scalar eig_tol = 0; // the absolute tolerance lambda_min was tested against
};

struct StaircaseConfig {
  int r0 = 0;                  // 0 -> d + 2
  int r_max = 0;               // 0 -> d + 6
  Scalar eig_tol_factor = 1e-5; // eig_tol = factor * mean diagonal scale
  Scalar gap_tol = 1e-6;
  Scalar rank_tol = 1e-6;      // rank deficient when sigma_min <= tol * sigma_max
  int escape_max_halvings = 30;
  LanczosConfig lanczos;
  bool verbose = false;
};

/// Implicit product with the certificate matrix S(Y); precomputes the
/// multiplier blocks once so Lanczos matvecs stay cheap and reentrant.
class CertificateOperator {
 public:
  CertificateOperator(const DataMatrixSet& mats, const Matrix& Y);

  Vector apply(const Vector& v) const;

  /// Upper bound for lambda_max(S), from the sparse 1-norm bound on Qtilde
  /// plus the largest multiplier block norm.
  Scalar sigma_upper() const { return sigma_upper_; }

  const Matrix& multiplier_blocks() const { return multiplier_blocks_; }

 private:
  const DataMatrixSet* mats_;
  Matrix multiplier_blocks_; // d x dn packed
  Scalar sigma_upper_ = 0;
};

/// S(Y) * v for a dn-vector (convenience wrapper; prefer the operator when
/// applying many products at the same Y).
Vector certificate_matrix_apply(const DataMatrixSet& mats, const Matrix& Y, const Vector& v);

/// Minimum eigenpair of S(Y) via shifted Lanczos.
MinEigResult min_eig(const DataMatrixSet& mats, const Matrix& Y, const LanczosConfig& cfg);

/// Pads Y with a zero row (same cost, feasible at rank r+1) and walks the
/// second-order descent direction built from the certificate eigenvector,
/// halving the step until the cost strictly decreases. Returns the escaped
/// point, or an empty matrix when no decrease was found within the budget.
Matrix lift_and_escape(const DataMatrixSet& mats, const Matrix& Y, const Vector& eigvec,
                       const StaircaseConfig& cfg);

enum class StaircaseStatus {
  certified,
  relaxation_gap,   // S(Y) is PSD (SDP solved) but the rounding gap persists
  rank_deficient,   // stopped at a rank-deficient critical point
  max_rank_reached, // exhausted levels without a certificate
  eig_failure,      // eigenvalue iteration did not converge
  escape_failure,   // saddle escape found no decrease
};
const char* to_string(StaircaseStatus s);

struct LevelRecord {
  int rank = 0;
  Scalar cost = 0;
  Scalar grad_norm = 0;
  Scalar lambda_min = 0;
  int rtr_iterations = 0;
  int eig_matvecs = 0;
  double time_s = 0;
  double eig_time_s = 0;
};

struct StaircaseResult {
  Matrix Y;                 // final iterate (r x dn)
  int rank = 0;
  Matrix rounded;           // rounded feasible rotations (d x dn)
  Certificate certificate;  // certificate at the final iterate
  StaircaseStatus status = StaircaseStatus::max_rank_reached;
  std::vector<LevelRecord> levels;
  std::vector<SolveTrace> traces; // one RTR trace per level
};

/// The Riemannian Staircase: solve the rank-restricted problem at increasing
/// rank until the certificate accepts or a rank-deficient critical point or
/// the rank cap is reached.
StaircaseResult riemannian_staircase(const DataMatrixSet& mats, const Matrix& Y0,
                                     const RtrConfig& rtr_cfg, const StaircaseConfig& st_cfg);

/// Spec'd defaults: r0 = d + 2, r_max = d + 6.
int default_r0(int d);
int default_r_max(int d);

} // namespace sesync
