#include "sesync/staircase.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <iostream>

#include "sesync/rounding.hpp"

namespace sesync {

const char* to_string(StaircaseStatus s) {
  switch (s) {
    case StaircaseStatus::certified: return "certified";
    case StaircaseStatus::relaxation_gap: return "relaxation_gap";
    case StaircaseStatus::rank_deficient: return "rank_deficient";
    case StaircaseStatus::max_rank_reached: return "max_rank_reached";
    case StaircaseStatus::eig_failure: return "eig_failure";
    case StaircaseStatus::escape_failure: return "escape_failure";
  }
  return "unknown";
}

int default_r0(int d) { return d + 2; }
int default_r_max(int d) { return d + 6; }

CertificateOperator::CertificateOperator(const DataMatrixSet& mats, const Matrix& Y)
    : mats_(&mats) {
  const int d = mats.d(), n = mats.n();
  StiefelProduct manifold(n, d, static_cast<int>(Y.rows()));
  // Lambda(Y) = SymBlockDiag(Qtilde Y^T Y): block i = sym((Y Qtilde)_i^T Y_i)
  multiplier_blocks_ = manifold.sym_blocks(mats.apply_Q(Y), Y);

  Scalar max_block = 0;
  for (int i = 0; i < n; ++i)
    max_block = std::max(max_block, multiplier_blocks_.middleCols(d * i, d).norm());
  sigma_upper_ = mats.q_norm_bound() + max_block;
}

Vector CertificateOperator::apply(const Vector& v) const {
  const int d = mats_->d(), n = mats_->n();
  Vector out = mats_->apply_Q(v);
  for (int i = 0; i < n; ++i)
    out.segment(d * i, d) -=
        multiplier_blocks_.middleCols(d * i, d) * v.segment(d * i, d);
  return out;
}

Vector certificate_matrix_apply(const DataMatrixSet& mats, const Matrix& Y, const Vector& v) {
  return CertificateOperator(mats, Y).apply(v);
}

MinEigResult min_eig(const DataMatrixSet& mats, const Matrix& Y, const LanczosConfig& cfg) {
  CertificateOperator op(mats, Y);
  return lanczos_min_eig([&op](const Vector& v) { return op.apply(v); },
                         mats.d() * mats.n(), op.sigma_upper(), cfg);
}

Matrix lift_and_escape(const DataMatrixSet& mats, const Matrix& Y, const Vector& eigvec,
                       const StaircaseConfig& cfg) {
  const int r = static_cast<int>(Y.rows());
  const int dn = static_cast<int>(Y.cols());

  Matrix Y_lift = Matrix::Zero(r + 1, dn);
  Y_lift.topRows(r) = Y;

  // Second-order descent direction: the certificate eigenvector placed in
  // the new row is tangent at the padded point and has model curvature
  // 2 lambda_min |v|^2 < 0.
  Matrix dir = Matrix::Zero(r + 1, dn);
  dir.row(r) = eigvec.normalized().transpose();

  Objective objective(mats, r + 1);
  const Scalar f0 = objective.cost(Y_lift);

  Scalar t = 1.0;
  for (int k = 0; k < cfg.escape_max_halvings; ++k, t *= 0.5) {
    Matrix candidate;
    try {
      candidate = objective.manifold().retract(Y_lift, t * dir);
    } catch (const std::runtime_error&) {
      continue;
    }
    if (objective.cost(candidate) < f0) return candidate;
  }
  return Matrix(); // no strict decrease found
}

namespace {

Scalar rank_deficiency_ratio(const Matrix& Y) {
  Eigen::JacobiSVD<Matrix> svd(Y);
  const Vector& sv = svd.singularValues();
  return sv(sv.size() - 1) / sv(0);
}

} // namespace

StaircaseResult riemannian_staircase(const DataMatrixSet& mats, const Matrix& Y0,
                                     const RtrConfig& rtr_cfg, const StaircaseConfig& st_cfg) {
  using clock = std::chrono::steady_clock;
  const int d = mats.d();
  const int r0 = static_cast<int>(Y0.rows());
  const int r_max = st_cfg.r_max > 0 ? st_cfg.r_max : default_r_max(d);
  const Scalar eig_tol = st_cfg.eig_tol_factor * mats.diagonal_scale();

  StaircaseResult result;
  result.Y = Y0;

  for (int r = r0; r <= r_max; ++r) {
    const auto t0 = clock::now();

    Objective objective(mats, r);
    objective.set_preconditioner_enabled(rtr_cfg.use_preconditioner);
    RtrResult rtr = solve_rtr(objective, result.Y, rtr_cfg);
    result.Y = rtr.Y;
    result.rank = r;
    result.traces.push_back(std::move(rtr.trace));

    const auto t_eig = clock::now();
    MinEigResult eig = min_eig(mats, result.Y, st_cfg.lanczos);
    const double eig_time_s = std::chrono::duration<double>(clock::now() - t_eig).count();

    result.rounded = round_solution(result.Y, d, &mats);
    Certificate cert;
    cert.lambda_min = eig.lambda_min;
    cert.eigenvector = eig.eigenvector;
    cert.eig_converged = eig.converged;
    cert.eig_tol = eig_tol;
    cert.sdp_value = rtr.cost;
    cert.rounded_value = (mats.apply_Q(result.rounded).array() * result.rounded.array()).sum();
    cert.rel_gap = (cert.rounded_value - cert.sdp_value) /
                   std::max(Scalar(1), std::abs(cert.sdp_value));
    cert.certified = eig.converged && cert.lambda_min >= -eig_tol &&
                     cert.rel_gap <= st_cfg.gap_tol;
    result.certificate = cert;

    LevelRecord level;
    level.rank = r;
    level.cost = rtr.cost;
    level.grad_norm = rtr.grad_norm;
    level.lambda_min = eig.lambda_min;
    level.rtr_iterations = rtr.iterations;
    level.eig_matvecs = eig.matvecs;
    level.time_s = std::chrono::duration<double>(clock::now() - t0).count();
    level.eig_time_s = eig_time_s;
    result.levels.push_back(level);

    if (st_cfg.verbose)
      std::cout << "staircase level r=" << r << ": cost=" << rtr.cost
                << " |grad|=" << rtr.grad_norm << " lambda_min=" << eig.lambda_min
                << " rel_gap=" << cert.rel_gap << (cert.certified ? " (certified)" : "")
                << "\n";

    if (cert.certified) {
      result.status = StaircaseStatus::certified;
      return result;
    }
    if (!eig.converged) {
      result.status = StaircaseStatus::eig_failure;
      return result;
    }
    if (eig.lambda_min >= -eig_tol) {
      // The certificate matrix is PSD, so Y already attains the SDP optimum;
      // the remaining gap is the relaxation's, and no escape direction
      // exists. Return uncertified.
      result.status = StaircaseStatus::relaxation_gap;
      return result;
    }
    if (rank_deficiency_ratio(result.Y) <= st_cfg.rank_tol) {
      result.status = StaircaseStatus::rank_deficient;
      return result;
    }
    if (r == r_max) break;

    const Matrix escaped = lift_and_escape(mats, result.Y, eig.eigenvector, st_cfg);
    if (escaped.size() == 0) {
      result.status = StaircaseStatus::escape_failure;
      return result;
    }
    result.Y = escaped;
  }

  result.status = StaircaseStatus::max_rank_reached;
  return result;
}

} // namespace sesync
