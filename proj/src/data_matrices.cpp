#include "sesync/data_matrices.hpp"

#include <stdexcept>
#include <vector>

namespace sesync {

DataMatrixSet::DataMatrixSet(const MeasurementGraph& g)
    : n_(g.n), d_(g.d), m_(g.num_measurements()) {
  if (n_ < 2 || m_ < n_ - 1)
    throw std::invalid_argument("DataMatrixSet: graph too small or under-constrained");

  const int n = n_, d = d_, m = m_;

  std::vector<Triplet> ltau_trips, lrho_trips, v_trips, t_trips, ared_trips, tbd_trips;
  ltau_trips.reserve(4 * m);
  lrho_trips.reserve(2 * m * (d + d * d));
  v_trips.reserve(2 * m * d);
  t_trips.reserve(m * d);
  ared_trips.reserve(2 * m);

  omega_ = Vector(m);
  std::vector<Matrix> trans_diag_blocks(n, Matrix::Zero(d, d));

  for (int e = 0; e < m; ++e) {
    const PoseMeasurement& meas = g.edges[e];
    const int i = meas.tail, j = meas.head;
    if (meas.tau <= 0) throw std::invalid_argument("DataMatrixSet: non-positive tau");

    // Translational weight Laplacian
    ltau_trips.emplace_back(i, i, meas.tau);
    ltau_trips.emplace_back(j, j, meas.tau);
    ltau_trips.emplace_back(i, j, -meas.tau);
    ltau_trips.emplace_back(j, i, -meas.tau);

    // Rotational connection Laplacian: kappa I_d on both diagonal blocks,
    // -kappa R on the (i,j) block and its transpose on (j,i)
    for (int k = 0; k < d; ++k) {
      lrho_trips.emplace_back(d * i + k, d * i + k, meas.kappa);
      lrho_trips.emplace_back(d * j + k, d * j + k, meas.kappa);
    }
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        lrho_trips.emplace_back(d * i + r, d * j + c, -meas.kappa * meas.R(r, c));
        lrho_trips.emplace_back(d * j + r, d * i + c, -meas.kappa * meas.R(c, r));
      }

    // Translational data matrices: row i of V gains tau t^T in block column i,
    // row j loses it; row e of T carries -t^T in block column i
    for (int k = 0; k < d; ++k) {
      v_trips.emplace_back(i, d * i + k, meas.tau * meas.t(k));
      v_trips.emplace_back(j, d * i + k, -meas.tau * meas.t(k));
      t_trips.emplace_back(e, d * i + k, -meas.t(k));
    }

    // Reduced incidence matrix of the directed graph (node 0's row dropped)
    if (i > 0) ared_trips.emplace_back(i - 1, e, -1.0);
    if (j > 0) ared_trips.emplace_back(j - 1, e, 1.0);

    omega_(e) = meas.tau;
    trans_diag_blocks[i] += meas.tau * meas.t * meas.t.transpose();
  }

  L_tau_ = SparseMatrix(n, n);
  L_tau_.setFromTriplets(ltau_trips.begin(), ltau_trips.end());
  L_rho_ = SparseMatrix(d * n, d * n);
  L_rho_.setFromTriplets(lrho_trips.begin(), lrho_trips.end());
  V_ = SparseMatrix(n, d * n);
  V_.setFromTriplets(v_trips.begin(), v_trips.end());
  T_ = SparseMatrix(m, d * n);
  T_.setFromTriplets(t_trips.begin(), t_trips.end());
  A_reduced_ = SparseMatrix(n - 1, m);
  A_reduced_.setFromTriplets(ared_trips.begin(), ared_trips.end());
  omega_sqrt_ = omega_.cwiseSqrt();

  for (int i = 0; i < n; ++i)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        if (trans_diag_blocks[i](r, c) != 0)
          tbd_trips.emplace_back(d * i + r, d * i + c, trans_diag_blocks[i](r, c));
  trans_block_diag_ = SparseMatrix(d * n, d * n);
  trans_block_diag_.setFromTriplets(tbd_trips.begin(), tbd_trips.end());

  const SparseMatrix q_upper = L_rho_ + trans_block_diag_;
  diagonal_scale_ = Vector(q_upper.diagonal()).mean();
  Scalar norm1 = 0;
  for (int col = 0; col < q_upper.outerSize(); ++col) {
    Scalar colsum = 0;
    for (SparseMatrix::InnerIterator it(q_upper, col); it; ++it)
      colsum += std::abs(it.value());
    norm1 = std::max(norm1, colsum);
  }
  q_norm_bound_ = norm1;

  // Reduced weighted Laplacian A_red Omega A_red^T == L_tau with node 0's
  // row and column removed; SPD on connected graphs.
  const SparseMatrix reduced =
      A_reduced_ * omega_.asDiagonal() * A_reduced_.transpose();
  reduced_laplacian_chol_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>();
  reduced_laplacian_chol_->compute(reduced);
  if (reduced_laplacian_chol_->info() != Eigen::Success)
    throw std::runtime_error(
        "DataMatrixSet: Cholesky of the reduced Laplacian failed "
        "(numerically disconnected graph or invalid precisions)");
}

Matrix DataMatrixSet::apply_Pi(const Matrix& W) const {
  if (W.rows() != m_) throw std::invalid_argument("apply_Pi: dimension mismatch");
  const Matrix scaled = omega_sqrt_.asDiagonal() * W;
  const Matrix solved = reduced_laplacian_chol_->solve(A_reduced_ * scaled);
  return W - omega_sqrt_.asDiagonal() * Matrix(A_reduced_.transpose() * solved);
}

Matrix DataMatrixSet::apply_Q(const Matrix& Y) const {
  if (Y.cols() != d_ * n_) throw std::invalid_argument("apply_Q: dimension mismatch");
  const Matrix Yt = Y.transpose(); // dn x r
  Matrix out = L_rho_ * Yt;

  Matrix W = T_ * Yt;                       // m x r
  W = omega_sqrt_.asDiagonal() * W;
  W = apply_Pi(W);
  W = omega_sqrt_.asDiagonal() * W;
  out += T_.transpose() * W;
  return out.transpose();
}

Vector DataMatrixSet::apply_Q(const Vector& v) const {
  if (v.size() != d_ * n_) throw std::invalid_argument("apply_Q: dimension mismatch");
  Vector out = L_rho_ * v;
  Vector w = T_ * v;
  w.array() *= omega_sqrt_.array();
  w = apply_Pi(w);
  w.array() *= omega_sqrt_.array();
  out += T_.transpose() * w;
  return out;
}

Vector DataMatrixSet::cholesky_diagonal() const {
  const SparseMatrix L = reduced_laplacian_chol_->matrixL();
  return L.diagonal();
}

Matrix DataMatrixSet::solve_reduced_laplacian(const Matrix& rhs) const {
  if (rhs.rows() != n_ - 1)
    throw std::invalid_argument("solve_reduced_laplacian: dimension mismatch");
  return reduced_laplacian_chol_->solve(rhs);
}

DataMatrixSet build_data_matrices(const MeasurementGraph& g) { return DataMatrixSet(g); }

Matrix recover_translations(const DataMatrixSet& mats, const Matrix& R) {
  const int d = mats.d(), n = mats.n();
  if (R.rows() != d || R.cols() != d * n)
    throw std::invalid_argument("recover_translations: dimension mismatch");

  // Stationarity of the translational cost reads L_tau t^T = -(V R^T);
  // pinning t_0 = 0 drops node 0's row and column (gauge freedom makes this
  // equivalent to the pseudoinverse solution up to a global shift).
  const Matrix rhs = -(mats.V() * R.transpose()); // n x d
  const Matrix solved = mats.solve_reduced_laplacian(rhs.bottomRows(n - 1));

  Matrix t = Matrix::Zero(d, n);
  t.rightCols(n - 1) = solved.transpose();
  return t;
}

Scalar evaluate_full_cost(const MeasurementGraph& g, const PoseEstimate& x) {
  if (x.size() != g.n || x.dim() != g.d)
    throw std::invalid_argument("evaluate_full_cost: dimension mismatch");
  Scalar cost = 0;
  for (const auto& e : g.edges) {
    const Matrix& Ri = x.rotations[e.tail];
    const Matrix& Rj = x.rotations[e.head];
    const Vector& ti = x.translations[e.tail];
    const Vector& tj = x.translations[e.head];
    cost += e.kappa * (Rj - Ri * e.R).squaredNorm();
    cost += e.tau * (tj - ti - Ri * e.t).squaredNorm();
  }
  return cost;
}

} // namespace sesync
