#include "sesync/min_eig.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace sesync {

MinEigResult lanczos_min_eig(const SymmetricOperator& apply_S, int dim,
                             Scalar sigma_upper, const LanczosConfig& cfg) {
  MinEigResult result;
  const Scalar sigma = cfg.shift.value_or(sigma_upper);
  const Scalar scale = std::max(sigma, Scalar(1e-300));
  const Scalar tol = cfg.rel_tol * std::max(scale, Scalar(1));

  auto apply_shifted = [&](const Vector& v) { return Vector(sigma * v - apply_S(v)); };

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<Scalar> gauss;
  Vector v0(dim);
  for (int i = 0; i < dim; ++i) v0(i) = gauss(rng);
  v0.normalize();

  const int basis_cap = std::min(cfg.num_vectors, dim);

  Scalar best_theta = -std::numeric_limits<Scalar>::infinity();
  Vector best_vec = v0;

  while (result.matvecs < cfg.max_matvecs) {
    Matrix basis(dim, basis_cap);
    basis.col(0) = v0;
    Vector alpha(basis_cap), beta(basis_cap);

    int steps = 0;
    bool invariant = false;
    for (int j = 0; j < basis_cap; ++j) {
      Vector w = apply_shifted(basis.col(j));
      ++result.matvecs;
      alpha(j) = basis.col(j).dot(w);
      w -= alpha(j) * basis.col(j);
      if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
      // Full reorthogonalization (twice) against the stored basis.
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
      beta(j) = w.norm();
      steps = j + 1;
      if (beta(j) <= 1e-13 * std::max(scale, Scalar(1))) {
        invariant = true; // exact invariant subspace reached
        break;
      }
      if (j + 1 < basis_cap) basis.col(j + 1) = w / beta(j);
    }

    // Ritz pairs of the tridiagonal matrix.
    Matrix tri = Matrix::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
      tri(j, j) = alpha(j);
      if (j + 1 < steps) {
        tri(j, j + 1) = beta(j);
        tri(j + 1, j) = beta(j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(tri);
    const int top = steps - 1; // eigenvalues ascending; dominant Ritz pair last
    const Scalar theta = es.eigenvalues()(top);
    const Vector y = es.eigenvectors().col(top);
    const Scalar residual = invariant ? 0 : std::abs(beta(steps - 1) * y(steps - 1));

    Vector ritz = basis.leftCols(steps) * y;
    ritz.normalize();

    if (theta > best_theta) {
      best_theta = theta;
      best_vec = ritz;
    }

    if (residual <= tol || steps >= dim) {
      result.converged = true;
      break;
    }
    v0 = ritz; // restart from the best available direction
  }

  result.lambda_min = sigma - best_theta;
  result.eigenvector = best_vec;
  return result;
}

} // namespace sesync
