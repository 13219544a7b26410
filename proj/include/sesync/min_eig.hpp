#pragma once

#include <functional>
#include <optional>

#include "sesync/types.hpp"

namespace sesync {

using SymmetricOperator = std::function<Vector(const Vector&)>;

struct LanczosConfig {
  int max_matvecs = 20000;  // total matrix-vector product budget
  int num_vectors = 60;     // Krylov basis size per restart cycle
  Scalar rel_tol = 1e-6;    // converged when residual <= rel_tol * sigma
  unsigned long seed = 5489;
  std::optional<Scalar> shift; // override for the spectral shift sigma
};

struct MinEigResult {
  Scalar lambda_min = 0;
  Vector eigenvector;
  bool converged = false;
  int matvecs = 0;
};

/// Smallest eigenvalue (and eigenvector) of a symmetric operator of the
/// given dimension, by restarted Lanczos with full reorthogonalization on
/// the shifted operator sigma*I - S, where sigma >= lambda_max(S) turns the
/// smallest eigenvalue into the dominant one. Deterministic per seed.
MinEigResult lanczos_min_eig(const SymmetricOperator& apply_S, int dim,
                             Scalar sigma_upper, const LanczosConfig& cfg);

} // namespace sesync
