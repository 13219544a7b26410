#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "sesync/objective.hpp"
#include "sesync/types.hpp"

namespace sesync {

struct RtrConfig {
  Scalar grad_tol = 0;      // 0 -> 1e-6 * sqrt(dn)
  Scalar rel_func_tol = 1e-9;
  int max_outer = 300;
  Scalar delta0 = 0;        // 0 -> ||Y0|| / 8
  Scalar delta_max = 0;     // 0 -> ||Y0||
  Scalar eta1 = 0.05;       // acceptance ratio
  Scalar eta2 = 0.7;        // expansion ratio
  Scalar tcg_kappa = 0.1;   // inner linear tolerance
  Scalar tcg_theta = 1.0;   // inner superlinear exponent
  int max_inner = 0;        // 0 -> dn
  bool use_preconditioner = false;
  bool verbose = false;
};

enum class TcgStatus { negative_curvature, boundary, inner_tol, max_inner };
const char* to_string(TcgStatus s);

struct TcgResult {
  Matrix step;
  TcgStatus status = TcgStatus::inner_tol;
  int iterations = 0;
  Scalar model_decrease = 0;  // m(0) - m(step), >= 0
  Scalar cauchy_decrease = 0; // decrease of the first (Cauchy) iterate
};

/// Steihaug-Toint truncated conjugate gradient on the model
/// m(s) = <grad, s> + 0.5 <s, hess(s)>, trust region ||s|| <= delta
/// (norm taken in the preconditioned metric when a preconditioner is
/// supplied). Inner stop: ||residual|| <= ||grad|| min(kappa, ||grad||^theta).
TcgResult truncated_cg_core(const std::function<Matrix(const Matrix&)>& hess,
                            const std::function<Matrix(const Matrix&)>& precond,
                            const Matrix& grad, Scalar delta, const RtrConfig& cfg,
                            int max_inner);

/// tCG on the Riemannian quadratic model of the objective at Y.
TcgResult truncated_cg(const Objective& h, const Matrix& Y, const Matrix& grad,
                       Scalar delta, const RtrConfig& cfg);

struct RtrIteration {
  int iteration = 0;
  Scalar cost = 0;
  Scalar grad_norm = 0;
  Scalar delta = 0;
  Scalar rho = 0;
  int inner_iterations = 0;
  TcgStatus inner_status = TcgStatus::inner_tol;
  bool accepted = false;
  double time_s = 0;
};

struct SolveTrace {
  std::vector<RtrIteration> iterations;
  void write_csv(std::ostream& out) const;
};

enum class RtrStatus { gradient_tolerance, relative_decrease, max_iterations, radius_underflow };
const char* to_string(RtrStatus s);

struct RtrResult {
  Matrix Y;
  Scalar cost = 0;
  Scalar grad_norm = 0;
  RtrStatus status = RtrStatus::max_iterations;
  int iterations = 0;
  SolveTrace trace;
};

/// Truncated-Newton Riemannian trust-region method. Accepted steps satisfy
/// rho >= eta1; accepted costs decrease strictly; deterministic for fixed
/// inputs.
RtrResult solve_rtr(const Objective& h, const Matrix& Y0, const RtrConfig& cfg);

} // namespace sesync
