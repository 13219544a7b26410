#include "sesync/rtr.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <ostream>

namespace sesync {

const char* to_string(TcgStatus s) {
  switch (s) {
    case TcgStatus::negative_curvature: return "negative_curvature";
    case TcgStatus::boundary: return "boundary";
    case TcgStatus::inner_tol: return "inner_tol";
    case TcgStatus::max_inner: return "max_inner";
  }
  return "unknown";
}

const char* to_string(RtrStatus s) {
  switch (s) {
    case RtrStatus::gradient_tolerance: return "gradient_tolerance";
    case RtrStatus::relative_decrease: return "relative_decrease";
    case RtrStatus::max_iterations: return "max_iterations";
    case RtrStatus::radius_underflow: return "radius_underflow";
  }
  return "unknown";
}

TcgResult truncated_cg_core(const std::function<Matrix(const Matrix&)>& hess,
                            const std::function<Matrix(const Matrix&)>& precond,
                            const Matrix& grad, Scalar delta, const RtrConfig& cfg,
                            int max_inner) {
  TcgResult result;
  result.step = Matrix::Zero(grad.rows(), grad.cols());

  const Scalar grad_norm = grad.norm();
  if (grad_norm == 0) return result;

  const Scalar stop_tol =
      grad_norm * std::min(cfg.tcg_kappa, std::pow(grad_norm, cfg.tcg_theta));
  const Scalar delta_sq = delta * delta;
  auto inner = [](const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); };

  Matrix r = grad;
  Matrix z = precond ? precond(r) : r;
  Matrix dir = -z;
  Scalar rz = inner(r, z);

  // Norms of the iterate in the preconditioned metric, by recurrence.
  Scalar e_Pe = 0, e_Pd = 0, d_Pd = rz;

  // Model value m(s) tracked by recurrence: the CG residual equals the model
  // gradient, and r_k is orthogonal to the current search direction, so
  // m(s + t dir) = m(s) - t rz + 0.5 t^2 dHd.
  Scalar model = 0;

  result.status = TcgStatus::max_inner;
  for (int k = 0; k < max_inner; ++k) {
    const Matrix Hd = hess(dir);
    const Scalar dHd = inner(dir, Hd);
    ++result.iterations;

    const Scalar alpha = (dHd > 0) ? rz / dHd : 0;
    const Scalar e_Pe_next = e_Pe + 2 * alpha * e_Pd + alpha * alpha * d_Pd;

    if (dHd <= 0 || e_Pe_next >= delta_sq) {
      // Follow dir to the trust-region boundary.
      const Scalar tau =
          (-e_Pd + std::sqrt(e_Pd * e_Pd + d_Pd * (delta_sq - e_Pe))) / d_Pd;
      result.step += tau * dir;
      model += -tau * rz + 0.5 * tau * tau * dHd;
      result.status = (dHd <= 0) ? TcgStatus::negative_curvature : TcgStatus::boundary;
      if (k == 0) result.cauchy_decrease = -model;
      break;
    }

    result.step += alpha * dir;
    model -= 0.5 * alpha * rz;
    e_Pe = e_Pe_next;
    if (k == 0) result.cauchy_decrease = -model;

    r += alpha * Hd;
    if (r.norm() <= stop_tol) {
      result.status = TcgStatus::inner_tol;
      break;
    }

    z = precond ? precond(r) : r;
    const Scalar rz_next = inner(r, z);
    const Scalar beta = rz_next / rz;
    dir = -z + beta * dir;
    e_Pd = beta * (e_Pd + alpha * d_Pd);
    d_Pd = rz_next + beta * beta * d_Pd;
    rz = rz_next;
  }

  result.model_decrease = -model;
  return result;
}

TcgResult truncated_cg(const Objective& h, const Matrix& Y, const Matrix& grad,
                       Scalar delta, const RtrConfig& cfg) {
  const int dn = h.manifold().ambient_cols();
  const int max_inner = cfg.max_inner > 0 ? cfg.max_inner : dn;
  auto hess = [&](const Matrix& V) { return h.hessian_vector_product(Y, V); };
  std::function<Matrix(const Matrix&)> precond;
  if (cfg.use_preconditioner && h.preconditioner_enabled())
    precond = [&](const Matrix& V) { return h.precondition(Y, V); };
  return truncated_cg_core(hess, precond, grad, delta, cfg, max_inner);
}

void SolveTrace::write_csv(std::ostream& out) const {
  out << "iteration,cost,gradnorm,delta,rho,inner_iters,time_s\n";
  for (const auto& it : iterations)
    out << it.iteration << ',' << it.cost << ',' << it.grad_norm << ',' << it.delta << ','
        << it.rho << ',' << it.inner_iterations << ',' << it.time_s << '\n';
}

RtrResult solve_rtr(const Objective& h, const Matrix& Y0, const RtrConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const StiefelProduct& M = h.manifold();
  M.check_shape(Y0, "solve_rtr(Y0)");

  const int dn = M.ambient_cols();
  const Scalar grad_tol = cfg.grad_tol > 0 ? cfg.grad_tol : 1e-6 * std::sqrt(Scalar(dn));
  const Scalar delta0 = cfg.delta0 > 0 ? cfg.delta0 : Y0.norm() / 8;
  const Scalar delta_max = cfg.delta_max > 0 ? cfg.delta_max : Y0.norm();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  RtrResult result;
  result.Y = Y0;
  Scalar f = h.cost(result.Y);
  Matrix grad = h.riemannian_gradient(result.Y);
  Scalar grad_norm = grad.norm();
  Scalar delta = delta0;

  result.status = RtrStatus::max_iterations;
  for (int iter = 0; iter < cfg.max_outer; ++iter) {
    if (grad_norm <= grad_tol) {
      result.status = RtrStatus::gradient_tolerance;
      break;
    }

    const auto t0 = clock::now();
    const TcgResult tcg = truncated_cg(h, result.Y, grad, delta, cfg);

    bool retract_failed = false;
    Matrix Y_prop;
    Scalar f_prop = std::numeric_limits<Scalar>::infinity();
    try {
      Y_prop = M.retract(result.Y, tcg.step);
      f_prop = h.cost(Y_prop);
    } catch (const std::runtime_error&) {
      retract_failed = true; // rank-deficient block; shrink and retry
    }

    const Scalar decrease = f - f_prop;
    const Scalar rho = retract_failed || tcg.model_decrease <= 0
                           ? -std::numeric_limits<Scalar>::infinity()
                           : decrease / std::max(tcg.model_decrease, eps * std::abs(f));
    const bool accepted = rho >= cfg.eta1;

    RtrIteration row;
    row.iteration = iter;
    row.cost = f;
    row.grad_norm = grad_norm;
    row.delta = delta;
    row.rho = rho;
    row.inner_iterations = tcg.iterations;
    row.inner_status = tcg.status;
    row.accepted = accepted;
    row.time_s = std::chrono::duration<double>(clock::now() - t0).count();
    result.trace.iterations.push_back(row);
    result.iterations = iter + 1;

    if (cfg.verbose)
      std::cout << "rtr iter " << iter << ": f=" << f << " |grad|=" << grad_norm
                << " delta=" << delta << " rho=" << rho << " inner=" << tcg.iterations
                << " (" << to_string(tcg.status) << (accepted ? ", accepted" : ", rejected")
                << ")\n";

    if (accepted) {
      const Scalar f_prev = f;
      result.Y = Y_prop;
      f = f_prop;
      grad = h.riemannian_gradient(result.Y);
      grad_norm = grad.norm();
      if (decrease < cfg.rel_func_tol * std::max(Scalar(1), std::abs(f_prev))) {
        result.status = RtrStatus::relative_decrease;
        break;
      }
    }

    if (rho < cfg.eta1)
      delta *= 0.25;
    else if (rho > cfg.eta2 && (tcg.status == TcgStatus::boundary ||
                                tcg.status == TcgStatus::negative_curvature))
      delta = std::min(2 * delta, delta_max);

    if (delta < 1e-14 * delta0) {
      result.status = RtrStatus::radius_underflow;
      break;
    }
  }

  result.cost = f;
  result.grad_norm = grad_norm;
  return result;
}

} // namespace sesync
