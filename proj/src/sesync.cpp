#include "sesync/sesync.hpp"

#include <chrono>
#include <iostream>

#include <nlohmann/json.hpp>

#include "sesync/geometry.hpp"

namespace sesync {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

const char* to_string(Initialization init) {
  return init == Initialization::random ? "random" : "chordal";
}

SolveResult solve(const MeasurementGraph& g, const SolveOptions& opts) {
  const auto t0 = clock_type::now();
  const DataMatrixSet mats(g);
  const double build_s = std::chrono::duration<double>(clock_type::now() - t0).count();
  SolveResult result = solve(g, mats, opts);
  result.timings.build_s = build_s;
  result.timings.total_s += build_s;
  return result;
}

SolveResult solve(const MeasurementGraph& g, const DataMatrixSet& mats,
                  const SolveOptions& opts) {
  SolveResult result;
  result.seed = opts.seed;
  result.init = opts.init;
  result.n = g.n;
  result.d = g.d;
  result.m = g.num_measurements();

  const int r0 = opts.staircase.r0 > 0 ? opts.staircase.r0 : default_r0(g.d);

  const auto t_solve = clock_type::now();
  Matrix Y0;
  if (opts.init == Initialization::chordal) {
    Y0 = chordal_initialization(mats, r0);
  } else {
    StiefelProduct manifold(g.n, g.d, r0);
    Y0 = manifold.random_point(opts.seed);
  }

  StaircaseResult stair = riemannian_staircase(mats, Y0, opts.rtr, opts.staircase);
  const double staircase_s =
      std::chrono::duration<double>(clock_type::now() - t_solve).count();
  double certify_s = 0;
  for (const auto& level : stair.levels) certify_s += level.eig_time_s;
  result.timings.certify_s = certify_s;
  result.timings.solve_s = staircase_s - certify_s;

  result.certificate = stair.certificate;
  result.status = stair.status;
  result.levels = std::move(stair.levels);
  result.traces = std::move(stair.traces);
  result.final_rank = stair.rank;

  const auto t_round = clock_type::now();
  const Matrix R = stair.rounded;
  const Matrix t = recover_translations(mats, R);
  result.estimate = PoseEstimate::from_blocks(R, t);
  result.timings.round_s =
      std::chrono::duration<double>(clock_type::now() - t_round).count();

  result.timings.total_s =
      result.timings.solve_s + result.timings.certify_s + result.timings.round_s;
  return result;
}

ExternalCertificate certify_estimate(const DataMatrixSet& mats, const PoseEstimate& candidate,
                                     const SolveOptions& opts) {
  const int d = mats.d(), n = mats.n();
  ExternalCertificate out;

  Matrix R = candidate.rotation_block();
  for (int i = 0; i < n; ++i) {
    if (!is_rotation(R.middleCols(d * i, d), 1e-8)) {
      R.middleCols(d * i, d) = nearest_rotation(R.middleCols(d * i, d));
      out.projected_blocks = true;
    }
  }
  if (out.projected_blocks)
    std::cerr << "warning: candidate had non-rotation blocks; projected to SO(d)\n";

  Objective objective(mats, d); // candidate lives at rank r = d
  out.objective = objective.cost(R);
  out.grad_norm = objective.riemannian_gradient(R).norm();

  LanczosConfig eig_cfg = opts.staircase.lanczos;
  const MinEigResult eig = min_eig(mats, R, eig_cfg);
  out.lambda_min = eig.lambda_min;

  // tr(Lambda(R)) equals the objective; shifting Lambda by min(0, lambda_min)
  // restores dual feasibility, giving a valid lower bound.
  out.dual_bound = out.objective + d * n * std::min(Scalar(0), eig.lambda_min);
  out.gap = out.objective - out.dual_bound;
  out.rel_gap = out.gap / std::max(Scalar(1), std::abs(out.objective));

  const Scalar eig_tol = opts.staircase.eig_tol_factor * mats.diagonal_scale();
  const int dn = d * n;
  const Scalar grad_tol =
      opts.rtr.grad_tol > 0 ? opts.rtr.grad_tol : 1e-6 * std::sqrt(Scalar(dn));
  out.critical = out.grad_norm <= 10 * grad_tol;
  out.certified = eig.converged && out.critical && eig.lambda_min >= -eig_tol;
  return out;
}

namespace {

json certificate_json(const Certificate& cert) {
  return json{{"lambda_min", cert.lambda_min},
              {"rel_gap", cert.rel_gap},
              {"sdp_value", cert.sdp_value},
              {"rounded_value", cert.rounded_value},
              {"certified", cert.certified},
              {"eig_converged", cert.eig_converged},
              {"eig_tol", cert.eig_tol}};
}

} // namespace

std::string result_to_json(const SolveResult& result, const std::string& input_name) {
  json levels = json::array();
  for (const auto& level : result.levels)
    levels.push_back(json{{"rank", level.rank},
                          {"cost", level.cost},
                          {"grad_norm", level.grad_norm},
                          {"lambda_min", level.lambda_min},
                          {"rtr_iterations", level.rtr_iterations},
                          {"eig_matvecs", level.eig_matvecs},
                          {"time_s", level.time_s}});

  json cert = certificate_json(result.certificate);
  cert["levels"] = static_cast<int>(result.levels.size());

  json doc{{"schema_version", 1},
           {"input", input_name},
           {"n", result.n},
           {"d", result.d},
           {"m", result.m},
           {"seed", result.seed},
           {"init", to_string(result.init)},
           {"status", to_string(result.status)},
           {"final_rank", result.final_rank},
           {"objective", result.certificate.rounded_value},
           {"certificate", cert},
           {"staircase", levels},
           {"timings",
            {{"build_s", result.timings.build_s},
             {"solve_s", result.timings.solve_s},
             {"certify_s", result.timings.certify_s},
             {"round_s", result.timings.round_s},
             {"total_s", result.timings.total_s}}}};
  return doc.dump(2);
}

std::string certificate_to_json(const ExternalCertificate& cert, const std::string& input_name) {
  json doc{{"schema_version", 1},
           {"input", input_name},
           {"objective", cert.objective},
           {"grad_norm", cert.grad_norm},
           {"lambda_min", cert.lambda_min},
           {"dual_bound", cert.dual_bound},
           {"gap", cert.gap},
           {"rel_gap", cert.rel_gap},
           {"critical", cert.critical},
           {"certified", cert.certified},
           {"projected_blocks", cert.projected_blocks}};
  return doc.dump(2);
}

} // namespace sesync
