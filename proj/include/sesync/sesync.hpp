#pragma once

#include <string>

#include "sesync/data_matrices.hpp"
#include "sesync/experiments.hpp"
#include "sesync/measurement_graph.hpp"
#include "sesync/rounding.hpp"
#include "sesync/rtr.hpp"
#include "sesync/staircase.hpp"

namespace sesync {

enum class Initialization { random, chordal };

struct SolveOptions {
  Initialization init = Initialization::chordal;
  unsigned long seed = 0;
  RtrConfig rtr;
  StaircaseConfig staircase;
};

struct Timings {
  double build_s = 0;
  double solve_s = 0;
  double certify_s = 0;
  double round_s = 0;
  double total_s = 0;
};

/// Everything the pipeline returns for one instance: the feasible estimate,
/// its optimality certificate, per-level records, and timings.
struct SolveResult {
  PoseEstimate estimate;
  Certificate certificate;
  StaircaseStatus status = StaircaseStatus::max_rank_reached;
  std::vector<LevelRecord> levels;
  std::vector<SolveTrace> traces;
  int final_rank = 0;
  Timings timings;
  unsigned long seed = 0;
  Initialization init = Initialization::chordal;
  int n = 0, d = 0, m = 0;
};

/// The full pipeline: build data matrices, run the Riemannian Staircase from
/// the requested initialization, round, and recover translations.
SolveResult solve(const MeasurementGraph& g, const SolveOptions& opts);

/// Same, reusing prebuilt data matrices.
SolveResult solve(const MeasurementGraph& g, const DataMatrixSet& mats,
                  const SolveOptions& opts);

/// Certificate for an externally supplied estimate: projects any non-rotation
/// blocks (with a warning), checks first-order criticality and the minimum
/// eigenvalue of S(R), and reports the duality gap against the dual bound
/// tr(Lambda) + dn * min(0, lambda_min).
struct ExternalCertificate {
  Scalar objective = 0;      // tr(Qtilde R^T R)
  Scalar grad_norm = 0;      // Riemannian gradient norm at the candidate
  Scalar lambda_min = 0;
  Scalar dual_bound = 0;
  Scalar gap = 0;            // objective - dual_bound >= 0
  Scalar rel_gap = 0;
  bool critical = false;
  bool certified = false;
  bool projected_blocks = false;
};

ExternalCertificate certify_estimate(const DataMatrixSet& mats, const PoseEstimate& candidate,
                                     const SolveOptions& opts);

/// JSON serialization of results (schema_version field included).
std::string result_to_json(const SolveResult& result, const std::string& input_name);
std::string certificate_to_json(const ExternalCertificate& cert, const std::string& input_name);

const char* to_string(Initialization init);

} // namespace sesync
