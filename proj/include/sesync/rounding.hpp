#pragma once

#include "sesync/data_matrices.hpp"
#include "sesync/measurement_graph.hpp"
#include "sesync/types.hpp"

namespace sesync {

/// Rounds an r x dn staircase iterate to a feasible d x dn block rotation
/// matrix: rank-d truncated SVD, a determinant vote deciding one global
/// orientation flip, then per-block projection to the nearest rotation.
/// When the vote ties (n even) and `mats` is given, the flip minimizing the
/// rounded cost is chosen; without `mats`, no flip (deterministic either way).
Matrix round_solution(const Matrix& Y, int d, const DataMatrixSet* mats = nullptr);

/// Applies the single global SE(d) transform minimizing the sum of squared
/// translation distances to `ref` (closed-form Procrustes over the
/// translation point sets). Evaluation-only utility.
PoseEstimate align_gauge(const PoseEstimate& est, const PoseEstimate& ref);

} // namespace sesync
