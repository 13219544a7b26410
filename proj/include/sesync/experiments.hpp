#pragma once

#include "sesync/data_matrices.hpp"
#include "sesync/measurement_graph.hpp"
#include "sesync/types.hpp"

namespace sesync {

/// Synthetic grid-world configuration: s^dim poses on a cubical lattice
/// (1 m spacing), odometry along a boustrophedon path through every site,
/// and loop closures sampled independently with probability p_lc between
/// lattice-distance-1 pairs that are not path-consecutive.
struct CubeConfig {
  int s = 5;
  int dim = 3;          // 2 or 3
  Scalar p_lc = 0.1;
  Scalar sigma_r = 0.1; // rotational noise std (rad), Gaussian in so(d)
  Scalar sigma_t = 0.5; // translational noise std (m)
  unsigned long seed = 0;
};

struct CubeInstance {
  MeasurementGraph graph;
  PoseEstimate ground_truth;
};

/// Deterministic per seed. Edge precisions are the generative values
/// tau = 1/sigma_t^2, kappa = 1/sigma_r^2 (1.0 when the noise is zero).
CubeInstance generate_cube(const CubeConfig& cfg);

/// Lattice coordinates of the k-th pose on the boustrophedon path.
Eigen::Vector3i cube_path_coordinates(int k, int s, int dim);

/// Chordal initialization: solves the unconstrained linear relaxation of
/// rotation synchronization (block 0 pinned to the identity), projects each
/// block to the nearest rotation, and zero-pads to rank r.
Matrix chordal_initialization(const DataMatrixSet& mats, int rank);

struct Metrics {
  Scalar objective = 0;
  Scalar rotation_error_mean = 0; // mean angular error, rad
  Scalar translation_rmse = 0;    // m
};

/// Error metrics against ground truth; `est` should already be gauge-aligned
/// (see align_gauge). The objective itself is gauge-invariant.
Metrics evaluate_metrics(const MeasurementGraph& g, const PoseEstimate& est,
                         const PoseEstimate& ground_truth);

} // namespace sesync
