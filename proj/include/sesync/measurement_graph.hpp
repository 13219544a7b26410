#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sesync/types.hpp"

namespace sesync {

/// A single directed relative-pose observation from pose `tail` to pose
/// `head`, expressed in the frame of `tail`.
struct PoseMeasurement {
  int tail = 0;
  int head = 0;
  Vector t;          // measured relative translation (d-vector, meters)
  Matrix R;          // measured relative rotation (d x d)
  Scalar tau = 1.0;  // translational precision (1/m^2), > 0
  Scalar kappa = 1.0; // rotational concentration, >= 0

  int dim() const { return static_cast<int>(t.size()); }
};

/// Group inverse of a relative-pose measurement: endpoints swapped,
/// R' = R^T, t' = -R^T t, precisions unchanged.
PoseMeasurement invert_measurement(const PoseMeasurement& m);

/// A full assignment of poses x_i = (t_i, R_i).
struct PoseEstimate {
  std::vector<Matrix> rotations;
  std::vector<Vector> translations;

  int size() const { return static_cast<int>(rotations.size()); }
  int dim() const { return rotations.empty() ? 0 : static_cast<int>(rotations[0].rows()); }

  /// Rotations packed as the d x dn block matrix (R_1 ... R_n).
  Matrix rotation_block() const;
  /// Translations packed as a d x n matrix.
  Matrix translation_block() const;

  static PoseEstimate from_blocks(const Matrix& R_block, const Matrix& t_block);
};

/// The problem instance: n poses, directed measurements over a connected
/// undirected graph, node ids contiguous in [0, n).
struct MeasurementGraph {
  int n = 0;
  int d = 0;
  std::vector<PoseMeasurement> edges;

  /// Maps the contiguous internal id back to the id used in the source file.
  std::vector<std::int64_t> original_ids;

  /// Pose hints assembled from VERTEX records, present only when every node
  /// had one. Used for initialization only, never by the solver core.
  std::optional<PoseEstimate> vertex_estimates;

  int num_measurements() const { return static_cast<int>(edges.size()); }
};

struct ConnectivityReport {
  bool connected = false;
  int num_components = 0;
  std::vector<int> component; // per-node component label
};

ConnectivityReport check_connectivity(int n, const std::vector<PoseMeasurement>& edges);
ConnectivityReport check_connectivity(const MeasurementGraph& g);

/// Parses a g2o-format stream (EDGE_SE2 / EDGE_SE3:QUAT records, optional
/// VERTEX records). Node ids are re-indexed to [0, n) in order of first
/// appearance; duplicate measurements on a pair are merged by
/// precision-weighted averaging; self-loops are dropped with a warning.
/// Scalar precisions are reduced from the information matrix as
///   tau   = d / tr(inv(I_t)),      I_t the d x d translational block,
///   kappa = d(d-1)/2 / tr(inv(I_R)), I_R the rotational block.
/// Throws std::runtime_error (with line number) on malformed input, mixed
/// dimensions, non-positive-definite information blocks, or a disconnected
/// graph.
MeasurementGraph parse_g2o(std::istream& in);
MeasurementGraph parse_g2o_file(const std::string& path);

/// Writes the graph back out in g2o format with isotropic information
/// matrices (tau, kappa on the corresponding diagonal blocks), so that
/// parse -> write -> parse round-trips exactly. Vertex lines are written
/// from `estimate` when provided.
void write_g2o(std::ostream& out, const MeasurementGraph& g,
               const PoseEstimate* estimate = nullptr);
void write_g2o_file(const std::string& path, const MeasurementGraph& g,
                    const PoseEstimate* estimate = nullptr);

} // namespace sesync
