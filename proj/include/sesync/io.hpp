#pragma once

#include <iosfwd>
#include <string>

#include "sesync/data_matrices.hpp"
#include "sesync/measurement_graph.hpp"
#include "sesync/types.hpp"

namespace sesync {

/// TUM trajectory format: `id tx ty tz qx qy qz qw` per pose. 2D poses are
/// written with z = 0 and a yaw-only quaternion.
void write_tum(std::ostream& out, const PoseEstimate& est);
void write_tum_file(const std::string& path, const PoseEstimate& est);

/// Reads a candidate trajectory: TUM lines, or VERTEX_SE2/VERTEX_SE3:QUAT
/// lines when the file is in g2o format. Poses are returned in ascending id
/// order; `d` selects the expected dimension.
PoseEstimate read_trajectory_file(const std::string& path, int d);

/// Writes a trajectory file, picking the format from the extension
/// (".g2o" -> VERTEX lines, anything else -> TUM).
void write_trajectory_file(const std::string& path, const MeasurementGraph& g,
                           const PoseEstimate& est);

/// Matrix Market coordinate output (real general).
void write_matrix_market(std::ostream& out, const SparseMatrix& A);

/// Dumps all data matrices (L_tau, L_rho, V, T, Omega, A_reduced) as
/// Matrix Market files under the given directory, for cross-validation with
/// external tools.
void dump_data_matrices(const std::string& directory, const DataMatrixSet& mats);

} // namespace sesync
