#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sesync {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar>;
using Triplet = Eigen::Triplet<Scalar>;

} // namespace sesync
