#include "sesync/experiments.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "sesync/geometry.hpp"

namespace sesync {

Eigen::Vector3i cube_path_coordinates(int k, int s, int dim) {
  auto plane = [s](int idx) {
    const int y = idx / s;
    const int x0 = idx % s;
    return Eigen::Vector2i(y % 2 == 0 ? x0 : s - 1 - x0, y);
  };
  if (dim == 2) {
    const Eigen::Vector2i xy = plane(k);
    return {xy.x(), xy.y(), 0};
  }
  const int layer_size = s * s;
  const int z = k / layer_size;
  int rem = k % layer_size;
  if (z % 2 == 1) rem = layer_size - 1 - rem; // reverse odd layers so steps stay adjacent
  const Eigen::Vector2i xy = plane(rem);
  return {xy.x(), xy.y(), z};
}

CubeInstance generate_cube(const CubeConfig& cfg) {
  if (cfg.s < 2) throw std::invalid_argument("generate_cube: s must be >= 2");
  if (cfg.dim != 2 && cfg.dim != 3) throw std::invalid_argument("generate_cube: dim must be 2 or 3");
  if (cfg.p_lc < 0 || cfg.p_lc > 1) throw std::invalid_argument("generate_cube: p_lc out of range");
  if (cfg.sigma_r < 0 || cfg.sigma_t < 0)
    throw std::invalid_argument("generate_cube: negative noise std");

  const int d = cfg.dim;
  const int s = cfg.s;
  const int n = d == 2 ? s * s : s * s * s;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<Scalar> gauss;
  std::uniform_real_distribution<Scalar> unif(0.0, 1.0);

  CubeInstance inst;
  inst.graph.n = n;
  inst.graph.d = d;
  inst.graph.original_ids.resize(n);
  for (int i = 0; i < n; ++i) inst.graph.original_ids[i] = i;

  // Ground truth: lattice positions along the path, Haar-random orientations.
  std::vector<int> site_to_path(n);
  inst.ground_truth.rotations.reserve(n);
  inst.ground_truth.translations.reserve(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3i c = cube_path_coordinates(k, s, d);
    site_to_path[(c.z() * s + c.y()) * s + c.x()] = k;
    inst.ground_truth.translations.push_back(c.head(d).cast<Scalar>());
    inst.ground_truth.rotations.push_back(random_rotation(d, rng));
  }

  // Candidate pairs: odometry along the path, then loop closures between
  // lattice neighbors that are not consecutive on the path.
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k + 1 < n; ++k) pairs.emplace_back(k, k + 1);

  const int zmax = d == 2 ? 1 : s;
  for (int z = 0; z < zmax; ++z)
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x) {
        const int here = site_to_path[(z * s + y) * s + x];
        auto consider = [&](int nx, int ny, int nz) {
          const int there = site_to_path[(nz * s + ny) * s + nx];
          const int a = std::min(here, there), b = std::max(here, there);
          if (b == a + 1) return;              // already an odometry edge
          if (unif(rng) < cfg.p_lc) pairs.emplace_back(a, b);
        };
        if (x + 1 < s) consider(x + 1, y, z);
        if (y + 1 < s) consider(x, y + 1, z);
        if (d == 3 && z + 1 < s) consider(x, y, z + 1);
      }

  const Scalar tau = cfg.sigma_t > 0 ? 1.0 / (cfg.sigma_t * cfg.sigma_t) : 1.0;
  const Scalar kappa = cfg.sigma_r > 0 ? 1.0 / (cfg.sigma_r * cfg.sigma_r) : 1.0;

  inst.graph.edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const Matrix& Ri = inst.ground_truth.rotations[i];
    const Matrix& Rj = inst.ground_truth.rotations[j];
    const Vector& ti = inst.ground_truth.translations[i];
    const Vector& tj = inst.ground_truth.translations[j];

    PoseMeasurement m;
    m.tail = i;
    m.head = j;
    m.tau = tau;
    m.kappa = kappa;

    m.t = Ri.transpose() * (tj - ti);
    for (int k = 0; k < d; ++k) m.t(k) += cfg.sigma_t * gauss(rng);

    const Matrix R_true = Ri.transpose() * Rj;
    if (d == 3) {
      Eigen::Vector3d w;
      w << gauss(rng), gauss(rng), gauss(rng);
      m.R = R_true * exp_so3(cfg.sigma_r * w);
    } else {
      m.R = R_true * rotation2d(cfg.sigma_r * gauss(rng));
    }
    inst.graph.edges.push_back(std::move(m));
  }

  return inst;
}

Matrix chordal_initialization(const DataMatrixSet& mats, int rank) {
  const int d = mats.d(), n = mats.n();
  const int dn = d * n;
  if (rank < d) throw std::invalid_argument("chordal_initialization: rank < d");

  // Reduced system: drop node 0's block (pinned to the identity) from the
  // connection Laplacian and solve for the remaining stacked transposes.
  const SparseMatrix& L = mats.L_rho();
  std::vector<Triplet> trips;
  Matrix rhs = Matrix::Zero(dn - d, d);
  for (int col = 0; col < L.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
      if (it.row() < d) continue;
      if (it.col() < d)
        rhs(it.row() - d, it.col()) -= it.value();
      else
        trips.emplace_back(it.row() - d, it.col() - d, it.value());
    }
  SparseMatrix L_red(dn - d, dn - d);
  L_red.setFromTriplets(trips.begin(), trips.end());

  Eigen::SimplicialLLT<SparseMatrix> llt(L_red);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("chordal_initialization: reduced system is singular");
  const Matrix X_rest = llt.solve(rhs);

  Matrix Y = Matrix::Zero(rank, dn);
  Y.block(0, 0, d, d) = Matrix::Identity(d, d);
  for (int i = 1; i < n; ++i)
    Y.block(0, d * i, d, d) =
        nearest_rotation(X_rest.block(d * (i - 1), 0, d, d).transpose());
  return Y;
}

Metrics evaluate_metrics(const MeasurementGraph& g, const PoseEstimate& est,
                         const PoseEstimate& ground_truth) {
  if (est.size() != ground_truth.size() || est.dim() != ground_truth.dim())
    throw std::invalid_argument("evaluate_metrics: size mismatch");
  Metrics out;
  out.objective = evaluate_full_cost(g, est);
  Scalar angle_sum = 0, trans_sq_sum = 0;
  for (int i = 0; i < est.size(); ++i) {
    angle_sum += rotation_angle(ground_truth.rotations[i], est.rotations[i]);
    trans_sq_sum += (ground_truth.translations[i] - est.translations[i]).squaredNorm();
  }
  out.rotation_error_mean = angle_sum / est.size();
  out.translation_rmse = std::sqrt(trans_sq_sum / est.size());
  return out;
}

} // namespace sesync
