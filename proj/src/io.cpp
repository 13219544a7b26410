#include "sesync/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sesync/geometry.hpp"

namespace sesync {

namespace {

Eigen::Vector4d pose_quaternion(const Matrix& R) {
  if (R.rows() == 3) return rotation_to_quaternion(R);
  // 2D: yaw-only quaternion about z
  const Scalar theta = std::atan2(R(1, 0), R(0, 0));
  return {0, 0, std::sin(theta / 2), std::cos(theta / 2)};
}

} // namespace

void write_tum(std::ostream& out, const PoseEstimate& est) {
  out << std::setprecision(17);
  const int d = est.dim();
  for (int i = 0; i < est.size(); ++i) {
    const Vector& t = est.translations[i];
    const Eigen::Vector4d q = pose_quaternion(est.rotations[i]);
    out << i << ' ' << t(0) << ' ' << t(1) << ' ' << (d == 3 ? t(2) : 0.0) << ' ' << q(0)
        << ' ' << q(1) << ' ' << q(2) << ' ' << q(3) << '\n';
  }
}

void write_tum_file(const std::string& path, const PoseEstimate& est) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_tum(out, est);
}

PoseEstimate read_trajectory_file(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);

  std::map<long long, std::pair<Vector, Matrix>> poses;
  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ss(line_text);
    std::string first;
    if (!(ss >> first) || first.empty() || first[0] == '#') continue;

    long long id;
    Vector t(d);
    Matrix R;
    if (first == "VERTEX_SE3:QUAT" || first == "VERTEX_SE2") {
      if (!(ss >> id)) throw std::runtime_error("bad vertex line " + std::to_string(line));
      if (first == "VERTEX_SE2") {
        if (d != 2) throw std::runtime_error("trajectory dimension mismatch");
        Scalar theta;
        if (!(ss >> t(0) >> t(1) >> theta))
          throw std::runtime_error("bad vertex line " + std::to_string(line));
        R = rotation2d(theta);
      } else {
        if (d != 3) throw std::runtime_error("trajectory dimension mismatch");
        Scalar qx, qy, qz, qw;
        if (!(ss >> t(0) >> t(1) >> t(2) >> qx >> qy >> qz >> qw))
          throw std::runtime_error("bad vertex line " + std::to_string(line));
        R = quaternion_to_rotation(qx, qy, qz, qw);
      }
    } else if (first == "EDGE_SE3:QUAT" || first == "EDGE_SE2" || first == "FIX") {
      continue;
    } else {
      // TUM record: id tx ty tz qx qy qz qw
      Scalar tx, ty, tz, qx, qy, qz, qw;
      std::istringstream row(line_text);
      if (!(row >> id >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
        throw std::runtime_error("bad trajectory line " + std::to_string(line));
      if (d == 3) {
        t << tx, ty, tz;
        R = quaternion_to_rotation(qx, qy, qz, qw);
      } else {
        t << tx, ty;
        const Scalar theta = 2 * std::atan2(qz, qw);
        R = rotation2d(theta);
      }
    }
    poses[id] = {t, R};
  }

  PoseEstimate est;
  est.rotations.reserve(poses.size());
  est.translations.reserve(poses.size());
  for (auto& [id, pose] : poses) {
    est.translations.push_back(pose.first);
    est.rotations.push_back(pose.second);
  }
  return est;
}

void write_trajectory_file(const std::string& path, const MeasurementGraph& g,
                           const PoseEstimate& est) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".g2o") {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << std::setprecision(17);
    for (int i = 0; i < est.size(); ++i) {
      const std::int64_t id = g.original_ids.empty() ? i : g.original_ids[i];
      const Vector& t = est.translations[i];
      if (g.d == 2) {
        const Scalar theta = std::atan2(est.rotations[i](1, 0), est.rotations[i](0, 0));
        out << "VERTEX_SE2 " << id << ' ' << t(0) << ' ' << t(1) << ' ' << theta << '\n';
      } else {
        const Eigen::Vector4d q = rotation_to_quaternion(est.rotations[i]);
        out << "VERTEX_SE3:QUAT " << id << ' ' << t(0) << ' ' << t(1) << ' ' << t(2) << ' '
            << q(0) << ' ' << q(1) << ' ' << q(2) << ' ' << q(3) << '\n';
      }
    }
  } else {
    write_tum_file(path, est);
  }
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int col = 0; col < A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(A, col); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void dump_data_matrices(const std::string& directory, const DataMatrixSet& mats) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto dump = [&](const std::string& name, const SparseMatrix& A) {
    std::ofstream out(fs::path(directory) / (name + ".mtx"));
    if (!out) throw std::runtime_error("cannot write matrix dump in " + directory);
    write_matrix_market(out, A);
  };
  dump("L_tau", mats.L_tau());
  dump("L_rho", mats.L_rho());
  dump("V", mats.V());
  dump("T", mats.T());
  dump("A_reduced", mats.A_reduced());
  SparseMatrix omega(mats.m(), mats.m());
  for (int e = 0; e < mats.m(); ++e) omega.insert(e, e) = mats.omega()(e);
  dump("Omega", omega);
}

} // namespace sesync
