#include "sesync/measurement_graph.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "sesync/geometry.hpp"

namespace sesync {

PoseMeasurement invert_measurement(const PoseMeasurement& m) {
  PoseMeasurement out;
  out.tail = m.head;
  out.head = m.tail;
  out.R = m.R.transpose();
  out.t = -(m.R.transpose() * m.t);
  out.tau = m.tau;
  out.kappa = m.kappa;
  return out;
}

Matrix PoseEstimate::rotation_block() const {
  const int d = dim(), n = size();
  Matrix R(d, d * n);
  for (int i = 0; i < n; ++i) R.block(0, d * i, d, d) = rotations[i];
  return R;
}

Matrix PoseEstimate::translation_block() const {
  const int d = dim(), n = size();
  Matrix t(d, n);
  for (int i = 0; i < n; ++i) t.col(i) = translations[i];
  return t;
}

PoseEstimate PoseEstimate::from_blocks(const Matrix& R_block, const Matrix& t_block) {
  PoseEstimate est;
  const int d = static_cast<int>(R_block.rows());
  const int n = static_cast<int>(R_block.cols()) / d;
  est.rotations.reserve(n);
  est.translations.reserve(n);
  for (int i = 0; i < n; ++i) {
    est.rotations.push_back(R_block.block(0, d * i, d, d));
    est.translations.push_back(t_block.col(i));
  }
  return est;
}

ConnectivityReport check_connectivity(int n, const std::vector<PoseMeasurement>& edges) {
  ConnectivityReport report;
  report.component.assign(n, -1);

  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }

  int num_components = 0;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (report.component[start] >= 0) continue;
    const int label = num_components++;
    stack.push_back(start);
    report.component[start] = label;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (report.component[v] < 0) {
          report.component[v] = label;
          stack.push_back(v);
        }
      }
    }
  }
  report.num_components = num_components;
  report.connected = (num_components == 1) && n > 0;
  return report;
}

ConnectivityReport check_connectivity(const MeasurementGraph& g) {
  return check_connectivity(g.n, g.edges);
}

namespace {

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw std::runtime_error("g2o parse error at line " + std::to_string(line) + ": " + what);
}

// Reads the row-major upper triangle of a k x k information matrix and
// mirrors it into a full symmetric matrix.
Matrix read_information(std::istringstream& ss, int k, int line) {
  Matrix info(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      Scalar v;
      if (!(ss >> v)) parse_error(line, "truncated information matrix");
      info(i, j) = v;
      info(j, i) = v;
    }
  return info;
}

// Reduces an information matrix (translation block first, rotation block
// second) to the scalar pair (tau, kappa) used by the isotropic noise model:
// tau = d / tr(Sigma_t), kappa = d(d-1)/2 / tr(Sigma_R), where Sigma_t and
// Sigma_R are the inverses of the corresponding diagonal blocks.
std::pair<Scalar, Scalar> reduce_information(const Matrix& info, int d, int line) {
  const int rot_dim = d * (d - 1) / 2;
  const Matrix It = info.topLeftCorner(d, d);
  const Matrix Ir = info.bottomRightCorner(rot_dim, rot_dim);

  Eigen::LLT<Matrix> llt_t(It);
  if (llt_t.info() != Eigen::Success)
    parse_error(line, "translational information block is not positive definite");
  Eigen::LLT<Matrix> llt_r(Ir);
  if (llt_r.info() != Eigen::Success)
    parse_error(line, "rotational information block is not positive definite");

  const Scalar tau = d / llt_t.solve(Matrix::Identity(d, d)).trace();
  const Scalar kappa =
      rot_dim / llt_r.solve(Matrix::Identity(rot_dim, rot_dim)).trace();
  return {tau, kappa};
}

// Merges a second measurement of the same unordered pair into `base`
// (precision-weighted: tau and kappa add, translation and rotation are
// precision-averaged, the rotation re-projected onto SO(d)).
void merge_measurement(PoseMeasurement& base, PoseMeasurement incoming) {
  if (incoming.tail != base.tail) incoming = invert_measurement(incoming);
  const Scalar tau_sum = base.tau + incoming.tau;
  base.t = (base.tau * base.t + incoming.tau * incoming.t) / tau_sum;
  base.tau = tau_sum;

  const Scalar kappa_sum = base.kappa + incoming.kappa;
  Matrix blend;
  if (kappa_sum > 0)
    blend = (base.kappa * base.R + incoming.kappa * incoming.R) / kappa_sum;
  else
    blend = 0.5 * (base.R + incoming.R);
  base.R = nearest_rotation(blend);
  base.kappa = kappa_sum;
}

struct VertexRecord {
  Vector t;
  Matrix R;
};

} // namespace

MeasurementGraph parse_g2o(std::istream& in) {
  MeasurementGraph g;
  std::unordered_map<std::int64_t, int> id_map;
  std::unordered_map<std::int64_t, std::size_t> pair_index; // unordered pair -> edge slot
  std::unordered_map<int, VertexRecord> vertices;

  auto intern = [&](std::int64_t file_id) {
    auto it = id_map.find(file_id);
    if (it != id_map.end()) return it->second;
    const int id = g.n++;
    id_map.emplace(file_id, id);
    g.original_ids.push_back(file_id);
    return id;
  };

  auto set_dimension = [&](int d, int line) {
    if (g.d == 0)
      g.d = d;
    else if (g.d != d)
      parse_error(line, "mixed 2D and 3D records in one file");
  };

  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ss(line_text);
    std::string tag;
    if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;

    if (tag == "EDGE_SE2" || tag == "EDGE_SE3:QUAT") {
      const int d = (tag == "EDGE_SE2") ? 2 : 3;
      set_dimension(d, line);

      std::int64_t i, j;
      if (!(ss >> i >> j)) parse_error(line, "missing edge endpoints");

      PoseMeasurement m;
      m.t = Vector(d);
      if (d == 2) {
        Scalar theta;
        if (!(ss >> m.t(0) >> m.t(1) >> theta)) parse_error(line, "truncated SE2 edge");
        m.R = rotation2d(theta);
      } else {
        Scalar qx, qy, qz, qw;
        if (!(ss >> m.t(0) >> m.t(1) >> m.t(2) >> qx >> qy >> qz >> qw))
          parse_error(line, "truncated SE3 edge");
        const Scalar qnorm = std::sqrt(qx * qx + qy * qy + qz * qz + qw * qw);
        if (qnorm == 0) parse_error(line, "zero quaternion");
        if (std::abs(qnorm - 1.0) > 1e-6)
          std::cerr << "warning: line " << line << ": quaternion norm deviates by "
                    << std::abs(qnorm - 1.0) << "; renormalizing\n";
        m.R = quaternion_to_rotation(qx, qy, qz, qw);
      }

      const int info_dim = d + d * (d - 1) / 2;
      const Matrix info = read_information(ss, info_dim, line);
      std::tie(m.tau, m.kappa) = reduce_information(info, d, line);

      if (i == j) {
        std::cerr << "warning: line " << line << ": dropping self-loop on node " << i << "\n";
        continue;
      }
      m.tail = intern(i);
      m.head = intern(j);

      const std::int64_t a = std::min(m.tail, m.head);
      const std::int64_t b = std::max(m.tail, m.head);
      const std::int64_t key = a * (1LL << 31) + b;
      auto it = pair_index.find(key);
      if (it == pair_index.end()) {
        pair_index.emplace(key, g.edges.size());
        g.edges.push_back(std::move(m));
      } else {
        merge_measurement(g.edges[it->second], std::move(m));
      }
    } else if (tag == "VERTEX_SE2" || tag == "VERTEX_SE3:QUAT") {
      const int d = (tag == "VERTEX_SE2") ? 2 : 3;
      set_dimension(d, line);

      std::int64_t id;
      if (!(ss >> id)) parse_error(line, "missing vertex id");
      VertexRecord v;
      v.t = Vector(d);
      if (d == 2) {
        Scalar theta;
        if (!(ss >> v.t(0) >> v.t(1) >> theta)) parse_error(line, "truncated SE2 vertex");
        v.R = rotation2d(theta);
      } else {
        Scalar qx, qy, qz, qw;
        if (!(ss >> v.t(0) >> v.t(1) >> v.t(2) >> qx >> qy >> qz >> qw))
          parse_error(line, "truncated SE3 vertex");
        v.R = quaternion_to_rotation(qx, qy, qz, qw);
      }
      vertices.emplace(intern(id), std::move(v));
    }
    // Other record types (landmarks, fixes, ...) are outside the model and
    // skipped.
  }

  if (g.n == 0) throw std::runtime_error("g2o parse error: no poses found");

  const ConnectivityReport conn = check_connectivity(g);
  if (!conn.connected)
    throw std::runtime_error("g2o parse error: measurement graph has " +
                             std::to_string(conn.num_components) +
                             " connected components; expected 1");

  if (static_cast<int>(vertices.size()) == g.n) {
    PoseEstimate est;
    est.rotations.resize(g.n);
    est.translations.resize(g.n);
    for (auto& [id, v] : vertices) {
      est.rotations[id] = v.R;
      est.translations[id] = v.t;
    }
    g.vertex_estimates = std::move(est);
  }

  return g;
}

MeasurementGraph parse_g2o_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open g2o file: " + path);
  return parse_g2o(in);
}

void write_g2o(std::ostream& out, const MeasurementGraph& g, const PoseEstimate* estimate) {
  out << std::setprecision(17);
  const int d = g.d;

  if (estimate != nullptr) {
    for (int i = 0; i < g.n; ++i) {
      const std::int64_t id = g.original_ids.empty() ? i : g.original_ids[i];
      const Vector& t = estimate->translations[i];
      if (d == 2) {
        const Scalar theta = std::atan2(estimate->rotations[i](1, 0), estimate->rotations[i](0, 0));
        out << "VERTEX_SE2 " << id << ' ' << t(0) << ' ' << t(1) << ' ' << theta << '\n';
      } else {
        const Eigen::Vector4d q = rotation_to_quaternion(estimate->rotations[i]);
        out << "VERTEX_SE3:QUAT " << id << ' ' << t(0) << ' ' << t(1) << ' ' << t(2) << ' '
            << q(0) << ' ' << q(1) << ' ' << q(2) << ' ' << q(3) << '\n';
      }
    }
  }

  const int info_dim = d + d * (d - 1) / 2;
  for (const auto& e : g.edges) {
    const std::int64_t i = g.original_ids.empty() ? e.tail : g.original_ids[e.tail];
    const std::int64_t j = g.original_ids.empty() ? e.head : g.original_ids[e.head];
    Vector info_diag(info_dim);
    info_diag.head(d).setConstant(e.tau);
    info_diag.tail(info_dim - d).setConstant(e.kappa);

    if (d == 2) {
      const Scalar theta = std::atan2(e.R(1, 0), e.R(0, 0));
      out << "EDGE_SE2 " << i << ' ' << j << ' ' << e.t(0) << ' ' << e.t(1) << ' ' << theta;
    } else {
      const Eigen::Vector4d q = rotation_to_quaternion(e.R);
      out << "EDGE_SE3:QUAT " << i << ' ' << j << ' ' << e.t(0) << ' ' << e.t(1) << ' '
          << e.t(2) << ' ' << q(0) << ' ' << q(1) << ' ' << q(2) << ' ' << q(3);
    }
    for (int r = 0; r < info_dim; ++r)
      for (int c = r; c < info_dim; ++c)
        out << ' ' << (r == c ? info_diag(r) : 0.0);
    out << '\n';
  }
}

void write_g2o_file(const std::string& path, const MeasurementGraph& g,
                    const PoseEstimate* estimate) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_g2o(out, g, estimate);
}

} // namespace sesync
