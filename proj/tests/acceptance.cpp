// Acceptance suite: end-to-end checks of the full solver against frozen
// tolerances, one PASS/FAIL/SKIP line per criterion. Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sesync/rounding.hpp"
#include "sesync/sesync.hpp"
#include "test_helpers.hpp"

using namespace sesync;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { PASS, FAIL, SKIP } kind = FAIL;
  std::string detail;
};

Outcome pass(std::string detail) { return {Outcome::PASS, std::move(detail)}; }
Outcome fail(std::string detail) { return {Outcome::FAIL, std::move(detail)}; }
Outcome skip(std::string detail) { return {Outcome::SKIP, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Criterion 1: zero-noise exactness from random initialization.
Outcome criterion_zero_noise() {
  int runs = 0;
  double worst_obj = 0, worst_pose = 0, worst_time = 0;
  for (int dim : {2, 3})
    for (int s : {2, 3, 4})
      for (unsigned long seed = 0; seed < 10; ++seed) {
        CubeConfig cfg;
        cfg.dim = dim;
        cfg.s = s;
        cfg.sigma_r = 0;
        cfg.sigma_t = 0;
        cfg.p_lc = 0.1;
        cfg.seed = 100 * dim + seed;
        const CubeInstance inst = generate_cube(cfg);

        SolveOptions opts;
        opts.init = Initialization::random;
        opts.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult result = solve(inst.graph, opts);
        const double elapsed = seconds_since(t0);
        ++runs;

        if (!result.certificate.certified)
          return fail("uncertified zero-noise instance (d=" + std::to_string(dim) +
                      ", s=" + std::to_string(s) + ", seed=" + std::to_string(seed) + ")");
        const PoseEstimate aligned = align_gauge(result.estimate, inst.ground_truth);
        const Metrics metrics = evaluate_metrics(inst.graph, aligned, inst.ground_truth);
        const double pose_err = std::max(metrics.rotation_error_mean, metrics.translation_rmse);

        worst_obj = std::max(worst_obj, std::abs(result.certificate.rounded_value));
        worst_pose = std::max(worst_pose, pose_err);
        worst_time = std::max(worst_time, elapsed);
        if (std::abs(result.certificate.rounded_value) > 1e-8)
          return fail("objective " + std::to_string(result.certificate.rounded_value) +
                      " > 1e-8 (d=" + std::to_string(dim) + ", s=" + std::to_string(s) + ")");
        if (pose_err > 1e-6)
          return fail("pose error " + std::to_string(pose_err) + " > 1e-6");
        if (elapsed > 5.0)
          return fail("runtime " + std::to_string(elapsed) + " s > 5 s");
      }
  std::ostringstream detail;
  detail << runs << " runs certified; worst objective " << worst_obj << ", worst pose error "
         << worst_pose << ", worst time " << worst_time << " s";
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: the reported-exact noise regime at desk scale.
Outcome criterion_paper_regime() {
  const int trials = 30;
  int certified = 0;
  double worst_gap = 0, worst_time = 0;
  for (unsigned long seed = 0; seed < trials; ++seed) {
    CubeConfig cfg;
    cfg.s = 5;
    cfg.p_lc = 0.1;
    cfg.sigma_r = 0.1;
    cfg.sigma_t = 0.5;
    cfg.seed = seed;
    const CubeInstance inst = generate_cube(cfg);

    SolveOptions opts;
    opts.init = Initialization::random;
    opts.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult result = solve(inst.graph, opts);
    const double elapsed = seconds_since(t0);
    worst_time = std::max(worst_time, elapsed);
    if (elapsed > 30.0)
      return fail("runtime " + std::to_string(elapsed) + " s > 30 s (seed " +
                  std::to_string(seed) + ")");
    if (result.certificate.certified) {
      ++certified;
      worst_gap = std::max(worst_gap, result.certificate.rel_gap);
      if (result.certificate.rel_gap > 1e-6)
        return fail("certified run with rel_gap " + std::to_string(result.certificate.rel_gap));
    }
  }
  std::ostringstream detail;
  detail << certified << "/" << trials << " certified, worst certified rel_gap " << worst_gap
         << ", worst time " << worst_time << " s";
  if (certified < 27) return fail("certification rate below 90%: " + detail.str());
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 3: breakdown under increasing rotational noise.
Outcome criterion_breakdown() {
  const std::vector<double> sigmas = {0.5, 1.0, 1.5};
  const int trials = 20;
  std::vector<int> rates;
  for (double sigma_r : sigmas) {
    int certified = 0;
    for (unsigned long seed = 0; seed < trials; ++seed) {
      CubeConfig cfg;
      cfg.s = 5;
      cfg.p_lc = 0.1;
      cfg.sigma_r = sigma_r;
      cfg.sigma_t = 0.5;
      cfg.seed = 300 + seed;
      const CubeInstance inst = generate_cube(cfg);

      SolveOptions opts;
      opts.init = Initialization::random;
      opts.seed = seed;
      const SolveResult result = solve(inst.graph, opts);
      if (result.certificate.certified) {
        ++certified;
      } else {
        // uncertified runs still return feasible estimates and ordered bounds
        for (const Matrix& R : result.estimate.rotations)
          if (!is_rotation(R, 1e-8))
            return fail("uncertified run returned an infeasible rotation block");
        const Scalar slack =
            1e-8 * std::max(Scalar(1), std::abs(result.certificate.sdp_value));
        if (result.certificate.sdp_value > result.certificate.rounded_value + slack)
          return fail("sdp_value exceeds rounded_value on an uncertified run");
      }
    }
    rates.push_back(certified);
  }
  std::ostringstream detail;
  detail << "certification counts /" << trials << ":";
  for (std::size_t k = 0; k < sigmas.size(); ++k)
    detail << " sigma_R=" << sigmas[k] << " -> " << rates[k];
  for (std::size_t k = 1; k < rates.size(); ++k)
    if (rates[k] > rates[k - 1])
      return fail("certification rate not non-increasing: " + detail.str());
  if (rates.back() >= trials)
    return fail("certification did not break down by sigma_R = 1.5: " + detail.str());
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 4: benchmark dataset objectives (requires dataset files).
Outcome criterion_datasets() {
  const char* env = std::getenv("SESYNC_DATASET_DIR");
  std::vector<fs::path> roots;
  if (env != nullptr) roots.emplace_back(env);
  roots.emplace_back("data");
  roots.emplace_back("../data");

  struct Dataset {
    const char* label;
    std::vector<const char*> aliases;
    double target;
  };
  const std::vector<Dataset> datasets = {
      {"sphere", {"sphere.g2o", "sphere2500.g2o", "sphere_2500.g2o"}, 5.759e2},
      {"torus", {"torus.g2o", "torus3D.g2o", "torus3d.g2o"}, 1.211e4},
      {"garage", {"garage.g2o", "parking-garage.g2o", "parkingGarage.g2o"}, 6.299e-1},
  };

  auto locate = [&](const Dataset& ds) -> fs::path {
    for (const auto& root : roots)
      for (const char* alias : ds.aliases)
        if (fs::exists(root / alias)) return root / alias;
    return {};
  };

  bool any_found = false;
  std::ostringstream detail;
  for (const auto& ds : datasets) {
    const fs::path path = locate(ds);
    if (path.empty()) {
      detail << ds.label << ": missing; ";
      continue;
    }
    any_found = true;
    const MeasurementGraph graph = parse_g2o_file(path.string());
    SolveOptions opts;
    opts.init = Initialization::chordal;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult result = solve(graph, opts);
    const double elapsed = seconds_since(t0);
    const double rel =
        std::abs(result.certificate.rounded_value - ds.target) / std::abs(ds.target);
    detail << ds.label << ": objective " << result.certificate.rounded_value << " (rel "
           << rel << ", " << elapsed << " s, "
           << (result.certificate.certified ? "certified" : "UNCERTIFIED") << "); ";
    if (!result.certificate.certified)
      return fail("dataset " + std::string(ds.label) + " not certified");
    if (rel > 0.005)
      return fail("dataset " + std::string(ds.label) + " objective off by " +
                  std::to_string(rel));
  }
  if (!any_found)
    return skip("benchmark g2o files not present (set SESYNC_DATASET_DIR or place them "
                "under ./data); cannot download in this environment");
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 5: dense-oracle equivalence on 50 random instances with dn <= 120.
Outcome criterion_dense_oracles() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<Scalar> gauss;
  int count = 0;
  double worst_q = 0, worst_eig = 0, worst_cost = 0;

  for (int trial = 0; trial < 50; ++trial) {
    CubeInstance inst;
    if (trial % 2 == 0) {
      const int s = 2 + trial % 3; // d=3: n in {8, 27}; dn <= 81... s=4 would be 192
      inst = testing::small_cube(std::min(s, 3), 0.1 + 0.01 * (trial % 5), 0.3, 4000 + trial);
    } else {
      const int s = 3 + trial % 5; // d=2: n = s^2 <= 49, dn <= 98
      inst = testing::small_cube(s, 0.1 + 0.02 * (trial % 4), 0.4, 5000 + trial, 2, 0.2);
    }
    const int d = inst.graph.d, n = inst.graph.n, dn = d * n;
    if (dn > 120) return fail("internal: instance too large");
    ++count;

    const DataMatrixSet mats(inst.graph);
    const Matrix Q_dense = testing::dense_q(inst.graph, mats);

    // (a) implicit products match the dense construction
    const Matrix Q_implicit = mats.apply_Q(Matrix(Matrix::Identity(dn, dn)));
    const double q_err = (Q_implicit - Q_dense).cwiseAbs().maxCoeff();
    worst_q = std::max(worst_q, q_err);
    if (q_err > 1e-9) return fail("implicit Q mismatch " + std::to_string(q_err));

    // (b) implicit S min-eig matches the dense symmetric eigensolver
    const StiefelProduct M(n, d, d + 2);
    const Matrix Y = M.random_point(rng);
    LanczosConfig eig_cfg;
    eig_cfg.rel_tol = 1e-12;
    const MinEigResult eig = min_eig(mats, Y, eig_cfg);
    const Matrix S = testing::dense_certificate(inst.graph, mats, Y);
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const double eig_err = std::abs(eig.lambda_min - es.eigenvalues()(0));
    worst_eig = std::max(worst_eig, eig_err);
    if (!eig.converged || eig_err > 1e-7)
      return fail("min-eig mismatch " + std::to_string(eig_err));

    // (c) analytic translation elimination agrees with the full cost
    Matrix R(d, dn);
    for (int i = 0; i < n; ++i) R.middleCols(d * i, d) = random_rotation(d, rng);
    const Matrix trans = recover_translations(mats, R);
    const Scalar full = evaluate_full_cost(inst.graph, PoseEstimate::from_blocks(R, trans));
    const Scalar reduced = (mats.apply_Q(R).array() * R.array()).sum();
    const double cost_err = std::abs(full - reduced) / std::max(1.0, std::abs(reduced));
    worst_cost = std::max(worst_cost, cost_err);
    if (cost_err > 1e-8) return fail("translation-elimination mismatch " + std::to_string(cost_err));
  }
  std::ostringstream detail;
  detail << count << " instances; worst Q err " << worst_q << ", worst eig err " << worst_eig
         << ", worst cost rel err " << worst_cost;
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 6: derivative property suite.
Outcome criterion_derivatives() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);

  const auto inst = testing::small_cube(3, 0.1, 0.4, 600);
  const DataMatrixSet mats(inst.graph);
  const Objective h(mats, 5);
  const StiefelProduct& M = h.manifold();
  const Matrix Y = M.random_point(rng);

  // gradient vs finite differences along 20 random retracted directions
  const Matrix grad = h.riemannian_gradient(Y);
  double worst_grad = 0;
  for (int k = 0; k < 20; ++k) {
    Matrix V = M.random_tangent(Y, rng);
    V /= V.norm();
    const Scalar t = 1e-6;
    const Scalar fd =
        (h.cost(M.retract(Y, t * V)) - h.cost(M.retract(Y, -t * V))) / (2 * t);
    const Scalar an = StiefelProduct::inner(grad, V);
    const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
    worst_grad = std::max(worst_grad, rel);
    if (rel > 1e-5) return fail("gradient FD error " + std::to_string(rel));
  }

  // Hessian: self-adjointness at a generic point
  double worst_sym = 0;
  for (int k = 0; k < 10; ++k) {
    const Matrix V1 = M.random_tangent(Y, rng);
    const Matrix V2 = M.random_tangent(Y, rng);
    const Scalar a = StiefelProduct::inner(h.hessian_vector_product(Y, V1), V2);
    const Scalar b = StiefelProduct::inner(V1, h.hessian_vector_product(Y, V2));
    const double err = std::abs(a - b) / std::max(1.0, std::abs(a));
    worst_sym = std::max(worst_sym, err);
    if (err > 1e-9) return fail("Hessian asymmetry " + std::to_string(err));
  }

  // Hessian vs second differences along retracted rays at a critical point
  // (the QR retraction is first-order, so the comparison is made where the
  // gradient term vanishes)
  RtrConfig rtr_cfg;
  rtr_cfg.grad_tol = 1e-10;
  const RtrResult solved = solve_rtr(h, M.random_point(rng), rtr_cfg);
  if (solved.grad_norm > 1e-9) return fail("could not reach a critical point");
  double worst_hess = 0;
  for (int k = 0; k < 10; ++k) {
    Matrix V = M.random_tangent(solved.Y, rng);
    V /= V.norm();
    const Scalar t = 1e-4;
    const Scalar fd = (h.cost(M.retract(solved.Y, t * V)) - 2 * h.cost(solved.Y) +
                       h.cost(M.retract(solved.Y, -t * V))) /
                      (t * t);
    const Scalar an =
        StiefelProduct::inner(h.hessian_vector_product(solved.Y, V), V);
    const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
    worst_hess = std::max(worst_hess, rel);
    if (rel > 1e-4) return fail("Hessian second-difference error " + std::to_string(rel));
  }

  // projection: idempotent and tangent
  double worst_proj = 0;
  std::normal_distribution<Scalar> gauss;
  for (int k = 0; k < 10; ++k) {
    Matrix X(M.r(), M.ambient_cols());
    for (int i = 0; i < X.rows(); ++i)
      for (int j = 0; j < X.cols(); ++j) X(i, j) = gauss(rng);
    const Matrix P = M.project_tangent(Y, X);
    const double idem = (M.project_tangent(Y, P) - P).cwiseAbs().maxCoeff();
    double tangency = 0;
    for (int i = 0; i < M.n(); ++i) {
      const Matrix B =
          Y.middleCols(3 * i, 3).transpose() * P.middleCols(3 * i, 3);
      tangency = std::max(tangency, (B + B.transpose()).cwiseAbs().maxCoeff());
    }
    worst_proj = std::max(worst_proj, std::max(idem, tangency));
    if (idem > 1e-10 || tangency > 1e-10)
      return fail("projection error " + std::to_string(std::max(idem, tangency)));
  }

  const double elapsed = seconds_since(t0);
  if (elapsed > 60.0) return fail("suite took " + std::to_string(elapsed) + " s > 60 s");
  std::ostringstream detail;
  detail << "worst grad FD " << worst_grad << ", Hessian sym " << worst_sym
         << ", Hessian FD " << worst_hess << ", projection " << worst_proj << " ("
         << elapsed << " s)";
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 7: brute-force MLE oracle for d = 2, n = 3.
//
// With theta_0 = 0 fixed by gauge, the translation-eliminated cost is the
// trigonometric polynomial
//   f(t1, t2) = c0 + 2 sum_{i<j} [p_ij cos(t_i - t_j) + q_ij sin(t_i - t_j)]
// whose coefficients come from the dense-oracle Q. The oracle grids both
// angles at 1e-3 rad and polishes the best cells with Newton steps.
struct TrigCost {
  double c0, p01, q01, p02, q02, p12, q12;

  double eval(double t1, double t2) const {
    return c0 + 2 * (p01 * std::cos(t1) - q01 * std::sin(t1)) +
           2 * (p02 * std::cos(t2) - q02 * std::sin(t2)) +
           2 * (p12 * std::cos(t1 - t2) + q12 * std::sin(t1 - t2));
  }
  Eigen::Vector2d grad(double t1, double t2) const {
    const double d12 = -p12 * std::sin(t1 - t2) + q12 * std::cos(t1 - t2);
    return {2 * (-p01 * std::sin(t1) - q01 * std::cos(t1)) + 2 * d12,
            2 * (-p02 * std::sin(t2) - q02 * std::cos(t2)) - 2 * d12};
  }
  Eigen::Matrix2d hess(double t1, double t2) const {
    const double e12 = -p12 * std::cos(t1 - t2) - q12 * std::sin(t1 - t2);
    Eigen::Matrix2d H;
    H(0, 0) = 2 * (-p01 * std::cos(t1) + q01 * std::sin(t1)) + 2 * e12;
    H(1, 1) = 2 * (-p02 * std::cos(t2) + q02 * std::sin(t2)) + 2 * e12;
    H(0, 1) = H(1, 0) = -2 * e12;
    return H;
  }
};

Outcome criterion_brute_force() {
  int matched = 0;
  double worst_rel = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const CubeInstance inst =
        testing::make_ring_instance(3, 2, /*sigma_r=*/0.05, /*sigma_t=*/0.05, 700 + trial);
    const DataMatrixSet mats(inst.graph);
    const Matrix Q = testing::dense_q(inst.graph, mats);

    auto block = [&](int i, int j) { return Q.block(2 * i, 2 * j, 2, 2); };
    TrigCost f;
    f.c0 = block(0, 0).trace() + block(1, 1).trace() + block(2, 2).trace();
    auto coeffs = [&](int i, int j, double& p, double& q) {
      const Matrix B = block(i, j);
      p = B(0, 0) + B(1, 1);
      q = B(0, 1) - B(1, 0);
    };
    coeffs(0, 1, f.p01, f.q01);
    coeffs(0, 2, f.p02, f.q02);
    coeffs(1, 2, f.p12, f.q12);

    // grid at 1e-3 rad
    const double step = 1e-3;
    const int cells = static_cast<int>(std::ceil(2 * M_PI / step));
    std::vector<double> c(cells), s(cells);
    for (int k = 0; k < cells; ++k) {
      const double ang = -M_PI + k * step;
      c[k] = std::cos(ang);
      s[k] = std::sin(ang);
    }
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0, best_j = 0;
    for (int i = 0; i < cells; ++i) {
      // cos(-t1), sin(-t1)
      const double c1 = c[i], s1 = -s[i];
      const double base = f.c0 + 2 * (f.p01 * c1 + f.q01 * s1);
      for (int j = 0; j < cells; ++j) {
        const double c2 = c[j], s2 = -s[j];
        // cos(t1 - t2) = c1' c2' + s1' s2' on the raw angles
        const double c12 = c[i] * c[j] + s[i] * s[j];
        const double s12 = s[i] * c[j] - c[i] * s[j];
        const double value =
            base + 2 * (f.p02 * c2 + f.q02 * s2) + 2 * (f.p12 * c12 + f.q12 * s12);
        if (value < best) {
          best = value;
          best_i = i;
          best_j = j;
        }
      }
    }

    // Newton polish from the best grid cell
    double t1 = -M_PI + best_i * step, t2 = -M_PI + best_j * step;
    for (int it = 0; it < 50; ++it) {
      const Eigen::Vector2d gv = f.grad(t1, t2);
      const Eigen::Vector2d delta = f.hess(t1, t2).fullPivLu().solve(gv);
      if (!delta.allFinite()) break;
      t1 -= delta(0);
      t2 -= delta(1);
      if (delta.norm() < 1e-14) break;
    }
    const double oracle = std::min(best, f.eval(t1, t2));

    SolveOptions opts;
    opts.init = Initialization::random;
    opts.seed = trial;
    const SolveResult result = solve(inst.graph, opts);
    if (!result.certificate.certified)
      return fail("low-noise d=2 n=3 instance not certified (trial " +
                  std::to_string(trial) + ")");
    const double rel = std::abs(result.certificate.rounded_value - oracle) /
                       std::max(1.0, std::abs(oracle));
    worst_rel = std::max(worst_rel, rel);
    if (rel > 1e-5)
      return fail("objective " + std::to_string(result.certificate.rounded_value) +
                  " vs oracle " + std::to_string(oracle) + " (rel " + std::to_string(rel) +
                  ")");
    ++matched;
  }
  std::ostringstream detail;
  detail << matched << "/20 instances matched; worst rel err " << worst_rel;
  return pass(detail.str());
}

} // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Entry> criteria = {
      {"1. zero-noise exactness (d in {2,3}, s in {2,3,4}, 10 seeds)", criterion_zero_noise},
      {"2. paper noise regime (s=5, 30 seeds)", criterion_paper_regime},
      {"3. breakdown regime (sigma_R in {0.5, 1.0, 1.5})", criterion_breakdown},
      {"4. benchmark dataset objectives (sphere/torus/garage)", criterion_datasets},
      {"5. dense-oracle equivalence (50 instances, dn <= 120)", criterion_dense_oracles},
      {"6. derivative property suite", criterion_derivatives},
      {"7. brute-force MLE oracle (d=2, n=3, 20 instances)", criterion_brute_force},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const char* tag = outcome.kind == Outcome::PASS   ? "PASS"
                      : outcome.kind == Outcome::SKIP ? "SKIP"
                                                      : "FAIL";
    if (outcome.kind == Outcome::FAIL) ++failures;
    std::cout << tag << "  " << entry.name << " — " << outcome.detail << std::endl;
  }
  return failures;
}
