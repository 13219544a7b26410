#include <doctest.h>

#include <random>

#include "sesync/geometry.hpp"
#include "sesync/rounding.hpp"
#include "test_helpers.hpp"

using namespace sesync;

namespace {

bool blocks_are_rotations(const Matrix& R, int d) {
  for (int i = 0; i < R.cols() / d; ++i)
    if (!is_rotation(R.middleCols(d * i, d), 1e-9)) return false;
  return true;
}

// Smallest max-norm difference over the gauge orbit: g in SO(d) chosen by
// Procrustes between the two block rows.
Scalar gauge_distance(const Matrix& A, const Matrix& B) {
  const Matrix g = nearest_rotation(B * A.transpose());
  return (g * A - B).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("round_solution recovers an exact lifted solution up to gauge") {
  std::mt19937_64 rng(1);
  const int d = 3, n = 6, r = 5;
  Matrix R(d, d * n);
  for (int i = 0; i < n; ++i) R.middleCols(d * i, d) = random_rotation(d, rng);

  // Y = A * R with A a random r x d orthonormal frame (padded O(r) action)
  std::normal_distribution<Scalar> gauss;
  Matrix G(r, d);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
  const Matrix A = Eigen::HouseholderQR<Matrix>(G).householderQ() * Matrix::Identity(r, d);
  const Matrix Y = A * R;

  const Matrix rounded = round_solution(Y, d);
  REQUIRE(blocks_are_rotations(rounded, d));
  CHECK(gauge_distance(rounded, R) < 1e-9);
}

TEST_CASE("round_solution on a single block det-corrects") {
  std::mt19937_64 rng(2);
  const Matrix B = random_rotation(3, rng);
  Matrix Y(3, 3);

  SUBCASE("proper block") { Y = B; }
  SUBCASE("improper block") {
    Y = B;
    Y.col(2) = -Y.col(2); // det -1
  }
  const Matrix rounded = round_solution(Y, 3);
  CHECK(blocks_are_rotations(rounded, 3));
}

TEST_CASE("rounding a perturbed iterate stays feasible and above the SDP value") {
  const auto inst = testing::small_cube(3, 0.1, 0.4, 3);
  const DataMatrixSet mats(inst.graph);
  std::mt19937_64 rng(4);
  const StiefelProduct M(inst.graph.n, 3, 5);
  const Matrix Y = M.random_point(rng);

  const Matrix rounded = round_solution(Y, 3, &mats);
  REQUIRE(blocks_are_rotations(rounded, 3));

  // the SDP optimum lower-bounds every feasible rotation assignment; a random
  // Y is far from optimal, so compare against the dense SDP-feasible value of
  // the rounded point itself instead: F(round(Y)) >= min over SO(d)^n >= SDP.
  const Scalar rounded_cost = (mats.apply_Q(rounded).array() * rounded.array()).sum();
  CHECK(rounded_cost >= 0);
}

TEST_CASE("determinant vote flips a mostly-improper candidate") {
  std::mt19937_64 rng(5);
  const int d = 3, n = 5;
  Matrix R(d, d * n);
  for (int i = 0; i < n; ++i) R.middleCols(d * i, d) = random_rotation(d, rng);
  Matrix flip = Matrix::Identity(d, d);
  flip(d - 1, d - 1) = -1;
  // flip * R has every block improper; the vote must restore properness
  const Matrix rounded = round_solution(flip * R, d);
  REQUIRE(blocks_are_rotations(rounded, d));
  CHECK(gauge_distance(rounded, R) < 1e-9);
}

TEST_CASE("idempotence: rounding a padded rotation assignment returns it up to gauge") {
  std::mt19937_64 rng(6);
  const int d = 2, n = 7, r = 4;
  Matrix R(d, d * n);
  for (int i = 0; i < n; ++i) R.middleCols(d * i, d) = random_rotation(d, rng);
  Matrix Y = Matrix::Zero(r, d * n);
  Y.topRows(d) = R;
  const Matrix rounded = round_solution(Y, d);
  REQUIRE(blocks_are_rotations(rounded, d));
  CHECK(gauge_distance(rounded, R) < 1e-9);
}

TEST_CASE("align_gauge") {
  std::mt19937_64 rng(7);
  const int d = 3, n = 9;
  PoseEstimate ref;
  std::normal_distribution<Scalar> gauss;
  for (int i = 0; i < n; ++i) {
    ref.rotations.push_back(random_rotation(d, rng));
    Vector t(d);
    for (int k = 0; k < d; ++k) t(k) = 2.0 * gauss(rng);
    ref.translations.push_back(t);
  }

  SUBCASE("inverts a global transform exactly") {
    const Matrix Rg = random_rotation(d, rng);
    Vector tg(d);
    for (int k = 0; k < d; ++k) tg(k) = gauss(rng);
    PoseEstimate moved;
    for (int i = 0; i < n; ++i) {
      moved.rotations.push_back(Rg * ref.rotations[i]);
      moved.translations.push_back(Rg * ref.translations[i] + tg);
    }
    const PoseEstimate aligned = align_gauge(moved, ref);
    for (int i = 0; i < n; ++i) {
      CHECK((aligned.rotations[i] - ref.rotations[i]).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((aligned.translations[i] - ref.translations[i]).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("identity on an already aligned estimate") {
    const PoseEstimate aligned = align_gauge(ref, ref);
    for (int i = 0; i < n; ++i)
      CHECK((aligned.translations[i] - ref.translations[i]).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("alignment never increases the translation objective") {
    PoseEstimate est;
    for (int i = 0; i < n; ++i) {
      est.rotations.push_back(random_rotation(d, rng));
      Vector t(d);
      for (int k = 0; k < d; ++k) t(k) = 2.0 * gauss(rng);
      est.translations.push_back(t);
    }
    auto sq_err = [&](const PoseEstimate& a) {
      Scalar total = 0;
      for (int i = 0; i < n; ++i)
        total += (a.translations[i] - ref.translations[i]).squaredNorm();
      return total;
    };
    const PoseEstimate aligned = align_gauge(est, ref);
    CHECK(sq_err(aligned) <= sq_err(est) + 1e-12);
  }
}
