#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include <Eigen/Dense>

#include "mbody/error.hpp"
#include "mbody/nnls.hpp"

using namespace mbody;

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double objective(const MatrixXd& A, const VectorXd& y, const VectorXd& x, double lambda) {
  return (A * x - y).squaredNorm() + lambda * x.squaredNorm();
}

// Enumerate every free set, solve it by QR, keep the best feasible point.
VectorXd brute_force(const MatrixXd& A, const VectorXd& y) {
  const int n = static_cast<int>(A.cols());
  VectorXd best = VectorXd::Zero(n);
  double best_val = objective(A, y, best, 0.0);
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> free;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) free.push_back(j);
    MatrixXd sub(A.rows(), free.size());
    for (std::size_t j = 0; j < free.size(); ++j) sub.col(j) = A.col(free[j]);
    const VectorXd z = sub.colPivHouseholderQr().solve(y);
    if (z.minCoeff() < 0.0) continue;
    VectorXd x = VectorXd::Zero(n);
    for (std::size_t j = 0; j < free.size(); ++j) x[free[j]] = z[j];
    const double v = objective(A, y, x, 0.0);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }
  return best;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mbody::Error");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("matches exhaustive enumeration") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 12, n = 2 + trial % 6;
    MatrixXd A(m, n);
    VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      y[i] = g(rng);
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    }
    const auto r = solve_nnls(A, y);
    const VectorXd ref = brute_force(A, y);
    CAPTURE(trial);
    CHECK(r.x.minCoeff() >= 0.0);
    CHECK((r.x - ref).norm() < 1e-9 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("KKT conditions hold") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 30, n = 10;
    MatrixXd A(m, n);
    VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      y[i] = g(rng);
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    }
    const double lambda = trial % 2 ? 1e-3 : 0.0;
    NnlsOptions opt;
    opt.lambda_reg = lambda;
    const auto r = solve_nnls(A, y, opt);
    // gradient of 1/2 objective: A^T (A x - y) + lambda x
    const VectorXd grad = A.transpose() * (A * r.x - y) + lambda * r.x;
    const double scale = (A.transpose() * y).lpNorm<Eigen::Infinity>();
    for (int j = 0; j < n; ++j) {
      CHECK(r.x[j] >= 0.0);
      if (r.x[j] > 0.0) {
        CHECK(std::abs(grad[j]) <= 1e-9 * scale);
      } else {
        CHECK(grad[j] >= -1e-9 * scale);
      }
    }
  }
}

TEST_CASE("equality constraint") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 25, n = 8;
    MatrixXd A(m, n);
    VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      y[i] = g(rng);
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    }
    VectorXd w(n);
    for (int j = 0; j < n; ++j) w[j] = u(rng);
    NnlsOptions opt;
    opt.equality = LinearEquality{w, 3.0};
    const auto r = solve_nnls(A, y, opt);
    CHECK(r.x.minCoeff() >= 0.0);
    CHECK(std::abs(w.dot(r.x) - 3.0) < 1e-10);
    // KKT with multiplier: grad + mu w = 0 on free, >= 0 on active
    const VectorXd grad = A.transpose() * (A * r.x - y);
    const VectorXd shifted = grad + r.multiplier * w;
    const double scale = (A.transpose() * y).lpNorm<Eigen::Infinity>() + std::abs(r.multiplier);
    for (int j = 0; j < n; ++j) {
      if (r.x[j] > 0.0) {
        CHECK(std::abs(shifted[j]) <= 1e-8 * scale);
      } else {
        CHECK(shifted[j] >= -1e-8 * scale);
      }
    }
  }
}

TEST_CASE("exact nonnegative solutions are recovered") {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> g;
  MatrixXd A(20, 6);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 6; ++j) A(i, j) = g(rng);
  VectorXd x(6);
  x << 1.0, 0.0, 2.5, 0.0, 0.3, 4.0;
  const auto r = solve_nnls(A, A * x);
  CHECK((r.x - x).norm() < 1e-10);
  // homogeneity with the same active set
  const auto r2 = solve_nnls(A, 2.0 * (A * x));
  CHECK((r2.x - 2.0 * r.x).norm() < 1e-10);
  // A^T y <= 0 makes x = 0 optimal
  const MatrixXd pos = A.cwiseAbs();
  const VectorXd neg = -pos * x;
  REQUIRE((pos.transpose() * neg).maxCoeff() < 0.0);
  CHECK(solve_nnls(pos, neg).x.norm() == 0.0);
}

TEST_CASE("failure modes") {
  MatrixXd A(4, 2);
  A << 1, 1, 1, 1, 1, 1, 1, 1;
  VectorXd y(4);
  y << 1, 2, 3, 4;
  // the second copy never gains a descent direction, so only one enters
  const auto dup = solve_nnls(A, y);
  CHECK(dup.x.minCoeff() == 0.0);
  CHECK(dup.x.sum() == doctest::Approx(2.5));
  // an equality on the copies forces both into a singular free set
  NnlsOptions eq;
  eq.equality = LinearEquality{Eigen::Vector2d(1.0, 2.0), 1.0};
  CHECK(code_of([&] { solve_nnls(A, y, eq); }) == ErrorCode::RankDeficient);
  // regularization restores a unique answer
  NnlsOptions reg;
  reg.lambda_reg = 1e-6;
  const auto r = solve_nnls(A, y, reg);
  CHECK(std::abs(r.x[0] - r.x[1]) < 1e-9);

  std::mt19937_64 rng(25);
  std::normal_distribution<double> g;
  MatrixXd B(30, 12);
  VectorXd z(30);
  for (int i = 0; i < 30; ++i) {
    z[i] = g(rng);
    for (int j = 0; j < 12; ++j) B(i, j) = g(rng);
  }
  NnlsOptions capped;
  capped.max_iterations = 1;
  const auto full = solve_nnls(B, z);
  REQUIRE(full.iterations > 1);
  CHECK(code_of([&] { solve_nnls(B, z, capped); }) == ErrorCode::NoConvergence);
  CHECK(full.iterations <= 100 * 12);
}

TEST_CASE("deterministic") {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> g;
  MatrixXd A(15, 7);
  VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    y[i] = g(rng);
    for (int j = 0; j < 7; ++j) A(i, j) = g(rng);
  }
  const auto a = solve_nnls(A, y);
  const auto b = solve_nnls(A, y);
  CHECK(a.x == b.x);
}
