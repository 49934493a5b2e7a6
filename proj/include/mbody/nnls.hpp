#pragma once

#include <optional>

#include <Eigen/Core>

namespace mbody {

struct LinearEquality {
  Eigen::VectorXd weights;  // weights . x == target
  double target = 0.0;
};

struct NnlsOptions {
  double lambda_reg = 0.0;        // Tikhonov weight on |x|^2
  double kkt_tol = 1e-10;         // active-set gradient tolerance (relative to |A^T y|_inf)
  int max_iterations = 0;         // 0 -> 100 * columns
  std::optional<LinearEquality> equality;
};

struct NnlsResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double multiplier = 0.0;  // Lagrange multiplier of the equality, if any
};

/// min |A x - y|^2 + lambda_reg |x|^2 subject to x >= 0 (and the optional
/// equality), by a primal active-set method on the normal equations. Free
/// subsystems are factored with Cholesky. Throws RankDeficient, NoConvergence.
NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const NnlsOptions& opt = {});

}  // namespace mbody
