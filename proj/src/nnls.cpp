#include "mbody/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "mbody/error.hpp"

namespace mbody {

namespace {

// The Gram matrix of a collocation system is badly conditioned (exterior
// potentials are smooth), so forming it in double loses the small-eigenvalue
// directions. It is accumulated in quad precision and the double Cholesky
// factor serves as a preconditioner for iterative refinement.
using Quad = __float128;

struct QuadVector {
  std::vector<Quad> v;
  explicit QuadVector(Eigen::Index n = 0) : v(static_cast<std::size_t>(n), Quad(0)) {}
  Eigen::Index size() const { return static_cast<Eigen::Index>(v.size()); }
  Quad& operator()(Eigen::Index i) { return v[static_cast<std::size_t>(i)]; }
  Quad operator()(Eigen::Index i) const { return v[static_cast<std::size_t>(i)]; }
  Eigen::VectorXd to_double() const {
    Eigen::VectorXd out(size());
    for (Eigen::Index i = 0; i < size(); ++i) out(i) = static_cast<double>(v[static_cast<std::size_t>(i)]);
    return out;
  }
  Quad dot(const QuadVector& o) const {
    Quad s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * o.v[i];
    return s;
  }
};

struct QuadMatrix {
  Eigen::Index n = 0;
  std::vector<Quad> a;
  explicit QuadMatrix(Eigen::Index size = 0) : n(size), a(static_cast<std::size_t>(size * size), Quad(0)) {}
  Quad& operator()(Eigen::Index i, Eigen::Index j) { return a[static_cast<std::size_t>(i * n + j)]; }
  Quad operator()(Eigen::Index i, Eigen::Index j) const { return a[static_cast<std::size_t>(i * n + j)]; }
  QuadVector times(const QuadVector& x) const {
    QuadVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Quad s = 0;
      for (Eigen::Index j = 0; j < n; ++j) s += (*this)(i, j) * x(j);
      out(i) = s;
    }
    return out;
  }
  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) out(i, j) = static_cast<double>((*this)(i, j));
    return out;
  }
};

QuadVector refined_solve(const Eigen::LLT<Eigen::MatrixXd>& llt, const QuadMatrix& G, const QuadVector& rhs) {
  QuadVector x(rhs.size());
  const Eigen::VectorXd x0 = llt.solve(rhs.to_double());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = x0(i);
  for (int pass = 0; pass < 8; ++pass) {
    const QuadVector gx = G.times(x);
    QuadVector r(rhs.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = rhs(i) - gx(i);
    const Eigen::VectorXd dx = llt.solve(r.to_double());
    double xmax = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x(i) += dx(i);
      xmax = std::max(xmax, std::abs(static_cast<double>(x(i))));
    }
    if (dx.lpNorm<Eigen::Infinity>() <= 1e-20 * xmax) break;
  }
  return x;
}

struct SubSolution {
  Eigen::VectorXd x;
  double multiplier = 0.0;
};

// Minimizer of the quadratic over the free set with the rest pinned at zero.
SubSolution solve_free(const QuadMatrix& G, const QuadVector& g, const std::vector<int>& free,
                       const std::optional<LinearEquality>& eq) {
  const auto n = static_cast<Eigen::Index>(free.size());
  SubSolution out{Eigen::VectorXd::Zero(G.n), 0.0};
  if (n == 0) {
    if (eq && eq->target != 0.0) throw Error(ErrorCode::RankDeficient, "equality cannot hold with no free variables");
    return out;
  }
  QuadMatrix Gp(n);
  QuadVector gp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gp(i) = g(free[i]);
    for (Eigen::Index j = 0; j < n; ++j) Gp(i, j) = G(free[i], free[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Gp.to_double());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::RankDeficient, "free subsystem is not positive definite");
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-10 * diag.maxCoeff()) {
    throw Error(ErrorCode::RankDeficient, "free subsystem is numerically singular");
  }
  QuadVector xp = refined_solve(llt, Gp, gp);
  if (eq) {
    QuadVector wp(n);
    for (Eigen::Index i = 0; i < n; ++i) wp(i) = eq->weights(free[i]);
    const QuadVector v = refined_solve(llt, Gp, wp);
    const Quad denom = wp.dot(v);
    if (!(denom > 0)) throw Error(ErrorCode::RankDeficient, "equality weights vanish on the free set");
    const Quad nu = (wp.dot(xp) - eq->target) / denom;
    out.multiplier = static_cast<double>(nu);
    for (Eigen::Index i = 0; i < n; ++i) xp(i) -= nu * v(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) out.x(free[i]) = static_cast<double>(xp(i));
  return out;
}

}  // namespace

NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const NnlsOptions& opt) {
  const Eigen::Index cols = A.cols();
  if (A.rows() != y.size()) throw Error(ErrorCode::RankDeficient, "matrix and right-hand side sizes differ");
  QuadMatrix G(cols);
  QuadVector g(cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    for (Eigen::Index j = i; j < cols; ++j) {
      Quad s = 0;
      for (Eigen::Index r = 0; r < A.rows(); ++r) s += Quad(A(r, i)) * Quad(A(r, j));
      G(i, j) = s;
      G(j, i) = s;
    }
    G(i, i) += opt.lambda_reg;
    Quad s = 0;
    for (Eigen::Index r = 0; r < A.rows(); ++r) s += Quad(A(r, i)) * Quad(y(r));
    g(i) = s;
  }
  const double grad_tol = opt.kkt_tol * std::max(1.0, g.to_double().lpNorm<Eigen::Infinity>());
  const int cap = opt.max_iterations > 0 ? opt.max_iterations : 100 * static_cast<int>(std::max<Eigen::Index>(cols, 1));

  std::vector<bool> is_free(cols, false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  if (opt.equality) {
    const auto& w = opt.equality->weights;
    if (w.size() != cols || w.minCoeff() <= 0.0) {
      throw Error(ErrorCode::RankDeficient, "equality weights must be positive, one per column");
    }
    x = (opt.equality->target / w.squaredNorm()) * w;
    std::fill(is_free.begin(), is_free.end(), true);
  }

  auto free_list = [&] {
    std::vector<int> f;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (is_free[j]) f.push_back(static_cast<int>(j));
    return f;
  };

  NnlsResult result;
  int just_added = -1;
  std::vector<bool> blocked(cols, false);
  for (int iter = 1;; ++iter) {
    if (iter > cap) throw Error(ErrorCode::NoConvergence, "active set did not settle in " + std::to_string(cap) + " steps");
    result.iterations = iter;
    const SubSolution sub = solve_free(G, g, free_list(), opt.equality);

    bool feasible = true;
    for (Eigen::Index j = 0; j < cols; ++j) feasible = feasible && (!is_free[j] || sub.x(j) > 0.0);

    if (feasible) {
      x = sub.x;
      result.multiplier = sub.multiplier;
      QuadVector xq(cols);
      for (Eigen::Index j = 0; j < cols; ++j) xq(j) = x(j);
      QuadVector gl = G.times(xq);
      for (Eigen::Index j = 0; j < cols; ++j) {
        gl(j) -= g(j);
        if (opt.equality) gl(j) += Quad(sub.multiplier) * Quad(opt.equality->weights(j));
      }
      const Eigen::VectorXd grad = gl.to_double();
      int entering = -1;
      double most_negative = -grad_tol;
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!is_free[j] && !blocked[j] && grad(j) < most_negative) {
          most_negative = grad(j);
          entering = static_cast<int>(j);
        }
      }
      if (entering < 0) break;
      is_free[entering] = true;
      just_added = entering;
      continue;
    }

    // A variable that enters and immediately goes non-positive is numerically
    // stuck at the bound; pin it until the iterate moves.
    if (just_added >= 0 && sub.x(just_added) <= 0.0) {
      is_free[just_added] = false;
      blocked[just_added] = true;
      just_added = -1;
      continue;
    }
    just_added = -1;

    double alpha = 1.0;
    Eigen::Index leaving = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (is_free[j] && sub.x(j) <= 0.0) {
        const double a = x(j) / (x(j) - sub.x(j));
        if (leaving < 0 || a < alpha) {
          alpha = a;
          leaving = j;
        }
      }
    }
    x += alpha * (sub.x - x);
    x(leaving) = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (is_free[j] && (x(j) <= 0.0 || (sub.x(j) <= 0.0 && x(j) <= 1e-14 * x.lpNorm<Eigen::Infinity>()))) {
        is_free[j] = false;
        x(j) = 0.0;
      }
    }
    std::fill(blocked.begin(), blocked.end(), false);
  }
  for (Eigen::Index j = 0; j < cols; ++j) x(j) = std::max(x(j), 0.0);
  result.x = x;
  return result;
}

}  // namespace mbody
