#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "mbody/error.hpp"

namespace mbody::quad {

inline constexpr std::size_t kOrder = 16;

struct Rule {
  std::array<double, kOrder> nodes;    // on [-1, 1]
  std::array<double, kOrder> weights;
};

/// 16-point Gauss-Legendre rule, computed once by Newton iteration on P_16.
const Rule& gauss_legendre16();

/// Neumaier-compensated accumulator. Summation order is the caller's.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Result {
  double value = 0.0;
  double error = 0.0;  // sum over accepted panels of |fine - coarse|
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_depth = 48;
};

template <class F>
double gauss16(F& f, double a, double b) {
  const Rule& rule = gauss_legendre16();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  CompensatedSum s;
  for (std::size_t i = 0; i < kOrder; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s.value();
}

namespace detail {

template <class F>
void refine(F& f, double a, double b, double coarse, double tol, int depth, const Options& opt,
            CompensatedSum& value, CompensatedSum& error) {
  const double m = 0.5 * (a + b);
  const double left = gauss16(f, a, m);
  const double right = gauss16(f, m, b);
  const double fine = left + right;
  const double diff = std::abs(fine - coarse);
  if (diff <= tol || (m <= a || m >= b)) {
    value += fine;
    error += diff;
    return;
  }
  if (depth >= opt.max_depth || !std::isfinite(fine)) {
    throw Error(ErrorCode::NonConvergent, "adaptive Gauss-Legendre stalled on [" + std::to_string(a) +
                                              ", " + std::to_string(b) + "]");
  }
  const double child_tol = tol * 0.7071067811865476;
  refine(f, a, m, left, child_tol, depth + 1, opt, value, error);
  refine(f, m, b, right, child_tol, depth + 1, opt, value, error);
}

}  // namespace detail

/// Adaptive bisection with 16-point Gauss-Legendre panels. A panel is accepted
/// once its two halves agree with it to within the local tolerance.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  if (a == b) return {};
  auto abs_f = [&f](double x) { return std::abs(f(x)); };
  const double scale = gauss16(abs_f, a, b);
  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(scale));
  const double coarse = gauss16(f, a, b);
  CompensatedSum value;
  CompensatedSum error;
  detail::refine(f, a, b, coarse, tol, 0, opt, value, error);
  return {value.value(), error.value()};
}

/// Integrate over consecutive breakpoints; each piece is refined independently.
template <class F, class Range>
Result integrate_pieces(F&& f, const Range& breaks, const Options& opt = {}) {
  CompensatedSum value;
  CompensatedSum error;
  auto it = std::begin(breaks);
  auto end = std::end(breaks);
  if (it == end) return {};
  double prev = *it++;
  for (; it != end; ++it) {
    const Result r = integrate(f, prev, *it, opt);
    value += r.value;
    error += r.error;
    prev = *it;
  }
  return {value.value(), error.value()};
}

}  // namespace mbody::quad
