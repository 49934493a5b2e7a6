#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mbody/geometry.hpp"
#include "mbody/measure.hpp"

namespace testing {

using mbody::Vec2;
using mbody::Vec3;

inline constexpr double kPi = std::numbers::pi;

inline mbody::ConvexPolygon poly(std::vector<Vec2> v) { return mbody::validate_polygon(v); }

inline mbody::ConvexPolygon square(double h = 1.0) { return poly({{-h, -h}, {h, -h}, {h, h}, {-h, h}}); }
inline mbody::ConvexPolygon rectangle() { return poly({{-1, -0.5}, {1, -0.5}, {1, 0.5}, {-1, 0.5}}); }

inline mbody::ConvexPolygon regular(int n, double r = 1.0, double phase = 0.0) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2.0 * kPi * i / n;
    v.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return mbody::validate_polygon(v);
}

// Convex hull (monotone chain) of random points; used to draw random convex
// polygons with a fixed seed.
inline mbody::ConvexPolygon random_convex(std::mt19937_64& rng, int points = 12) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> p;
  for (int i = 0; i < points; ++i) p.emplace_back(u(rng), u(rng));
  std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) { return mbody::cross(a - o, b - o); };
  std::vector<Vec2> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p[i]) <= 1e-9) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], p[i - 1]) <= 1e-9) --k;
    hull[k++] = p[i - 1];
  }
  hull.resize(k - 1);
  return mbody::validate_polygon(hull);
}

// Exact potential of a uniform segment: local coordinates s along the
// segment and perpendicular distance d.
inline double segment_exact(int n, const Vec3& p0, const Vec3& p1, double lambda, const Vec3& x) {
  const Vec3 u = (p1 - p0).normalized();
  const double s0 = (p0 - x).dot(u);
  const double s1 = (p1 - x).dot(u);
  const double d = ((x - p0) - (x - p0).dot(u) * u).norm();
  if (n == 2) {
    auto F = [d](double s) {
      const double q = s * s + d * d;
      return 0.5 * (s * std::log(q) - 2.0 * s + (d > 0.0 ? 2.0 * d * std::atan(s / d) : 0.0));
    };
    return -lambda / (2.0 * kPi) * (F(s1) - F(s0));
  }
  if (d == 0.0) {
    const double a = std::min(std::abs(s0), std::abs(s1)), b = std::max(std::abs(s0), std::abs(s1));
    return lambda / (4.0 * kPi) * std::log(b / a);
  }
  return lambda / (4.0 * kPi) * (std::asinh(s1 / d) - std::asinh(s0 / d));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
