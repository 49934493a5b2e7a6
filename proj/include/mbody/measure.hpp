#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "mbody/geometry.hpp"
#include "mbody/types.hpp"

namespace mbody {

struct PointMass {
  Vec3 x = Vec3::Zero();
  double m = 0.0;
};

/// Line density on the segment p0-p1, piecewise linear between K+1 samples
/// taken at equispaced parameters (lambda.front() at p0, lambda.back() at p1).
struct SegmentDensity {
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
  std::vector<double> lambda;

  double length() const { return (p1 - p0).norm(); }
  std::size_t pieces() const { return lambda.empty() ? 0 : lambda.size() - 1; }
  /// Density at parameter t in [0, 1].
  double density(double t) const;
  double mass() const;
};

using Atom = std::variant<PointMass, SegmentDensity>;

/// Finite sum of point and segment atoms living in R^dim.
struct AtomicMeasure {
  int dim = 2;
  std::vector<Atom> atoms;

  bool empty() const { return atoms.empty(); }
  AtomicMeasure& add(PointMass p) {
    atoms.emplace_back(std::move(p));
    return *this;
  }
  AtomicMeasure& add(SegmentDensity s) {
    atoms.emplace_back(std::move(s));
    return *this;
  }
  /// Distance from x to the union of the atoms' supports.
  double support_distance(const Vec3& x) const;
};

AtomicMeasure operator+(const AtomicMeasure& lhs, const AtomicMeasure& rhs);

using Body = std::variant<ConvexPolygon, Disk, SymmetricBody3D>;

int dimension(const Body& body);

/// rho = a * H^{n-1} restricted to the boundary + b * L^n restricted to the body.
struct BodyMeasure {
  Body body;
  double a = 0.0;
  double b = 1.0;
};

/// Checks a, b >= 0 and a + b > 0; throws InvalidMeasure otherwise.
BodyMeasure make_body_measure(Body body, double a, double b);

struct Moments {
  double total = 0.0;
  Vec3 centroid = Vec3::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();  // sum m (x - c)(x - c)^T
};

double total_mass(const BodyMeasure& m);
double total_mass(const AtomicMeasure& m);

Moments moments(const BodyMeasure& m);
Moments moments(const AtomicMeasure& m);

struct Packing {
  AtomicMeasure measure;      // unit volume density: each atom carries pi r^2
  std::vector<double> radii;  // radius of the disk behind each atom
  double residual_area = 0.0;
};

/// Quadtree disk packing: depth 1 is the root cell (the bounding square),
/// depth d refines d-1 times. Cells inside the polygon and clear of earlier
/// disks receive their inscribed disk; partial cells are refined.
Packing ball_packing(const ConvexPolygon& poly, int depth);

/// Rescales every atom by target / total_mass(m). Throws ZeroMass.
AtomicMeasure scale_to_mass(const AtomicMeasure& m, double target);

}  // namespace mbody
