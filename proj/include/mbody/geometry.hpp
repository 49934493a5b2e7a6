#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mbody/types.hpp"

namespace mbody {

struct Segment2 {
  Vec2 a;
  Vec2 b;
  double length() const { return (b - a).norm(); }
  Vec2 midpoint() const { return 0.5 * (a + b); }
};

double distance_to_segment(const Vec2& x, const Vec2& a, const Vec2& b);
double distance_to_segment(const Vec3& x, const Vec3& a, const Vec3& b);

/// Closed half-plane {x : normal . x >= offset} with unit inward normal.
struct HalfPlane {
  Vec2 normal;
  double offset;
  double signed_distance(const Vec2& x) const { return normal.dot(x) - offset; }
};

/// Strictly convex polygon with counterclockwise vertices. Construct through
/// validate_polygon(); the constructor assumes a validated vertex list.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

  double area() const;
  double perimeter() const;
  Vec2 centroid() const;
  /// Largest distance from the centroid to a vertex.
  double circumradius() const;
  double diameter() const;
  std::pair<Vec2, Vec2> bounding_box() const;

  /// One half-plane per edge; edge i runs from vertex i to vertex i+1.
  std::vector<HalfPlane> half_planes() const;
  HalfPlane edge_half_plane(std::size_t i) const;

  /// Minimum over edges of the signed distance; > 0 inside, < 0 outside.
  double signed_depth(const Vec2& x) const;
  bool contains(const Vec2& x, double tol = 0.0) const { return signed_depth(x) >= -tol; }
  /// Distance from x to the boundary, regardless of side.
  double boundary_distance(const Vec2& x) const;

 private:
  friend ConvexPolygon validate_polygon(std::span<const Vec2> vertices);
  explicit ConvexPolygon(std::vector<Vec2> v) : vertices_(std::move(v)) {}

  std::vector<Vec2> vertices_;
};

/// Normalizes orientation to CCW and removes repeated vertices. Throws
/// TooFewVertices, DegenerateArea or NonConvex.
ConvexPolygon validate_polygon(std::span<const Vec2> vertices);

/// Open edges of the polygon, one per vertex, in CCW order.
std::vector<Segment2> faces(const ConvexPolygon& poly);

/// Distance from an interior point to the boundary. Throws OutsidePolygon.
double inscribed_radius(const ConvexPolygon& poly, const Vec2& x);

struct Disk {
  Vec2 center{0.0, 0.0};
  double radius = 1.0;
};

/// Axisymmetric 3D bodies, axis along z.
///   SphereShell, SolidBall: centered at the origin.
///   SolidCylinder: z in [-length/2, length/2].
///   ConeSurface: apex at the origin, base circle of radius R at z = height.
struct SymmetricBody3D {
  enum class Kind { SphereShell, SolidBall, SolidCylinder, ConeSurface };
  Kind kind = Kind::SphereShell;
  double radius = 1.0;
  double length = 0.0;  // cylinder
  double height = 0.0;  // cone

  static SymmetricBody3D sphere_shell(double r);
  static SymmetricBody3D solid_ball(double r);
  static SymmetricBody3D solid_cylinder(double r, double length);
  static SymmetricBody3D cone_surface(double r, double height);

  /// Boundary (surface) measure. For the cone only the lateral surface counts.
  double surface_area() const;
  double volume() const;
  /// Signed depth of a point: > 0 strictly inside the closed solid, 0 on it.
  double signed_depth(const Vec3& x) const;
  double bounding_radius() const;
};

std::string_view to_string(SymmetricBody3D::Kind kind);

struct SkeletonGraph {
  std::vector<Vec2> nodes;
  std::vector<std::array<std::size_t, 2>> edges;

  double total_length() const;
  Segment2 segment(std::size_t e) const { return {nodes[edges[e][0]], nodes[edges[e][1]]}; }
  std::size_t degree(std::size_t node) const;
  /// Distance from x to the union of all edges.
  double distance(const Vec2& x) const;
};

/// Medial axis of a convex polygon, computed as its straight skeleton by a
/// shrinking wavefront. Leaves are the polygon vertices. Throws NumericCollapse
/// when the event sequence cannot be resolved in floating point.
SkeletonGraph medial_axis(const ConvexPolygon& poly);

/// Symmetric Hausdorff distance between two skeletons, sampled along edges.
double hausdorff_distance(const SkeletonGraph& a, const SkeletonGraph& b, std::size_t samples_per_edge = 64);

}  // namespace mbody
