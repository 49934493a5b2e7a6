#include "mbody/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "mbody/error.hpp"

namespace mbody {

namespace {

double bbox_diagonal(std::span<const Vec2> pts) {
  Vec2 lo = pts.front();
  Vec2 hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double shoelace(std::span<const Vec2> v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) twice += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * twice;
}

}  // namespace

double distance_to_segment(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

double distance_to_segment(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

ConvexPolygon validate_polygon(std::span<const Vec2> input) {
  if (input.size() < 3) {
    throw Error(ErrorCode::TooFewVertices, "polygon needs at least 3 vertices, got " + std::to_string(input.size()));
  }
  for (const auto& p : input) {
    if (!p.allFinite()) throw Error(ErrorCode::DegenerateArea, "non-finite vertex coordinate");
  }
  const double scale = bbox_diagonal(input);
  const double dup_tol = 1e-12 * std::max(scale, 1e-300);

  std::vector<Vec2> v;
  v.reserve(input.size());
  for (const auto& p : input) {
    if (v.empty() || (p - v.back()).norm() > dup_tol) v.push_back(p);
  }
  while (v.size() > 1 && (v.front() - v.back()).norm() <= dup_tol) v.pop_back();
  if (v.size() < 3) {
    throw Error(ErrorCode::TooFewVertices, "fewer than 3 distinct vertices");
  }

  const double area = shoelace(v);
  if (!(std::abs(area) > 1e-12 * scale * scale)) {
    throw Error(ErrorCode::DegenerateArea, "polygon area is zero");
  }
  if (area < 0.0) std::reverse(v.begin(), v.end());

  const std::size_t n = v.size();
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = v[i] - v[(i + n - 1) % n];
    const Vec2 e1 = v[(i + 1) % n] - v[i];
    const double c = cross(e0, e1);
    if (!(c > 1e-12 * e0.norm() * e1.norm())) {
      throw Error(ErrorCode::NonConvex, "vertex " + std::to_string(i) + " is reflex or collinear");
    }
    turning += std::atan2(c, e0.dot(e1));
  }
  if (turning > 2.0 * std::numbers::pi + 1e-6) {
    throw Error(ErrorCode::NonConvex, "boundary winds more than once");
  }
  return ConvexPolygon(std::move(v));
}

double ConvexPolygon::area() const { return shoelace(vertices_); }

double ConvexPolygon::perimeter() const {
  double p = 0.0;
  for (std::size_t i = 0; i < size(); ++i) p += (vertex(i + 1) - vertex(i)).norm();
  return p;
}

Vec2 ConvexPolygon::centroid() const {
  Vec2 c = Vec2::Zero();
  double twice = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double w = cross(vertex(i), vertex(i + 1));
    c += w * (vertex(i) + vertex(i + 1));
    twice += w;
  }
  return c / (3.0 * twice);
}

double ConvexPolygon::circumradius() const {
  const Vec2 c = centroid();
  double r = 0.0;
  for (const auto& p : vertices_) r = std::max(r, (p - c).norm());
  return r;
}

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, (vertices_[i] - vertices_[j]).norm());
  return d;
}

std::pair<Vec2, Vec2> ConvexPolygon::bounding_box() const {
  Vec2 lo = vertices_.front();
  Vec2 hi = vertices_.front();
  for (const auto& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

HalfPlane ConvexPolygon::edge_half_plane(std::size_t i) const {
  const Vec2& a = vertex(i);
  const Vec2 d = (vertex(i + 1) - a).normalized();
  const Vec2 inward(-d.y(), d.x());
  return {inward, inward.dot(a)};
}

std::vector<HalfPlane> ConvexPolygon::half_planes() const {
  std::vector<HalfPlane> hp;
  hp.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) hp.push_back(edge_half_plane(i));
  return hp;
}

double ConvexPolygon::signed_depth(const Vec2& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) d = std::min(d, edge_half_plane(i).signed_distance(x));
  return d;
}

double ConvexPolygon::boundary_distance(const Vec2& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) d = std::min(d, distance_to_segment(x, vertex(i), vertex(i + 1)));
  return d;
}

std::vector<Segment2> faces(const ConvexPolygon& poly) {
  std::vector<Segment2> out;
  out.reserve(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) out.push_back({poly.vertex(i), poly.vertex(i + 1)});
  return out;
}

double inscribed_radius(const ConvexPolygon& poly, const Vec2& x) {
  const double depth = poly.signed_depth(x);
  if (depth < -1e-12 * poly.diameter()) {
    throw Error(ErrorCode::OutsidePolygon, "point lies outside the polygon");
  }
  return std::max(depth, 0.0);
}

// ---------------------------------------------------------------------------

SymmetricBody3D SymmetricBody3D::sphere_shell(double r) { return {Kind::SphereShell, r, 0.0, 0.0}; }
SymmetricBody3D SymmetricBody3D::solid_ball(double r) { return {Kind::SolidBall, r, 0.0, 0.0}; }
SymmetricBody3D SymmetricBody3D::solid_cylinder(double r, double length) {
  return {Kind::SolidCylinder, r, length, 0.0};
}
SymmetricBody3D SymmetricBody3D::cone_surface(double r, double height) { return {Kind::ConeSurface, r, 0.0, height}; }

double SymmetricBody3D::surface_area() const {
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case Kind::SphereShell:
    case Kind::SolidBall: return 4.0 * pi * radius * radius;
    case Kind::SolidCylinder: return 2.0 * pi * radius * length + 2.0 * pi * radius * radius;
    case Kind::ConeSurface: return pi * radius * std::hypot(radius, height);
  }
  return 0.0;
}

double SymmetricBody3D::volume() const {
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case Kind::SphereShell:
    case Kind::SolidBall: return 4.0 / 3.0 * pi * radius * radius * radius;
    case Kind::SolidCylinder: return pi * radius * radius * length;
    case Kind::ConeSurface: return pi * radius * radius * height / 3.0;
  }
  return 0.0;
}

double SymmetricBody3D::signed_depth(const Vec3& x) const {
  const double rho = std::hypot(x.x(), x.y());
  switch (kind) {
    case Kind::SphereShell:
    case Kind::SolidBall: return radius - x.norm();
    case Kind::SolidCylinder: return std::min(radius - rho, 0.5 * length - std::abs(x.z()));
    case Kind::ConeSurface: {
      const double slant = std::hypot(radius, height);
      return std::min((radius * x.z() - height * rho) / slant, height - x.z());
    }
  }
  return 0.0;
}

double SymmetricBody3D::bounding_radius() const {
  switch (kind) {
    case Kind::SphereShell:
    case Kind::SolidBall: return radius;
    case Kind::SolidCylinder: return std::hypot(radius, 0.5 * length);
    case Kind::ConeSurface: return std::hypot(radius, height);
  }
  return 0.0;
}

std::string_view to_string(SymmetricBody3D::Kind kind) {
  switch (kind) {
    case SymmetricBody3D::Kind::SphereShell: return "sphere-shell";
    case SymmetricBody3D::Kind::SolidBall: return "solid-ball";
    case SymmetricBody3D::Kind::SolidCylinder: return "solid-cylinder";
    case SymmetricBody3D::Kind::ConeSurface: return "cone-surface";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

double SkeletonGraph::total_length() const {
  double s = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) s += segment(e).length();
  return s;
}

std::size_t SkeletonGraph::degree(std::size_t node) const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [node](const auto& e) {
    return e[0] == node || e[1] == node;
  }));
}

double SkeletonGraph::distance(const Vec2& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    d = std::min(d, distance_to_segment(x, nodes[edges[e][0]], nodes[edges[e][1]]));
  }
  return d;
}

namespace {

class SkeletonBuilder {
 public:
  SkeletonBuilder(const ConvexPolygon& poly) : scale_(poly.diameter()) {
    graph_.nodes = poly.vertices();
  }

  std::size_t add_node(const Vec2& p) {
    const double tol = 1e-9 * scale_;
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i) {
      if ((graph_.nodes[i] - p).norm() <= tol) return i;
    }
    graph_.nodes.push_back(p);
    return graph_.nodes.size() - 1;
  }

  void connect(std::size_t a, std::size_t b) {
    if (a == b) return;
    const std::array<std::size_t, 2> key{std::min(a, b), std::max(a, b)};
    for (const auto& e : graph_.edges) {
      if (e == key) return;
    }
    graph_.edges.push_back(key);
  }

  SkeletonGraph take() { return std::move(graph_); }

 private:
  double scale_;
  SkeletonGraph graph_;
};

struct Collapse {
  Vec2 point;
  double time;
};

// Point at equal offset t from three edge lines: the meeting point of the two
// bisector rays that bound the middle edge.
Collapse edge_collapse(const HalfPlane& prev, const HalfPlane& mid, const HalfPlane& next) {
  Eigen::Matrix2d m;
  m.row(0) = (mid.normal - prev.normal).transpose();
  m.row(1) = (next.normal - mid.normal).transpose();
  const Vec2 rhs(mid.offset - prev.offset, next.offset - mid.offset);
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-14)) {
    throw Error(ErrorCode::NumericCollapse, "parallel wavefront edges meet at a singular event");
  }
  const Vec2 p = m.inverse() * rhs;
  return {p, mid.signed_distance(p)};
}

}  // namespace

SkeletonGraph medial_axis(const ConvexPolygon& poly) {
  const std::vector<HalfPlane> lines = poly.half_planes();
  const double scale = poly.diameter();
  const double time_tol = 1e-12 * scale;
  const double point_tol = 1e-9 * scale;
  SkeletonBuilder builder(poly);

  // Wavefront vertex k lies between active[k] and active[k+1].
  std::vector<std::size_t> active(lines.size());
  std::vector<std::size_t> vnode(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    active[i] = i;
    vnode[i] = (i + 1) % lines.size();
  }

  double now = 0.0;
  while (active.size() >= 3) {
    const std::size_t m = active.size();
    std::vector<Collapse> ev(m);
    double t_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      ev[k] = edge_collapse(lines[active[(k + m - 1) % m]], lines[active[k]], lines[active[(k + 1) % m]]);
      if (!std::isfinite(ev[k].time)) throw Error(ErrorCode::NumericCollapse, "non-finite event time");
      t_min = std::min(t_min, ev[k].time);
    }
    if (t_min < now - time_tol) {
      throw Error(ErrorCode::NumericCollapse, "event time runs backwards");
    }
    now = t_min;

    std::vector<bool> collapsing(m);
    for (std::size_t k = 0; k < m; ++k) collapsing[k] = (m == 3) || ev[k].time <= t_min + time_tol;

    if (std::all_of(collapsing.begin(), collapsing.end(), [](bool c) { return c; })) {
      Vec2 p = Vec2::Zero();
      for (const auto& e : ev) p += e.point;
      p /= static_cast<double>(m);
      for (const auto& e : ev) {
        if ((e.point - p).norm() > point_tol) {
          throw Error(ErrorCode::NumericCollapse, "final collapse points disagree");
        }
      }
      const std::size_t node = builder.add_node(p);
      for (std::size_t k = 0; k < m; ++k) builder.connect(vnode[k], node);
      return builder.take();
    }

    // Each maximal run of consecutive collapsing edges shrinks to one point.
    std::size_t start = 0;
    while (collapsing[start]) ++start;  // a non-collapsing edge exists
    std::vector<std::size_t> run_node(m, 0);
    for (std::size_t step = 1; step <= m; ++step) {
      const std::size_t k = (start + step) % m;
      if (!collapsing[k] || collapsing[(k + m - 1) % m]) continue;
      std::size_t len = 0;
      Vec2 p = Vec2::Zero();
      while (collapsing[(k + len) % m]) {
        p += ev[(k + len) % m].point;
        ++len;
      }
      p /= static_cast<double>(len);
      for (std::size_t j = 0; j < len; ++j) {
        if ((ev[(k + j) % m].point - p).norm() > point_tol) {
          throw Error(ErrorCode::NumericCollapse, "simultaneous collapse points disagree");
        }
      }
      const std::size_t node = builder.add_node(p);
      for (std::size_t j = 0; j <= len; ++j) builder.connect(vnode[(k + m - 1 + j) % m], node);
      for (std::size_t j = 0; j < len; ++j) run_node[(k + j) % m] = node;
    }

    std::vector<std::size_t> next_active;
    std::vector<std::size_t> next_vnode;
    for (std::size_t k = 0; k < m; ++k) {
      if (collapsing[k]) continue;
      const std::size_t right = (k + 1) % m;
      next_active.push_back(active[k]);
      next_vnode.push_back(collapsing[right] ? run_node[right] : vnode[k]);
    }
    active = std::move(next_active);
    vnode = std::move(next_vnode);
  }

  // Two antiparallel edges left: the wavefront has degenerated to a segment.
  if (active.size() == 2) builder.connect(vnode[0], vnode[1]);
  return builder.take();
}

double hausdorff_distance(const SkeletonGraph& a, const SkeletonGraph& b, std::size_t samples_per_edge) {
  auto one_sided = [samples_per_edge](const SkeletonGraph& from, const SkeletonGraph& to) {
    double worst = 0.0;
    for (std::size_t e = 0; e < from.edges.size(); ++e) {
      const Segment2 s = from.segment(e);
      for (std::size_t i = 0; i <= samples_per_edge; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(samples_per_edge);
        worst = std::max(worst, to.distance(s.a + t * (s.b - s.a)));
      }
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace mbody
