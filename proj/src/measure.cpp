#include "mbody/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mbody/detail/overloaded.hpp"
#include "mbody/error.hpp"
#include "mbody/quadrature.hpp"

namespace mbody {

namespace {

constexpr double kPi = std::numbers::pi;

using detail::overloaded;

// Raw (uncentered) moments accumulated before centering.
struct RawMoments {
  double mass = 0.0;
  Vec3 first = Vec3::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();

  void add_point(const Vec3& x, double m) {
    mass += m;
    first += m * x;
    second += m * x * x.transpose();
  }

  // Linear density from l0 at q0 to l1 at q1; two-point Gauss is exact for
  // the cubic integrand of the second moment.
  void add_linear_piece(const Vec3& q0, const Vec3& q1, double l0, double l1) {
    const double len = (q1 - q0).norm();
    constexpr double g = 0.21132486540518713;  // (1 - 1/sqrt(3)) / 2
    for (double t : {g, 1.0 - g}) {
      const Vec3 p = q0 + t * (q1 - q0);
      add_point(p, 0.5 * len * (l0 + t * (l1 - l0)));
    }
  }

  Moments centered() const {
    Moments out;
    out.total = mass;
    if (mass > 0.0) {
      out.centroid = first / mass;
      out.second = second - mass * out.centroid * out.centroid.transpose();
    }
    return out;
  }
};

RawMoments polygon_moments(const ConvexPolygon& poly, double a, double b) {
  RawMoments raw;
  const std::size_t n = poly.size();
  if (b > 0.0) {
    double area2 = 0.0;
    Vec2 first = Vec2::Zero();
    double ixx = 0.0, iyy = 0.0, ixy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = poly.vertex(i);
      const Vec2& q = poly.vertex(i + 1);
      const double c = cross(p, q);
      area2 += c;
      first += c * (p + q);
      ixx += c * (p.x() * p.x() + p.x() * q.x() + q.x() * q.x());
      iyy += c * (p.y() * p.y() + p.y() * q.y() + q.y() * q.y());
      ixy += c * (p.x() * q.y() + 2.0 * p.x() * p.y() + 2.0 * q.x() * q.y() + q.x() * p.y());
    }
    raw.mass += b * 0.5 * area2;
    raw.first.head<2>() += b * first / 6.0;
    raw.second(0, 0) += b * ixx / 12.0;
    raw.second(1, 1) += b * iyy / 12.0;
    raw.second(0, 1) += b * ixy / 24.0;
    raw.second(1, 0) += b * ixy / 24.0;
  }
  if (a > 0.0) {
    for (std::size_t i = 0; i < n; ++i) raw.add_linear_piece(lift(poly.vertex(i)), lift(poly.vertex(i + 1)), a, a);
  }
  return raw;
}

RawMoments disk_moments(const Disk& d, double a, double b) {
  RawMoments raw;
  const Vec3 c = lift(d.center);
  const double r = d.radius;
  Eigen::Matrix3d central = Eigen::Matrix3d::Zero();
  double mass = 0.0;
  if (b > 0.0) {
    mass += b * kPi * r * r;
    central(0, 0) += b * kPi * std::pow(r, 4) / 4.0;
    central(1, 1) += b * kPi * std::pow(r, 4) / 4.0;
  }
  if (a > 0.0) {
    mass += a * 2.0 * kPi * r;
    central(0, 0) += a * kPi * r * r * r;
    central(1, 1) += a * kPi * r * r * r;
  }
  raw.mass = mass;
  raw.first = mass * c;
  raw.second = central + mass * c * c.transpose();
  return raw;
}

// Closed-form moments of the axisymmetric bodies about the origin.
RawMoments body3d_moments(const SymmetricBody3D& body, double a, double b) {
  RawMoments raw;
  const double r = body.radius;
  auto add = [&raw](double w, double mass, double z_first, double xx, double zz) {
    if (w <= 0.0) return;
    raw.mass += w * mass;
    raw.first.z() += w * z_first;
    raw.second(0, 0) += w * xx;
    raw.second(1, 1) += w * xx;
    raw.second(2, 2) += w * zz;
  };
  switch (body.kind) {
    case SymmetricBody3D::Kind::SphereShell:
    case SymmetricBody3D::Kind::SolidBall: {
      const double area = 4.0 * kPi * r * r;
      add(a, area, 0.0, area * r * r / 3.0, area * r * r / 3.0);
      const double ball = 4.0 / 15.0 * kPi * std::pow(r, 5);
      add(b, body.volume(), 0.0, ball, ball);
      break;
    }
    case SymmetricBody3D::Kind::SolidCylinder: {
      const double len = body.length;
      const double lat = 2.0 * kPi * r * len;
      const double cap = kPi * r * r;
      add(a, lat + 2.0 * cap, 0.0, kPi * r * r * r * len + 2.0 * cap * r * r / 4.0,
          lat * len * len / 12.0 + 2.0 * cap * len * len / 4.0);
      const double vol = kPi * r * r * len;
      add(b, vol, 0.0, vol * r * r / 4.0, vol * len * len / 12.0);
      break;
    }
    case SymmetricBody3D::Kind::ConeSurface: {
      const double h = body.height;
      const double slant = std::hypot(r, h);
      const double lat = kPi * r * slant;
      add(a, lat, lat * 2.0 * h / 3.0, kPi * r * r * r * slant / 4.0, lat * h * h / 2.0);
      const double vol = kPi * r * r * h / 3.0;
      add(b, vol, kPi * r * r * h * h / 4.0, kPi * std::pow(r, 4) * h / 20.0, kPi * r * r * h * h * h / 5.0);
      break;
    }
  }
  return raw;
}

}  // namespace

double SegmentDensity::density(double t) const {
  if (lambda.empty()) return 0.0;
  if (lambda.size() == 1) return lambda.front();
  const double s = std::clamp(t, 0.0, 1.0) * static_cast<double>(pieces());
  const std::size_t k = std::min(static_cast<std::size_t>(s), pieces() - 1);
  const double u = s - static_cast<double>(k);
  return (1.0 - u) * lambda[k] + u * lambda[k + 1];
}

double SegmentDensity::mass() const {
  if (lambda.size() < 2) return lambda.empty() ? 0.0 : lambda.front() * length();
  quad::CompensatedSum s;
  const double h = length() / static_cast<double>(pieces());
  for (std::size_t k = 0; k < pieces(); ++k) s += 0.5 * h * (lambda[k] + lambda[k + 1]);
  return s.value();
}

double AtomicMeasure::support_distance(const Vec3& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& atom : atoms) {
    std::visit(overloaded{[&](const PointMass& p) { d = std::min(d, (x - p.x).norm()); },
                          [&](const SegmentDensity& s) { d = std::min(d, distance_to_segment(x, s.p0, s.p1)); }},
               atom);
  }
  return d;
}

AtomicMeasure operator+(const AtomicMeasure& lhs, const AtomicMeasure& rhs) {
  AtomicMeasure out = lhs;
  out.dim = std::max(lhs.dim, rhs.dim);
  out.atoms.insert(out.atoms.end(), rhs.atoms.begin(), rhs.atoms.end());
  return out;
}

int dimension(const Body& body) {
  return std::holds_alternative<SymmetricBody3D>(body) ? 3 : 2;
}

BodyMeasure make_body_measure(Body body, double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(a + b > 0.0)) {
    throw Error(ErrorCode::InvalidMeasure, "density weights need a, b >= 0 and a + b > 0");
  }
  return BodyMeasure{std::move(body), a, b};
}

double total_mass(const BodyMeasure& m) {
  return std::visit(overloaded{[&](const ConvexPolygon& p) { return m.a * p.perimeter() + m.b * p.area(); },
                               [&](const Disk& d) {
                                 return m.a * 2.0 * kPi * d.radius + m.b * kPi * d.radius * d.radius;
                               },
                               [&](const SymmetricBody3D& s) { return m.a * s.surface_area() + m.b * s.volume(); }},
                    m.body);
}

double total_mass(const AtomicMeasure& m) {
  quad::CompensatedSum s;
  for (const auto& atom : m.atoms) {
    std::visit(overloaded{[&](const PointMass& p) { s += p.m; }, [&](const SegmentDensity& seg) { s += seg.mass(); }},
               atom);
  }
  return s.value();
}

Moments moments(const BodyMeasure& m) {
  const RawMoments raw =
      std::visit(overloaded{[&](const ConvexPolygon& p) { return polygon_moments(p, m.a, m.b); },
                            [&](const Disk& d) { return disk_moments(d, m.a, m.b); },
                            [&](const SymmetricBody3D& s) { return body3d_moments(s, m.a, m.b); }},
                 m.body);
  return raw.centered();
}

Moments moments(const AtomicMeasure& m) {
  RawMoments raw;
  for (const auto& atom : m.atoms) {
    std::visit(overloaded{[&](const PointMass& p) { raw.add_point(p.x, p.m); },
                          [&](const SegmentDensity& s) {
                            const std::size_t k = s.pieces();
                            if (k == 0) {
                              if (!s.lambda.empty()) raw.add_linear_piece(s.p0, s.p1, s.lambda[0], s.lambda[0]);
                              return;
                            }
                            for (std::size_t i = 0; i < k; ++i) {
                              const Vec3 q0 = s.p0 + (static_cast<double>(i) / k) * (s.p1 - s.p0);
                              const Vec3 q1 = s.p0 + (static_cast<double>(i + 1) / k) * (s.p1 - s.p0);
                              raw.add_linear_piece(q0, q1, s.lambda[i], s.lambda[i + 1]);
                            }
                          }},
               atom);
  }
  return raw.centered();
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
  Vec2 lo;
  double side;
  std::vector<std::size_t> disks;  // ancestor disks that reach into this cell
};

struct PackedDisk {
  Vec2 center;
  double radius;
};

bool cell_meets_polygon(const Cell& c, const ConvexPolygon& poly, const std::vector<HalfPlane>& hp) {
  const auto [lo, hi] = poly.bounding_box();
  if (c.lo.x() > hi.x() || c.lo.y() > hi.y() || c.lo.x() + c.side < lo.x() || c.lo.y() + c.side < lo.y()) {
    return false;
  }
  for (const auto& h : hp) {
    bool any_inside = false;
    for (int k = 0; k < 4 && !any_inside; ++k) {
      const Vec2 corner = c.lo + c.side * Vec2(k & 1, k >> 1);
      any_inside = h.signed_distance(corner) > 0.0;
    }
    if (!any_inside) return false;
  }
  return true;
}

bool cell_inside_polygon(const Cell& c, const std::vector<HalfPlane>& hp) {
  for (const auto& h : hp) {
    for (int k = 0; k < 4; ++k) {
      if (h.signed_distance(c.lo + c.side * Vec2(k & 1, k >> 1)) < 0.0) return false;
    }
  }
  return true;
}

double nearest_in_cell(const Cell& c, const Vec2& p) {
  const Vec2 hi = c.lo + Vec2(c.side, c.side);
  return (p - p.cwiseMax(c.lo).cwiseMin(hi)).norm();
}

double farthest_in_cell(const Cell& c, const Vec2& p) {
  const Vec2 mid = c.lo + Vec2(0.5 * c.side, 0.5 * c.side);
  const Vec2 d = (p - mid).cwiseAbs() + Vec2(0.5 * c.side, 0.5 * c.side);
  return d.norm();
}

}  // namespace

Packing ball_packing(const ConvexPolygon& poly, int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidMeasure, "packing depth must be >= 1");
  const auto hp = poly.half_planes();
  const auto [lo, hi] = poly.bounding_box();
  const double side = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double eps = 1e-12 * side;

  std::vector<PackedDisk> disks;
  std::vector<Cell> level{Cell{lo, side, {}}};
  for (int d = 0; d < depth && !level.empty(); ++d) {
    const bool last = (d + 1 == depth);
    std::vector<Cell> next;
    for (auto& cell : level) {
      if (!cell_meets_polygon(cell, poly, hp)) continue;
      bool covered = false;
      std::vector<std::size_t> touching;
      for (std::size_t id : cell.disks) {
        const auto& disk = disks[id];
        if (farthest_in_cell(cell, disk.center) <= disk.radius) {
          covered = true;
          break;
        }
        if (nearest_in_cell(cell, disk.center) < disk.radius - eps) touching.push_back(id);
      }
      if (covered) continue;
      if (touching.empty() && cell_inside_polygon(cell, hp)) {
        disks.push_back({cell.lo + Vec2(0.5 * cell.side, 0.5 * cell.side), 0.5 * cell.side});
        touching.push_back(disks.size() - 1);
      }
      if (last) continue;
      const double half = 0.5 * cell.side;
      for (int k = 0; k < 4; ++k) {
        Cell child{cell.lo + half * Vec2(k & 1, k >> 1), half, {}};
        for (std::size_t id : touching) {
          if (nearest_in_cell(child, disks[id].center) < disks[id].radius - eps) child.disks.push_back(id);
        }
        next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }

  Packing out;
  out.measure.dim = 2;
  quad::CompensatedSum covered;
  for (const auto& d : disks) {
    const double m = kPi * d.radius * d.radius;
    out.measure.add(PointMass{lift(d.center), m});
    out.radii.push_back(d.radius);
    covered += m;
  }
  out.residual_area = poly.area() - covered.value();
  return out;
}

AtomicMeasure scale_to_mass(const AtomicMeasure& m, double target) {
  const double total = total_mass(m);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "cannot rescale a measure with zero total mass");
  if (!(target >= 0.0)) throw Error(ErrorCode::InvalidMeasure, "target mass must be >= 0");
  const double f = target / total;
  AtomicMeasure out = m;
  for (auto& atom : out.atoms) {
    std::visit(overloaded{[f](PointMass& p) { p.m *= f; },
                          [f](SegmentDensity& s) {
                            for (double& l : s.lambda) l *= f;
                          }},
               atom);
  }
  return out;
}

}  // namespace mbody
