#include "mbody/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mbody/detail/overloaded.hpp"
#include "mbody/error.hpp"
#include "mbody/quadrature.hpp"

namespace mbody {

using detail::overloaded;

namespace {

constexpr double kPi = std::numbers::pi;

void require_dimension(const Kernel& k, int n) {
  if (k.n != n) {
    throw Error(ErrorCode::UnsupportedDimension,
                "kernel dimension " + std::to_string(k.n) + " does not match measure dimension " + std::to_string(n));
  }
}

}  // namespace

Kernel Kernel::dim(int n) {
  if (n < 1 || n > 3) throw Error(ErrorCode::UnsupportedDimension, "kernel dimension must be 1, 2 or 3");
  Kernel k;
  k.n = n;
  return k;
}

double Kernel::of_distance(double r) const {
  switch (n) {
    case 1: return -0.5 * r;
    case 2: return -c2 * std::log(r);
    default: return c3 / r;
  }
}

double Kernel::radial_moment_2d(double r) const {
  if (r <= 0.0) return 0.0;
  return -c2 * 0.5 * r * r * (std::log(r) - 0.5);
}

double kernel_eval(const Kernel& k, const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) throw Error(ErrorCode::SingularPoint, "kernel evaluated at the origin");
  return k.of_distance(r);
}

ElectroConstants ElectroConstants::si() { return from_eps0(8.85e-12); }

ElectroConstants ElectroConstants::from_eps0(double eps0) {
  if (!(eps0 > 0.0)) throw Error(ErrorCode::InvalidRadius, "eps0 must be positive");
  return {1.0 / (4.0 * kPi * eps0)};
}

double ElectroConstants::eps0() const { return 1.0 / (4.0 * kPi * kappa); }

// ---------------------------------------------------------------------------
// Atomic measures

namespace {

struct Accum {
  quad::CompensatedSum value;
  quad::CompensatedSum error;
  void add(const quad::Result& r) {
    value += r.value;
    error += r.error;
  }
};

// Projection parameter of x on q0 + t (q1 - q0), when strictly interior.
void push_projection(std::vector<double>& breaks, const Vec3& x, const Vec3& q0, const Vec3& q1) {
  const Vec3 d = q1 - q0;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return;
  const double t = (x - q0).dot(d) / len2;
  if (t > 1e-9 && t < 1.0 - 1e-9) breaks.insert(breaks.end() - 1, t);
}

void segment_potential(const Kernel& k, const SegmentDensity& s, const Vec3& x, const quad::Options& opt,
                       Accum& acc) {
  const std::size_t pieces = s.pieces();
  const double len = s.length();
  if (pieces == 0 || len == 0.0) return;
  const double h = len / static_cast<double>(pieces);
  for (std::size_t i = 0; i < pieces; ++i) {
    const double l0 = s.lambda[i];
    const double l1 = s.lambda[i + 1];
    if (l0 == 0.0 && l1 == 0.0) continue;
    const Vec3 q0 = s.p0 + (static_cast<double>(i) / pieces) * (s.p1 - s.p0);
    const Vec3 q1 = s.p0 + (static_cast<double>(i + 1) / pieces) * (s.p1 - s.p0);
    auto f = [&](double t) {
      const double r = (x - (q0 + t * (q1 - q0))).norm();
      return h * (l0 + t * (l1 - l0)) * k.of_distance(r);
    };
    std::vector<double> breaks{0.0, 1.0};
    push_projection(breaks, x, q0, q1);
    acc.add(quad::integrate_pieces(f, breaks, opt));
  }
}

}  // namespace

PotentialSample potential_atomic(const Kernel& k, const AtomicMeasure& m, const Vec3& x, double rel_tol) {
  require_dimension(k, m.dim);
  const quad::Options opt{rel_tol, 1e-300, 48};
  constexpr double on_tol = 1e-12;
  Accum acc;
  for (const auto& atom : m.atoms) {
    std::visit(overloaded{[&](const PointMass& p) {
                            const double r = (x - p.x).norm();
                            if (r <= on_tol) throw Error(ErrorCode::OnSupport, "evaluation point on a point mass");
                            acc.value += p.m * k.of_distance(r);
                          },
                          [&](const SegmentDensity& s) {
                            if (distance_to_segment(x, s.p0, s.p1) <= on_tol) {
                              const bool at_zero_start =
                                  (x - s.p0).norm() <= on_tol && !s.lambda.empty() && s.lambda.front() == 0.0;
                              const bool at_zero_end =
                                  (x - s.p1).norm() <= on_tol && !s.lambda.empty() && s.lambda.back() == 0.0;
                              if (!at_zero_start && !at_zero_end) {
                                throw Error(ErrorCode::OnSupport, "evaluation point on a segment atom");
                              }
                            }
                            segment_potential(k, s, x, opt, acc);
                          }},
               atom);
  }
  return {x, acc.value.value(), acc.error.value()};
}

// ---------------------------------------------------------------------------
// Polygons

namespace routes {

namespace {

struct Tri {
  Vec2 a, b, c;
};

double tensor_rule(const Kernel& k, const Tri& t, const Vec2& x) {
  const auto& rule = quad::gauss_legendre16();
  const double jac = cross(t.b - t.a, t.c - t.b);
  quad::CompensatedSum s;
  for (std::size_t i = 0; i < quad::kOrder; ++i) {
    const double u = 0.5 * (rule.nodes[i] + 1.0);
    for (std::size_t j = 0; j < quad::kOrder; ++j) {
      const double v = 0.5 * (rule.nodes[j] + 1.0);
      const Vec2 p = t.a + u * (t.b - t.a) + u * v * (t.c - t.b);
      s += 0.25 * rule.weights[i] * rule.weights[j] * u * k.of_distance((x - p).norm());
    }
  }
  return jac * s.value();
}

void refine_triangle(const Kernel& k, const Tri& t, const Vec2& x, double coarse, double tol, int depth,
                     quad::CompensatedSum& value, quad::CompensatedSum& error) {
  const Vec2 ab = 0.5 * (t.a + t.b);
  const Vec2 bc = 0.5 * (t.b + t.c);
  const Vec2 ca = 0.5 * (t.c + t.a);
  const std::array<Tri, 4> kids{Tri{t.a, ab, ca}, Tri{ab, t.b, bc}, Tri{ca, bc, t.c}, Tri{ab, bc, ca}};
  std::array<double, 4> q{};
  double fine = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    q[i] = tensor_rule(k, kids[i], x);
    fine += q[i];
  }
  const double diff = std::abs(fine - coarse);
  if (diff <= tol) {
    value += fine;
    error += diff;
    return;
  }
  if (depth >= 24 || !std::isfinite(fine)) {
    throw Error(ErrorCode::NonConvergent, "triangle quadrature did not converge");
  }
  for (std::size_t i = 0; i < 4; ++i) refine_triangle(k, kids[i], x, q[i], 0.5 * tol, depth + 1, value, error);
}

}  // namespace

PotentialSample polygon_fan(const Kernel& k, const ConvexPolygon& poly, const Vec2& x, double rel_tol) {
  const Vec2 c = poly.centroid();
  std::vector<Tri> tris;
  std::vector<double> coarse;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    tris.push_back({c, poly.vertex(i), poly.vertex(i + 1)});
    coarse.push_back(tensor_rule(k, tris.back(), x));
    magnitude += std::abs(coarse.back());
  }
  const double tol = std::max(rel_tol * magnitude, 1e-300) / std::sqrt(static_cast<double>(tris.size()));
  quad::CompensatedSum value;
  quad::CompensatedSum error;
  for (std::size_t i = 0; i < tris.size(); ++i) refine_triangle(k, tris[i], x, coarse[i], tol, 0, value, error);
  return {lift(x), value.value(), error.value()};
}

PotentialSample polygon_polar(const Kernel& k, const ConvexPolygon& poly, const Vec2& x, double rel_tol) {
  const quad::Options opt{rel_tol, 1e-300, 48};
  Accum acc;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly.vertex(i) - x;
    const Vec2 q = poly.vertex(i + 1) - x;
    const double sweep = std::atan2(cross(p, q), p.dot(q));
    const Vec2 dir = (q - p).normalized();
    Vec2 normal(dir.y(), -dir.x());
    double h = normal.dot(p);
    if (h < 0.0) {
      normal = -normal;
      h = -h;
    }
    if (h <= 1e-14 * poly.diameter() || sweep == 0.0) continue;
    const double theta0 = std::atan2(p.y(), p.x());
    auto f = [&](double t) {
      const double theta = theta0 + t;
      const Vec2 u(std::cos(theta), std::sin(theta));
      return k.radial_moment_2d(h / u.dot(normal));
    };
    // Split at the foot of the perpendicular, where R(theta) is smallest.
    std::vector<double> breaks{0.0, sweep};
    const double foot = std::remainder(std::atan2(normal.y(), normal.x()) - theta0, 2.0 * std::numbers::pi);
    if ((sweep > 0.0 && foot > 0.0 && foot < sweep) || (sweep < 0.0 && foot < 0.0 && foot > sweep)) {
      breaks.insert(breaks.begin() + 1, foot);
    }
    acc.add(quad::integrate_pieces(f, breaks, opt));
  }
  return {lift(x), acc.value.value(), acc.error.value()};
}

double ring(const Kernel& k, double a, double z0, double rho, double z) {
  const double dz = z - z0;
  const double d2 = (rho + a) * (rho + a) + dz * dz;
  const double m = 4.0 * a * rho / d2;
  const double kk = std::sqrt(std::clamp(m, 0.0, 1.0));
  return k.c3 * (2.0 / kPi) * std::comp_ellint_1(kk) / std::sqrt(d2);
}

}  // namespace routes

namespace {

quad::Result polygon_boundary(const Kernel& k, const ConvexPolygon& poly, const Vec2& x, const quad::Options& opt) {
  Accum acc;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec3 a = lift(poly.vertex(i));
    const Vec3 b = lift(poly.vertex(i + 1));
    const double len = (b - a).norm();
    auto f = [&](double t) { return len * k.of_distance((lift(x) - (a + t * (b - a))).norm()); };
    std::vector<double> breaks{0.0, 1.0};
    push_projection(breaks, lift(x), a, b);
    acc.add(quad::integrate_pieces(f, breaks, opt));
  }
  return {acc.value.value(), acc.error.value()};
}

PotentialSample polygon_potential(const Kernel& k, const ConvexPolygon& poly, double wa, double wb, const Vec2& x,
                                  double rel_tol) {
  if (poly.boundary_distance(x) <= 1e-12 * poly.diameter()) {
    throw Error(ErrorCode::OnBoundary, "evaluation point on the polygon boundary");
  }
  PotentialSample out{lift(x), 0.0, 0.0};
  if (wb > 0.0) {
    const PotentialSample v = poly.signed_depth(x) > 0.0 ? routes::polygon_polar(k, poly, x, rel_tol)
                                                         : routes::polygon_fan(k, poly, x, rel_tol);
    out.value += wb * v.value;
    out.estimated_error += wb * v.estimated_error;
  }
  if (wa > 0.0) {
    const quad::Result r = polygon_boundary(k, poly, x, {rel_tol, 1e-300, 48});
    out.value += wa * r.value;
    out.estimated_error += wa * r.error;
  }
  return out;
}

// Nested integral; the inner error is folded into the estimate as a relative bound.
template <class Inner>
quad::Result nested(Inner&& inner, const std::vector<double>& outer_breaks, double rel_tol) {
  double worst_inner = 0.0;
  auto f = [&](double s) {
    const quad::Result r = inner(s);
    if (r.value != 0.0) worst_inner = std::max(worst_inner, r.error / std::abs(r.value));
    return r.value;
  };
  quad::Result out = quad::integrate_pieces(f, outer_breaks, {rel_tol, 1e-300, 48});
  out.error += worst_inner * std::abs(out.value);
  return out;
}

std::vector<double> breaks_with(double lo, double hi, std::initializer_list<double> interior) {
  std::vector<double> b{lo};
  std::vector<double> mids;
  for (double v : interior) {
    if (v > lo + 1e-12 * (hi - lo) && v < hi - 1e-12 * (hi - lo)) mids.push_back(v);
  }
  std::sort(mids.begin(), mids.end());
  b.insert(b.end(), mids.begin(), mids.end());
  b.push_back(hi);
  return b;
}

PotentialSample disk_potential(const Kernel& k, const Disk& disk, double wa, double wb, const Vec2& x,
                               double rel_tol) {
  const Vec2 d = x - disk.center;
  const double dist = d.norm();
  const double r0 = disk.radius;
  if (std::abs(dist - r0) <= 1e-12 * r0) throw Error(ErrorCode::OnBoundary, "evaluation point on the disk rim");
  const double inner_tol = rel_tol * 1e-2;
  const double phi_x = std::atan2(d.y(), d.x());
  PotentialSample out{lift(x), 0.0, 0.0};
  if (wb > 0.0) {
    quad::Result r;
    if (dist > r0) {
      auto inner = [&](double rad) {
        auto g = [&](double phi) {
          const Vec2 y = disk.center + rad * Vec2(std::cos(phi), std::sin(phi));
          return rad * k.of_distance((x - y).norm());
        };
        return quad::integrate_pieces(g, std::array{phi_x - kPi, phi_x, phi_x + kPi}, {inner_tol, 1e-300, 48});
      };
      r = nested(inner, {0.0, r0}, rel_tol);
    } else {
      auto g = [&](double phi) {
        const Vec2 u(std::cos(phi), std::sin(phi));
        const double du = d.dot(u);
        const double reach = -du + std::sqrt(std::max(du * du - dist * dist + r0 * r0, 0.0));
        return k.radial_moment_2d(reach);
      };
      r = quad::integrate_pieces(g, std::array{phi_x - kPi, phi_x, phi_x + kPi}, {rel_tol, 1e-300, 48});
    }
    out.value += wb * r.value;
    out.estimated_error += wb * r.error;
  }
  if (wa > 0.0) {
    auto g = [&](double phi) {
      const Vec2 y = disk.center + r0 * Vec2(std::cos(phi), std::sin(phi));
      return r0 * k.of_distance((x - y).norm());
    };
    const quad::Result r =
        quad::integrate_pieces(g, std::array{phi_x - kPi, phi_x, phi_x + kPi}, {rel_tol, 1e-300, 48});
    out.value += wa * r.value;
    out.estimated_error += wa * r.error;
  }
  return out;
}

PotentialSample body3d_potential(const Kernel& k, const SymmetricBody3D& body, double wa, double wb, const Vec3& x,
                                 double rel_tol) {
  const double rho = std::hypot(x.x(), x.y());
  const double z = x.z();
  const double R = body.radius;
  const double scale = body.bounding_radius();
  const bool at_apex = body.kind == SymmetricBody3D::Kind::ConeSurface && x.norm() <= 1e-12 * scale;
  if (std::abs(body.signed_depth(x)) <= 1e-12 * scale && !at_apex) {
    throw Error(ErrorCode::OnBoundary, "evaluation point on the body surface");
  }
  const double inner_tol = rel_tol * 1e-2;
  const quad::Options opt{rel_tol, 1e-300, 48};
  const quad::Options inner_opt{inner_tol, 1e-300, 48};
  auto ring_at = [&](double a, double z0) { return routes::ring(k, a, z0, rho, z); };

  quad::Result surf;
  quad::Result vol;
  switch (body.kind) {
    case SymmetricBody3D::Kind::SphereShell:
    case SymmetricBody3D::Kind::SolidBall: {
      const double phi_x = std::atan2(rho, z);
      const double r_x = x.norm();
      auto shell = [&](double r, const quad::Options& o) {
        auto g = [&](double phi) {
          return 2.0 * kPi * r * r * std::sin(phi) * ring_at(r * std::sin(phi), r * std::cos(phi));
        };
        return quad::integrate_pieces(g, breaks_with(0.0, kPi, {phi_x}), o);
      };
      if (wa > 0.0) surf = shell(R, opt);
      if (wb > 0.0) vol = nested([&](double r) { return shell(r, inner_opt); }, breaks_with(0.0, R, {r_x}), rel_tol);
      break;
    }
    case SymmetricBody3D::Kind::SolidCylinder: {
      const double half = 0.5 * body.length;
      auto disk_at = [&](double z0, const quad::Options& o) {
        auto g = [&](double a) { return 2.0 * kPi * a * ring_at(a, z0); };
        return quad::integrate_pieces(g, breaks_with(0.0, R, {rho}), o);
      };
      if (wa > 0.0) {
        auto lateral = [&](double z0) { return 2.0 * kPi * R * ring_at(R, z0); };
        Accum acc;
        acc.add(quad::integrate_pieces(lateral, breaks_with(-half, half, {z}), opt));
        acc.add(disk_at(-half, opt));
        acc.add(disk_at(half, opt));
        surf = {acc.value.value(), acc.error.value()};
      }
      if (wb > 0.0) {
        vol = nested([&](double z0) { return disk_at(z0, inner_opt); }, breaks_with(-half, half, {z}), rel_tol);
      }
      break;
    }
    case SymmetricBody3D::Kind::ConeSurface: {
      const double h = body.height;
      const double slant = std::hypot(R, h);
      if (wa > 0.0) {
        auto lateral = [&](double z0) {
          const double a = R * z0 / h;
          return 2.0 * kPi * a * (slant / h) * ring_at(a, z0);
        };
        surf = quad::integrate_pieces(lateral, breaks_with(0.0, h, {z, (z * h + rho * R) * h / (slant * slant)}), opt);
      }
      if (wb > 0.0) {
        auto disk_at = [&](double z0) {
          const double top = R * z0 / h;
          auto g = [&](double a) { return 2.0 * kPi * a * ring_at(a, z0); };
          if (top <= 0.0) return quad::Result{};
          return quad::integrate_pieces(g, breaks_with(0.0, top, {rho}), inner_opt);
        };
        vol = nested(disk_at, breaks_with(0.0, h, {z}), rel_tol);
      }
      break;
    }
  }
  return {x, wa * surf.value + wb * vol.value, wa * surf.error + wb * vol.error};
}

}  // namespace

PotentialSample potential_body_quadrature(const Kernel& k, const BodyMeasure& m, const Vec3& x, double rel_tol) {
  require_dimension(k, dimension(m.body));
  return std::visit(
      overloaded{[&](const ConvexPolygon& p) { return polygon_potential(k, p, m.a, m.b, drop(x), rel_tol); },
                 [&](const Disk& d) { return disk_potential(k, d, m.a, m.b, drop(x), rel_tol); },
                 [&](const SymmetricBody3D& s) { return body3d_potential(k, s, m.a, m.b, x, rel_tol); }},
      m.body);
}

// ---------------------------------------------------------------------------
// Closed forms

double shell_potential_closed(double R, double sigma, double r, const ElectroConstants& c) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidRadius, "shell radius must be positive");
  if (!(r > R)) throw Error(ErrorCode::InsideShell, "closed form holds only outside the shell");
  const double q = 4.0 * kPi * R * R * sigma;
  return c.kappa * q / r;
}

double cylinder_potential_closed(double R, double rho, double r, double ref_a, double eps0) {
  if (!(R > 0.0) || !(r > R) || !(ref_a > R)) {
    throw Error(ErrorCode::InvalidRadius, "cylinder potential needs r > R and ref_a > R");
  }
  return -(R * R * rho / (2.0 * eps0)) * std::log(r / ref_a);
}

double line_potential_closed(double lambda, double r, double ref_a, double eps0) {
  if (!(r > 0.0) || !(ref_a > 0.0)) throw Error(ErrorCode::InvalidRadius, "line potential needs r, ref_a > 0");
  return -(lambda / (2.0 * eps0 * kPi)) * std::log(r / ref_a);
}

double cone_apex_potential_closed(double R, double h, double sigma, double eps0) {
  if (!(R > 0.0) || !(h > 0.0)) throw Error(ErrorCode::InvalidRadius, "cone needs R, h > 0");
  return sigma * R / (2.0 * eps0);
}

double cone_apex_potential_from_charge(double q, double R, double h, double eps0) {
  if (!(R > 0.0) || !(h > 0.0)) throw Error(ErrorCode::InvalidRadius, "cone needs R, h > 0");
  return q / (2.0 * eps0 * kPi * std::hypot(R, h));
}

double cone_axis_mother_potential(double R, double h, double sigma, double eps0) {
  if (!(R > 0.0) || !(h > 0.0)) throw Error(ErrorCode::InvalidRadius, "cone needs R, h > 0");
  // q_i / h_i = 2 pi (R / h) sigma is constant along the axis.
  const double integrand = 2.0 * kPi * (R / h) * sigma;
  return integrand * h / (4.0 * kPi * eps0);
}

}  // namespace mbody
