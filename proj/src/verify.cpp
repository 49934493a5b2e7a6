#include "mbody/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include "mbody/detail/overloaded.hpp"
#include "mbody/error.hpp"
#include "mbody/skeleton.hpp"

namespace mbody {

using detail::overloaded;

namespace {

constexpr double kPi = std::numbers::pi;

// Evaluates f(0..n-1) on a few threads. Results land in index order and the
// first exception by index is rethrown, so the outcome does not depend on
// scheduling.
template <class F>
std::vector<double> parallel_map(std::size_t n, F f) {
  std::vector<double> out(n, 0.0);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1 || n < 8) {
    run(0);
    for (std::size_t w = 1; w < workers; ++w) run(w);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Vec3 body_center(const Body& b) {
  return std::visit(overloaded{[](const ConvexPolygon& p) { return lift(p.centroid()); },
                               [](const Disk& d) { return lift(d.center); },
                               [](const SymmetricBody3D&) { return Vec3(Vec3::Zero()); }},
                    b);
}

double body_radius(const Body& b) {
  return std::visit(overloaded{[](const ConvexPolygon& p) { return p.circumradius(); },
                               [](const Disk& d) { return d.radius; },
                               [](const SymmetricBody3D& s) { return s.bounding_radius(); }},
                    b);
}

// > 0 inside, 0 on the boundary.
double body_depth(const Body& b, const Vec3& x) {
  return std::visit(overloaded{[&](const ConvexPolygon& p) { return p.signed_depth(drop(x)); },
                               [&](const Disk& d) { return d.radius - (drop(x) - d.center).norm(); },
                               [&](const SymmetricBody3D& s) { return s.signed_depth(x); }},
                    b);
}

double boundary_distance(const Body& b, const Vec3& x) {
  return std::visit(overloaded{[&](const ConvexPolygon& p) { return p.boundary_distance(drop(x)); },
                               [&](const Disk& d) { return std::abs(d.radius - (drop(x) - d.center).norm()); },
                               [&](const SymmetricBody3D& s) { return std::abs(s.signed_depth(x)); }},
                    b);
}

double support_distance(const Candidate& mu, const Vec3& x) {
  return std::visit(overloaded{[&](const AtomicMeasure& m) { return m.support_distance(x); },
                               [&](const BodyMeasure& m) {
                                 if (m.b > 0.0 && body_depth(m.body, x) >= 0.0) return 0.0;
                                 return boundary_distance(m.body, x);
                               }},
                    mu);
}

int candidate_dim(const Candidate& mu) {
  return std::visit(overloaded{[](const AtomicMeasure& m) { return m.dim; },
                               [](const BodyMeasure& m) { return dimension(m.body); }},
                    mu);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

}  // namespace

void AxiomConfig::validate() const {
  if (!(tol_match > 0.0 && tol_dominate > 0.0 && floor > 0.0 && clearance > 0.0 && quad_tol > 0.0 &&
        support_thickness >= 0.0 && interior_grid > 0 && connectivity_grid > 0)) {
    throw Error(ErrorCode::InvalidMeasure, "axiom tolerances and grid sizes must be positive");
  }
}

PotentialSample candidate_potential(const Kernel& k, const Candidate& mu, const Vec3& x, double rel_tol) {
  return std::visit(overloaded{[&](const AtomicMeasure& m) { return potential_atomic(k, m, x, rel_tol); },
                               [&](const BodyMeasure& m) { return potential_body_quadrature(k, m, x, rel_tol); }},
                    mu);
}

std::vector<Vec3> exterior_samples(const BodyMeasure& body, const AxiomConfig& cfg) {
  const int dim = dimension(body.body);
  const Vec3 c = body_center(body.body);
  const double rb = body_radius(body.body);
  std::vector<Vec3> pts;
  for (double f : cfg.ring_factors) {
    const std::size_t n = cfg.ring_count;
    for (std::size_t i = 0; i < n; ++i) {
      if (dim == 2) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        pts.push_back(c + f * rb * Vec3(std::cos(t), std::sin(t), 0.0));
      } else {
        // Fibonacci sphere
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = static_cast<double>(i) * kPi * (3.0 - std::sqrt(5.0));
        pts.push_back(c + f * rb * Vec3(r * std::cos(phi), r * std::sin(phi), z));
      }
    }
  }
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.random_samples; ++i) {
    const double radius = rb * (cfg.random_band[0] + (cfg.random_band[1] - cfg.random_band[0]) * uniform01(rng));
    const double phi = 2.0 * kPi * uniform01(rng);
    if (dim == 2) {
      pts.push_back(c + radius * Vec3(std::cos(phi), std::sin(phi), 0.0));
    } else {
      const double z = 2.0 * uniform01(rng) - 1.0;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      pts.push_back(c + radius * Vec3(r * std::cos(phi), r * std::sin(phi), z));
    }
  }
  pts.insert(pts.end(), cfg.extra_points.begin(), cfg.extra_points.end());
  const double tol = 1e-12 * std::max(1.0, rb);
  for (const auto& p : pts) {
    if (body_depth(body.body, p) > tol) throw Error(ErrorCode::SampleInsideBody, "exterior sample lies inside the body");
  }
  return pts;
}

AxiomResult check_exterior_match(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg,
                                 const Kernel& k) {
  const std::vector<Vec3> pts = exterior_samples(body, cfg);
  const std::vector<double> res = parallel_map(pts.size(), [&](std::size_t i) {
    const double ub = potential_body_quadrature(k, body, pts[i], cfg.quad_tol).value;
    const double um = candidate_potential(k, mu, pts[i], cfg.quad_tol).value;
    return std::abs(um - ub) / std::max(std::abs(ub), cfg.floor);
  });
  AxiomResult r;
  r.samples = pts.size();
  r.pass = true;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!r.witness || res[i] > r.worst_residual) {
      r.worst_residual = res[i];
      r.witness = pts[i];
    }
  }
  r.pass = r.worst_residual <= cfg.tol_match;
  return r;
}

namespace {

std::vector<Vec3> interior_grid(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg) {
  const int g = cfg.interior_grid;
  std::vector<Vec3> pts;
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  bool planar = true;
  std::visit(overloaded{[&](const ConvexPolygon& p) {
                          const auto [a, b] = p.bounding_box();
                          lo = lift(a);
                          hi = lift(b);
                        },
                        [&](const Disk& d) {
                          lo = lift(d.center - Vec2(d.radius, d.radius));
                          hi = lift(d.center + Vec2(d.radius, d.radius));
                        },
                        [&](const SymmetricBody3D& s) {
                          // Meridian half-plane; the bodies are axisymmetric.
                          planar = false;
                          using K = SymmetricBody3D::Kind;
                          if (s.kind == K::SolidCylinder) {
                            lo = Vec3(0, 0, -0.5 * s.length);
                            hi = Vec3(s.radius, 0, 0.5 * s.length);
                          } else if (s.kind == K::ConeSurface) {
                            lo = Vec3(0, 0, 0);
                            hi = Vec3(s.radius, 0, s.height);
                          } else {
                            lo = Vec3(0, 0, -s.radius);
                            hi = Vec3(s.radius, 0, s.radius);
                          }
                        }},
             body.body);
  const double scale = (hi - lo).norm();
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double u = (i + 0.5) / g;
      const double v = (j + 0.5) / g;
      const Vec3 p = planar ? Vec3(lo.x() + u * (hi.x() - lo.x()), lo.y() + v * (hi.y() - lo.y()), 0.0)
                            : Vec3(lo.x() + u * (hi.x() - lo.x()), 0.0, lo.z() + v * (hi.z() - lo.z()));
      if (body_depth(body.body, p) <= 1e-9 * scale) continue;
      if (support_distance(mu, p) <= cfg.clearance) continue;
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace

AxiomResult check_domination(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg, const Kernel& k) {
  const std::vector<Vec3> pts = interior_grid(body, mu, cfg);
  const std::vector<double> diff = parallel_map(pts.size(), [&](std::size_t i) {
    const double ub = potential_body_quadrature(k, body, pts[i], cfg.quad_tol).value;
    const double um = candidate_potential(k, mu, pts[i], cfg.quad_tol).value;
    return um - ub;
  });
  AxiomResult r;
  r.samples = pts.size();
  double lowest = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (!r.witness || diff[i] < lowest) {
      lowest = diff[i];
      r.witness = pts[i];
    }
  }
  r.worst_residual = std::max(0.0, -lowest);
  r.pass = lowest >= -cfg.tol_dominate;
  r.note = pts.empty() ? "no interior points clear of the support" : "min(U^mu - U^body) = " + std::to_string(lowest);
  return r;
}

AxiomResult check_positivity(const Candidate& mu) {
  AxiomResult r;
  double lowest = 0.0;
  auto see = [&](double v, const Vec3& at) {
    ++r.samples;
    if (v < lowest) {
      lowest = v;
      r.witness = at;
    }
  };
  std::visit(overloaded{[&](const AtomicMeasure& m) {
                          for (const auto& atom : m.atoms) {
                            std::visit(overloaded{[&](const PointMass& p) { see(p.m, p.x); },
                                                  [&](const SegmentDensity& s) {
                                                    const double pieces = static_cast<double>(
                                                        std::max<std::size_t>(s.pieces(), 1));
                                                    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
                                                      see(s.lambda[i],
                                                          s.p0 + (static_cast<double>(i) / pieces) * (s.p1 - s.p0));
                                                    }
                                                  }},
                                       atom);
                          }
                        },
                        [&](const BodyMeasure& m) {
                          see(m.a, body_center(m.body));
                          see(m.b, body_center(m.body));
                        }},
             mu);
  r.worst_residual = -lowest;
  r.pass = lowest >= 0.0;
  if (r.samples == 0) r.note = "empty measure";
  return r;
}

AxiomResult check_support_null(const Candidate& mu) {
  AxiomResult r;
  r.pass = true;
  std::visit(overloaded{[&](const AtomicMeasure& m) {
                          for (const auto& atom : m.atoms) {
                            ++r.samples;
                            if (const auto* s = std::get_if<SegmentDensity>(&atom)) {
                              // A segment is full-dimensional only on the line.
                              if (m.dim == 1 && s->length() > 0.0 && r.pass) {
                                r.pass = false;
                                r.worst_residual = s->length();
                                r.witness = s->p0;
                                r.note = "segment atom has positive length in R^1";
                              }
                            }
                          }
                        },
                        [&](const BodyMeasure& m) {
                          r.samples = 1;
                          if (m.b > 0.0) {
                            r.pass = false;
                            r.worst_residual = m.b;
                            r.witness = body_center(m.body);
                            r.note = "volume part b > 0 has positive Lebesgue measure";
                          }
                        }},
             mu);
  return r;
}

AxiomResult check_connectivity(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg) {
  const int dim = dimension(body.body);
  AxiomResult r;
  if (dim == 3) {
    if (std::holds_alternative<BodyMeasure>(mu)) {
      throw Error(ErrorCode::UnsupportedDimension, "3D connectivity is only decided for point and segment supports");
    }
    r.pass = true;
    r.note = "points and segments have codimension >= 2 in R^3";
    return r;
  }
  if (dim != 2 || candidate_dim(mu) != 2) {
    throw Error(ErrorCode::UnsupportedDimension, "connectivity check needs a planar body and measure");
  }

  const int g = cfg.connectivity_grid;
  const Vec3 c = body_center(body.body);
  const double rb = body_radius(body.body);
  const double h = 2.0 * rb / g;
  const int n = g + 4;  // two margin cells on each side
  const Vec3 origin = c - Vec3(rb + 2.0 * h, rb + 2.0 * h, 0.0);
  const double thickness = cfg.support_thickness > 0.0 ? cfg.support_thickness : h;
  auto center = [&](int i, int j) -> Vec3 { return origin + Vec3((i + 0.5) * h, (j + 0.5) * h, 0.0); };

  std::vector<char> blocked(static_cast<std::size_t>(n * n));
  std::vector<char> inside(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec3 p = center(i, j);
      blocked[i * n + j] = support_distance(mu, p) <= thickness;
      inside[i * n + j] = body_depth(body.body, p) > 0.0;
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(n * n), 0);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int id = i * n + j;
      if ((i == 0 || j == 0 || i == n - 1 || j == n - 1) && !blocked[id] && !inside[id]) {
        seen[id] = 1;
        queue.push_back(id);
      }
    }
  }
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const int i = id / n;
    const int j = id % n;
    const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[1] < 0 || q[0] >= n || q[1] >= n) continue;
      const int nid = q[0] * n + q[1];
      if (seen[nid] || blocked[nid]) continue;
      seen[nid] = 1;
      queue.push_back(nid);
    }
  }
  std::size_t free_cells = 0;
  std::size_t sealed = 0;
  for (int id = 0; id < n * n; ++id) {
    if (!inside[id] || blocked[id]) continue;
    ++free_cells;
    if (!seen[id]) {
      if (sealed == 0) r.witness = center(id / n, id % n);
      ++sealed;
    }
  }
  r.samples = free_cells;
  r.worst_residual = free_cells == 0 ? 0.0 : static_cast<double>(sealed) / static_cast<double>(free_cells);
  r.pass = sealed == 0;
  r.note = std::to_string(sealed) + " of " + std::to_string(free_cells) + " interior cells cut off";
  return r;
}

VerificationReport verify_all(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg, const Kernel& k) {
  cfg.validate();
  VerificationReport rep;
  rep.axioms[0] = check_exterior_match(body, mu, cfg, k);
  rep.axioms[1] = check_domination(body, mu, cfg, k);
  rep.axioms[2] = check_positivity(mu);
  rep.axioms[3] = check_support_null(mu);
  rep.axioms[4] = check_connectivity(body, mu, cfg);
  rep.overall = std::all_of(rep.axioms.begin(), rep.axioms.end(), [](const AxiomResult& a) { return a.pass; });
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::vector<Table> reproduce_shell(const Params& p) {
  const double R = param(p, "R", 1.0);
  const double sigma = param(p, "sigma", 1.0);
  const double eps0 = param(p, "eps0", 1.0);
  const auto c = ElectroConstants::from_eps0(eps0);
  const Kernel k = Kernel::dim(3);
  const BodyMeasure shell{SymmetricBody3D::sphere_shell(R), sigma, 0.0};
  const AtomicMeasure point = analytic_mother(shell);

  Table t{"shell", {"r", "closed", "ring_quadrature", "mother_point", "closed_minus_mother", "quadrature_rel_error"}, {}};
  for (double f : {1.5, 2.0, 4.0, 8.0}) {
    const double r = f * R;
    const Vec3 x(0, 0, r);
    const double closed = shell_potential_closed(R, sigma, r, c);
    const double quad = potential_body_quadrature(k, shell, x, 1e-12).value / eps0;
    const double mother = potential_atomic(k, point, x).value / eps0;
    t.rows.push_back({r, closed, quad, mother, closed - mother, std::abs(quad - closed) / std::abs(closed)});
  }
  return {t};
}

std::vector<Table> reproduce_cylinder(const Params& p) {
  const double R = param(p, "R", 1.0);
  const double rho = param(p, "rho", 1.0);
  const double a = param(p, "a", 2.0 * R);
  const double eps0 = param(p, "eps0", 1.0);
  const Kernel k = Kernel::dim(2);
  const BodyMeasure disk{Disk{Vec2::Zero(), R}, 0.0, rho};
  const double disk_ref = potential_body_quadrature(k, disk, Vec3(a, 0, 0), 1e-12).value;

  Table t{"cylinder", {"r", "cylinder_closed", "line_closed", "difference", "disk_quadrature", "disk_minus_line"}, {}};
  for (double f : {1.5, 2.0, 3.0}) {
    const double r = f * a;
    const double cyl = cylinder_potential_closed(R, rho, r, a, eps0);
    const double line = line_potential_closed(kPi * R * R * rho, r, a, eps0);
    const double disk_v = (potential_body_quadrature(k, disk, Vec3(r, 0, 0), 1e-12).value - disk_ref) / eps0;
    t.rows.push_back({r, cyl, line, cyl - line, disk_v, disk_v - line});
  }
  return {t};
}

std::vector<Table> reproduce_cone(const Params& p) {
  const double R = param(p, "R", 1.0);
  const double h = param(p, "h", 1.0);
  const double sigma = param(p, "sigma", 1.0);
  const double eps0 = param(p, "eps0", 1.0);
  const Kernel k = Kernel::dim(3);
  const BodyMeasure cone{SymmetricBody3D::cone_surface(R, h), sigma, 0.0};
  const AtomicMeasure axis = analytic_mother(cone);
  const double slant = std::hypot(R, h);
  const double q = kPi * R * slant * sigma;

  Table apex{"cone-apex",
             {"closed", "from_charge", "axis_mother", "axis_quadrature", "slant_ring_quadrature", "mother_minus_closed",
              "ring_minus_closed"},
             {}};
  const double closed = cone_apex_potential_closed(R, h, sigma, eps0);
  const double from_q = cone_apex_potential_from_charge(q, R, h, eps0);
  const double mother = cone_axis_mother_potential(R, h, sigma, eps0);
  const double axis_q = potential_atomic(k, axis, Vec3::Zero(), 1e-12).value / eps0;
  const double ring_q = potential_body_quadrature(k, cone, Vec3::Zero(), 1e-12).value / eps0;
  apex.rows.push_back({closed, from_q, mother, axis_q, ring_q, mother - closed, ring_q - closed});

  // The axis density only matches at the apex; elsewhere the residual is reported.
  Table off{"cone-off-apex", {"x", "y", "z", "body", "mother", "rel_residual"}, {}};
  const std::vector<Vec3> pts{Vec3(0, 0, -0.5 * h), Vec3(0, 0, -2.0 * h), Vec3(0, 0, 2.0 * h),
                              Vec3(2.0 * slant, 0, 0.5 * h), Vec3(4.0 * slant, 0, 0)};
  for (const auto& x : pts) {
    const double ub = potential_body_quadrature(k, cone, x, 1e-12).value / eps0;
    const double um = potential_atomic(k, axis, x, 1e-12).value / eps0;
    off.rows.push_back({x.x(), x.y(), x.z(), ub, um, std::abs(um - ub) / std::abs(ub)});
  }

  Table mass{"cone-charge", {"surface_charge", "axis_charge", "ratio"}, {}};
  const double axis_mass = total_mass(axis);
  mass.rows.push_back({q, axis_mass, axis_mass / q});
  return {apex, off, mass};
}

std::vector<Table> reproduce_square(const Params& p) {
  const double s = param(p, "half_side", 1.0);
  const int K = static_cast<int>(param(p, "K", 16));
  const std::vector<Vec2> v{{-s, -s}, {s, -s}, {s, s}, {-s, s}};
  const ConvexPolygon poly = validate_polygon(v);
  const Kernel k = Kernel::dim(2);
  FitConfig cfg;
  cfg.subdivisions = K;
  if (p.count("lambda_reg")) cfg.lambda_reg = p.at("lambda_reg");
  const PolygonMother fit = mother_of_polygon(poly, cfg, k);

  Table density{"square-density", {"edge", "arclength", "density"}, {}};
  const auto& nodes = fit.basis.nodes();
  for (std::size_t e = 0; e < fit.basis.skeleton().edges.size(); ++e) {
    const auto& ids = fit.basis.edge_nodes(e);
    for (std::size_t id : ids) {
      density.rows.push_back({static_cast<double>(e), (nodes[id] - nodes[ids.front()]).norm(),
                              fit.coefficients(static_cast<Eigen::Index>(id))});
    }
  }

  Table residuals{"square-residuals", {"radius", "angle", "body", "mother", "rel_residual"}, {}};
  const BodyMeasure body{poly, 0.0, 1.0};
  for (double f : {2.0, 3.5}) {
    const Ring ring{Vec2::Zero(), f * poly.circumradius(), 16};
    for (std::size_t i = 0; i < ring.count; ++i) {
      const Vec3 x = lift(ring.points()[i]);
      const double ub = potential_body_quadrature(k, body, x, 1e-11).value;
      const double um = potential_atomic(k, fit.measure, x, 1e-11).value;
      residuals.rows.push_back({ring.radius, 2.0 * kPi * static_cast<double>(i) / static_cast<double>(ring.count), ub,
                                um, std::abs(um - ub) / std::max(std::abs(ub), 1e-12)});
    }
  }

  const Eigen::VectorXd& c = fit.coefficients;
  const double mean = c.mean();
  const double sd = std::sqrt((c.array() - mean).square().mean());
  Table summary{"square-summary",
                {"K", "residual_rel", "holdout_rel", "mass", "min_coefficient", "stdev_over_mean"},
                {}};
  summary.rows.push_back({static_cast<double>(K), fit.report.residual_rel, fit.report.holdout_rel,
                          total_mass(fit.measure), fit.report.min_coefficient, sd / mean});
  return {density, residuals, summary};
}

}  // namespace

std::vector<Table> reproduce(const std::string& name, const Params& params) {
  if (name == "shell") return reproduce_shell(params);
  if (name == "cylinder") return reproduce_cylinder(params);
  if (name == "cone") return reproduce_cone(params);
  if (name == "square") return reproduce_square(params);
  throw Error(ErrorCode::UnknownCase, "unknown case '" + name + "' (shell, cylinder, cone, square)");
}

}  // namespace mbody
