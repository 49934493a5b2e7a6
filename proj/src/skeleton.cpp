#include "mbody/skeleton.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mbody/detail/overloaded.hpp"
#include "mbody/error.hpp"

namespace mbody {

using detail::overloaded;

AtomicMeasure analytic_mother(const BodyMeasure& body) {
  const double total = total_mass(body);
  return std::visit(
      overloaded{
          [](const ConvexPolygon&) -> AtomicMeasure {
            throw Error(ErrorCode::UnsupportedBody, "polygons have no closed-form mother body; fit one instead");
          },
          [&](const Disk& d) {
            AtomicMeasure m;
            m.dim = 2;
            m.add(PointMass{lift(d.center), total});
            return m;
          },
          [&](const SymmetricBody3D& s) {
            AtomicMeasure m;
            m.dim = 3;
            switch (s.kind) {
              case SymmetricBody3D::Kind::SphereShell:
              case SymmetricBody3D::Kind::SolidBall: m.add(PointMass{Vec3::Zero(), total}); break;
              case SymmetricBody3D::Kind::SolidCylinder: {
                const double half = 0.5 * s.length;
                const double lambda = total / s.length;
                m.add(SegmentDensity{Vec3(0, 0, -half), Vec3(0, 0, half), {lambda, lambda}});
                break;
              }
              case SymmetricBody3D::Kind::ConeSurface: {
                if (body.b > 0.0) {
                  throw Error(ErrorCode::UnsupportedBody, "no closed-form mother body for a solid cone");
                }
                // Ring at height h_i has radius R_i = R h_i / h; the axis carries 2 pi R_i sigma.
                const double base = 2.0 * std::numbers::pi * s.radius * body.a;
                m.add(SegmentDensity{Vec3::Zero(), Vec3(0, 0, s.height), {0.0, base}});
                break;
              }
            }
            return m;
          }},
      body.body);
}

// ---------------------------------------------------------------------------

DensityBasis::DensityBasis(SkeletonGraph skeleton, int subdivisions)
    : skeleton_(std::move(skeleton)), subdivisions_(subdivisions), nodes_(skeleton_.nodes) {
  if (subdivisions < 1) throw Error(ErrorCode::InvalidMeasure, "subdivisions per edge must be >= 1");
  edge_nodes_.resize(skeleton_.edges.size());
  for (std::size_t e = 0; e < skeleton_.edges.size(); ++e) {
    const auto [u, v] = skeleton_.edges[e];
    auto& along = edge_nodes_[e];
    along.push_back(u);
    for (int i = 1; i < subdivisions; ++i) {
      const double t = static_cast<double>(i) / subdivisions;
      nodes_.push_back(skeleton_.nodes[u] + t * (skeleton_.nodes[v] - skeleton_.nodes[u]));
      along.push_back(nodes_.size() - 1);
    }
    along.push_back(v);
    for (std::size_t i = 0; i + 1 < along.size(); ++i) pieces_.push_back({along[i], along[i + 1], e});
  }
}

Eigen::VectorXd DensityBasis::hat_masses() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (const auto& p : pieces_) {
    const double len = (nodes_[p.b] - nodes_[p.a]).norm();
    m(static_cast<Eigen::Index>(p.a)) += 0.5 * len;
    m(static_cast<Eigen::Index>(p.b)) += 0.5 * len;
  }
  return m;
}

AtomicMeasure DensityBasis::hat(std::size_t j) const {
  AtomicMeasure m;
  m.dim = 2;
  for (const auto& p : pieces_) {
    if (p.a == j) m.add(SegmentDensity{lift(nodes_[p.a]), lift(nodes_[p.b]), {1.0, 0.0}});
    if (p.b == j) m.add(SegmentDensity{lift(nodes_[p.a]), lift(nodes_[p.b]), {0.0, 1.0}});
  }
  return m;
}

AtomicMeasure DensityBasis::to_measure(const Eigen::VectorXd& c) const {
  if (c.size() != static_cast<Eigen::Index>(size())) {
    throw Error(ErrorCode::InvalidMeasure, "coefficient count does not match the basis");
  }
  AtomicMeasure m;
  m.dim = 2;
  for (std::size_t e = 0; e < skeleton_.edges.size(); ++e) {
    SegmentDensity s;
    s.p0 = lift(skeleton_.nodes[skeleton_.edges[e][0]]);
    s.p1 = lift(skeleton_.nodes[skeleton_.edges[e][1]]);
    for (std::size_t id : edge_nodes_[e]) s.lambda.push_back(c(static_cast<Eigen::Index>(id)));
    m.add(std::move(s));
  }
  return m;
}

std::vector<Vec2> Ring::points() const {
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    pts.push_back(center + radius * Vec2(std::cos(t), std::sin(t)));
  }
  return pts;
}

FitConfig FitConfig::defaults(const ConvexPolygon& poly, std::size_t basis_size, int subdivisions) {
  const Vec2 c = poly.centroid();
  const double rc = poly.circumradius();
  const std::size_t per_ring = (4 * basis_size + 3) / 4 * 4;
  FitConfig cfg;
  cfg.subdivisions = subdivisions;
  cfg.collocation = {Ring{c, 1.5 * rc, per_ring}, Ring{c, 2.5 * rc, per_ring}};
  cfg.holdout = {Ring{c, 3.5 * rc, per_ring}};
  return cfg;
}

CollocationSystem assemble_system(const ConvexPolygon& poly, const DensityBasis& basis,
                                  const std::vector<Ring>& rings, const Kernel& k, double quad_tol) {
  CollocationSystem sys;
  for (const auto& r : rings) {
    for (const auto& p : r.points()) {
      if (poly.signed_depth(p) >= -1e-12 * poly.diameter()) {
        throw Error(ErrorCode::CollocationInsideBody, "collocation point inside or on the polygon");
      }
      sys.points.push_back(p);
    }
  }
  const auto rows = static_cast<Eigen::Index>(sys.points.size());
  sys.A = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(basis.size()));
  sys.y.resize(rows);
  const BodyMeasure body{poly, 0.0, 1.0};
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec3 x = lift(sys.points[static_cast<std::size_t>(i)]);
    for (const auto& piece : basis.pieces()) {
      const Vec3 a = lift(basis.nodes()[piece.a]);
      const Vec3 b = lift(basis.nodes()[piece.b]);
      AtomicMeasure left;
      left.dim = 2;
      left.add(SegmentDensity{a, b, {1.0, 0.0}});
      AtomicMeasure right;
      right.dim = 2;
      right.add(SegmentDensity{a, b, {0.0, 1.0}});
      sys.A(i, static_cast<Eigen::Index>(piece.a)) += potential_atomic(k, left, x, quad_tol).value;
      sys.A(i, static_cast<Eigen::Index>(piece.b)) += potential_atomic(k, right, x, quad_tol).value;
    }
    sys.y(i) = potential_body_quadrature(k, body, x, quad_tol).value;
  }
  return sys;
}

namespace {

double rms(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.norm() / std::sqrt(static_cast<double>(v.size())); }

}  // namespace

DensityFit fit_density(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const FitConfig& cfg,
                       const std::optional<MassTarget>& mass, const CollocationSystem* holdout) {
  const double cols = static_cast<double>(std::max<Eigen::Index>(A.cols(), 1));
  NnlsOptions opt;
  opt.lambda_reg = cfg.lambda_reg.value_or(1e-10 * A.colwise().squaredNorm().sum() / cols);
  if (mass && cfg.mass_constraint) opt.equality = LinearEquality{mass->hat_masses, mass->mass};
  const NnlsResult sol = solve_nnls(A, y, opt);

  DensityFit out;
  out.coefficients = sol.x;
  FitReport& r = out.report;
  r.lambda_reg = opt.lambda_reg;
  r.iterations = sol.iterations;
  r.residual_rms = rms(A * sol.x - y);
  r.residual_rel = r.residual_rms / std::max(rms(y), 1e-300);
  if (holdout != nullptr) {
    r.holdout_rms = rms(holdout->A * sol.x - holdout->y);
    r.holdout_rel = r.holdout_rms / std::max(rms(holdout->y), 1e-300);
  }
  if (mass) r.mass_error = mass->hat_masses.dot(sol.x) - mass->mass;
  r.min_coefficient = sol.x.size() > 0 ? sol.x.minCoeff() : 0.0;
  return out;
}

PolygonMother mother_of_polygon(const ConvexPolygon& poly, const FitConfig& cfg, const Kernel& k) {
  DensityBasis basis(medial_axis(poly), cfg.subdivisions);
  FitConfig used = cfg;
  const FitConfig def = FitConfig::defaults(poly, basis.size(), cfg.subdivisions);
  if (used.collocation.empty()) used.collocation = def.collocation;
  if (used.holdout.empty()) used.holdout = def.holdout;

  const CollocationSystem sys = assemble_system(poly, basis, used.collocation, k, used.quad_tol);
  const CollocationSystem hold = assemble_system(poly, basis, used.holdout, k, used.quad_tol);
  const MassTarget target{basis.hat_masses(), poly.area()};
  DensityFit fit = fit_density(sys.A, sys.y, used, target, &hold);
  AtomicMeasure measure = basis.to_measure(fit.coefficients);
  return {std::move(basis), std::move(fit.coefficients), std::move(measure), fit.report};
}

}  // namespace mbody
