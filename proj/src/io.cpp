#include "mbody/io.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include <fmt/core.h>

#include "mbody/detail/overloaded.hpp"
#include "mbody/error.hpp"

namespace mbody::io {

using detail::overloaded;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j.at(key), key) : fallback;
}

json point_json(const Vec3& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p(i));
  return a;
}

Vec3 point_from(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) bad("expected a point with " + std::to_string(dim) + " coordinates");
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < dim; ++i) p(i) = number(j[i], "coordinate");
  return p;
}

Vec2 point2_from(const json& j) { return drop(point_from(j, 2)); }

std::vector<Vec2> vertex_list(const json& j) {
  const json& arr = j.is_object() ? field(j, "vertices") : j;
  if (!arr.is_array()) bad("polygon must be an array of [x, y] pairs");
  std::vector<Vec2> v;
  for (const auto& p : arr) v.push_back(point2_from(p));
  return v;
}

template <class F>
auto guarded(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

}  // namespace

json to_json(const ConvexPolygon& poly) {
  json a = json::array();
  for (const auto& v : poly.vertices()) a.push_back({v.x(), v.y()});
  return a;
}

ConvexPolygon polygon_from_json(const json& j) {
  const std::vector<Vec2> v = guarded([&] { return vertex_list(j); });
  return validate_polygon(v);
}

json to_json(const SkeletonGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back({n.x(), n.y()});
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({e[0], e[1]});
  return {{"nodes", nodes}, {"edges", edges}};
}

SkeletonGraph skeleton_from_json(const json& j) {
  return guarded([&] {
    SkeletonGraph g;
    for (const auto& n : field(j, "nodes")) g.nodes.push_back(point2_from(n));
    for (const auto& e : field(j, "edges")) {
      if (!e.is_array() || e.size() != 2) bad("edge must be a pair of node indices");
      const auto a = e[0].get<std::size_t>();
      const auto b = e[1].get<std::size_t>();
      if (a >= g.nodes.size() || b >= g.nodes.size()) bad("edge refers to a missing node");
      g.edges.push_back({a, b});
    }
    return g;
  });
}

json to_json(const AtomicMeasure& m) {
  json atoms = json::array();
  for (const auto& atom : m.atoms) {
    std::visit(overloaded{[&](const PointMass& p) {
                            atoms.push_back({{"type", "point"}, {"x", point_json(p.x, m.dim)}, {"m", p.m}});
                          },
                          [&](const SegmentDensity& s) {
                            atoms.push_back({{"type", "segment"},
                                             {"p0", point_json(s.p0, m.dim)},
                                             {"p1", point_json(s.p1, m.dim)},
                                             {"lambda", s.lambda}});
                          }},
               atom);
  }
  return {{"dim", m.dim}, {"atoms", atoms}};
}

AtomicMeasure measure_from_json(const json& j) {
  return guarded([&] {
    const json& atoms = field(j, "atoms");
    if (!atoms.is_array()) bad("atoms must be an array");
    AtomicMeasure m;
    if (j.contains("dim")) {
      m.dim = j.at("dim").get<int>();
    } else if (!atoms.empty()) {
      const json& first = atoms.front();
      m.dim = static_cast<int>((first.contains("x") ? first.at("x") : field(first, "p0")).size());
    }
    if (m.dim < 1 || m.dim > 3) bad("measure dimension must be 1, 2 or 3");
    for (const auto& a : atoms) {
      const std::string type = field(a, "type").get<std::string>();
      if (type == "point") {
        m.add(PointMass{point_from(field(a, "x"), m.dim), number(field(a, "m"), "m")});
      } else if (type == "segment") {
        SegmentDensity s{point_from(field(a, "p0"), m.dim), point_from(field(a, "p1"), m.dim), {}};
        for (const auto& v : field(a, "lambda")) s.lambda.push_back(number(v, "lambda"));
        if (s.lambda.size() < 2) bad("segment density needs at least two samples");
        m.add(std::move(s));
      } else {
        bad("unknown atom type '" + type + "'");
      }
    }
    return m;
  });
}

json to_json(const BodyMeasure& b) {
  json j = std::visit(
      overloaded{[](const ConvexPolygon& p) { return json{{"type", "polygon"}, {"vertices", to_json(p)}}; },
                 [](const Disk& d) {
                   return json{{"type", "disk"}, {"center", {d.center.x(), d.center.y()}}, {"radius", d.radius}};
                 },
                 [](const SymmetricBody3D& s) {
                   json o{{"type", std::string(to_string(s.kind))}, {"radius", s.radius}};
                   if (s.kind == SymmetricBody3D::Kind::SolidCylinder) o["length"] = s.length;
                   if (s.kind == SymmetricBody3D::Kind::ConeSurface) o["height"] = s.height;
                   return o;
                 }},
      b.body);
  j["a"] = b.a;
  j["b"] = b.b;
  return j;
}

BodyMeasure body_from_json(const json& j) {
  return guarded([&] {
    const std::string type = field(j, "type").get<std::string>();
    const double a = number_or(j, "a", 0.0);
    const double b = number_or(j, "b", 1.0);
    auto positive = [&](const char* key) {
      const double v = number(field(j, key), key);
      if (!(v > 0.0)) bad(std::string(key) + " must be positive");
      return v;
    };
    Body body;
    if (type == "polygon") {
      body = validate_polygon(vertex_list(field(j, "vertices")));
    } else if (type == "disk") {
      body = Disk{j.contains("center") ? point2_from(j.at("center")) : Vec2(Vec2::Zero()), positive("radius")};
    } else if (type == "sphere-shell") {
      body = SymmetricBody3D::sphere_shell(positive("radius"));
    } else if (type == "solid-ball") {
      body = SymmetricBody3D::solid_ball(positive("radius"));
    } else if (type == "solid-cylinder") {
      body = SymmetricBody3D::solid_cylinder(positive("radius"), positive("length"));
    } else if (type == "cone-surface") {
      body = SymmetricBody3D::cone_surface(positive("radius"), positive("height"));
    } else {
      bad("unknown body type '" + type + "'");
    }
    return make_body_measure(std::move(body), a, b);
  });
}

json to_json(const Candidate& c) {
  return std::visit([](const auto& m) { return to_json(m); }, c);
}

Candidate candidate_from_json(const json& j) {
  if (j.is_object() && j.contains("atoms")) return measure_from_json(j);
  return body_from_json(j);
}

json to_json(const Scene& s) {
  json bodies = json::array();
  for (const auto& b : s.bodies) bodies.push_back(to_json(b));
  json measures = json::array();
  for (const auto& m : s.measures) measures.push_back(to_json(m));
  return {{"dimension", s.dimension},
          {"bodies", bodies},
          {"measures", measures},
          {"constants", {{"kappa", s.constants.kappa}}},
          {"kernel", {{"n", s.kernel.n}, {"c2", s.kernel.c2}, {"c3", s.kernel.c3}}}};
}

Scene scene_from_json(const json& j) {
  return guarded([&] {
    Scene s;
    s.dimension = field(j, "dimension").get<int>();
    if (s.dimension < 1 || s.dimension > 3) bad("scene dimension must be 1, 2 or 3");
    s.kernel = Kernel::dim(s.dimension);
    if (j.contains("kernel")) {
      const json& k = j.at("kernel");
      if (k.contains("n") && k.at("n").get<int>() != s.dimension) bad("kernel dimension differs from the scene");
      s.kernel.c2 = number_or(k, "c2", s.kernel.c2);
      s.kernel.c3 = number_or(k, "c3", s.kernel.c3);
    }
    if (j.contains("constants")) {
      const json& c = j.at("constants");
      if (c.contains("units")) {
        const std::string u = c.at("units").get<std::string>();
        if (u == "si") {
          s.constants = ElectroConstants::si();
        } else if (u != "natural") {
          bad("units must be natural or si");
        }
      }
      if (c.contains("eps0")) s.constants = ElectroConstants::from_eps0(number(c.at("eps0"), "eps0"));
      if (c.contains("kappa")) s.constants.kappa = number(c.at("kappa"), "kappa");
      if (!(s.constants.kappa > 0.0)) bad("kappa must be positive");
    }
    if (j.contains("bodies")) {
      for (const auto& b : j.at("bodies")) {
        s.bodies.push_back(body_from_json(b));
        if (dimension(s.bodies.back().body) != s.dimension) bad("body dimension differs from the scene");
      }
    }
    if (j.contains("measures")) {
      for (const auto& m : j.at("measures")) {
        if (m.is_object() && m.value("type", "") == "analytic-mother") {
          const auto i = field(m, "body").get<std::size_t>();
          if (i >= s.bodies.size()) bad("analytic-mother refers to a missing body");
          s.measures.emplace_back(analytic_mother(s.bodies[i]));
        } else {
          s.measures.push_back(candidate_from_json(m));
        }
        const int d = std::visit(overloaded{[](const AtomicMeasure& a) { return a.dim; },
                                           [](const BodyMeasure& b) { return dimension(b.body); }},
                                 s.measures.back());
        if (d != s.dimension) bad("measure dimension differs from the scene");
      }
    }
    return s;
  });
}

json to_json(const Ring& r) {
  return {{"center", {r.center.x(), r.center.y()}}, {"radius", r.radius}, {"count", r.count}};
}

namespace {

std::vector<Ring> rings_from(const json& j) {
  std::vector<Ring> out;
  for (const auto& r : j) {
    Ring ring;
    if (r.contains("center")) ring.center = point2_from(r.at("center"));
    ring.radius = number(field(r, "radius"), "radius");
    ring.count = field(r, "count").get<std::size_t>();
    if (!(ring.radius > 0.0) || ring.count == 0) bad("rings need a positive radius and count");
    out.push_back(ring);
  }
  return out;
}

}  // namespace

json to_json(const FitConfig& c) {
  json col = json::array();
  for (const auto& r : c.collocation) col.push_back(to_json(r));
  json hold = json::array();
  for (const auto& r : c.holdout) hold.push_back(to_json(r));
  json j{{"collocation", col},
         {"holdout", hold},
         {"mass_constraint", c.mass_constraint},
         {"subdivisions", c.subdivisions},
         {"quad_tol", c.quad_tol},
         {"holdout_tolerance", c.holdout_tolerance}};
  j["lambda_reg"] = c.lambda_reg ? json(*c.lambda_reg) : json(nullptr);
  return j;
}

FitConfig fit_config_from_json(const json& j) {
  return guarded([&] {
    FitConfig c;
    if (!j.is_object()) bad("fit config must be an object");
    if (j.contains("collocation")) c.collocation = rings_from(j.at("collocation"));
    if (j.contains("holdout")) c.holdout = rings_from(j.at("holdout"));
    if (j.contains("lambda_reg") && !j.at("lambda_reg").is_null()) {
      c.lambda_reg = number(j.at("lambda_reg"), "lambda_reg");
      if (*c.lambda_reg < 0.0) bad("lambda_reg must be >= 0");
    }
    c.mass_constraint = j.value("mass_constraint", c.mass_constraint);
    c.subdivisions = j.value("subdivisions", c.subdivisions);
    c.quad_tol = number_or(j, "quad_tol", c.quad_tol);
    c.holdout_tolerance = number_or(j, "holdout_tolerance", c.holdout_tolerance);
    if (c.subdivisions < 1) bad("subdivisions must be >= 1");
    return c;
  });
}

json to_json(const FitReport& r) {
  return {{"residual_rms", r.residual_rms}, {"residual_rel", r.residual_rel},   {"holdout_rms", r.holdout_rms},
          {"holdout_rel", r.holdout_rel},   {"mass_error", r.mass_error},       {"min_coefficient", r.min_coefficient},
          {"lambda_reg", r.lambda_reg},     {"iterations", r.iterations}};
}

json to_json(const AxiomConfig& c) {
  json extra = json::array();
  for (const auto& p : c.extra_points) extra.push_back(point_json(p, 3));
  return {{"ring_factors", c.ring_factors},
          {"ring_count", c.ring_count},
          {"random_samples", c.random_samples},
          {"random_band", c.random_band},
          {"seed", c.seed},
          {"extra_points", extra},
          {"interior_grid", c.interior_grid},
          {"clearance", c.clearance},
          {"tol_match", c.tol_match},
          {"tol_dominate", c.tol_dominate},
          {"floor", c.floor},
          {"connectivity_grid", c.connectivity_grid},
          {"support_thickness", c.support_thickness},
          {"quad_tol", c.quad_tol}};
}

AxiomConfig axiom_config_from_json(const json& j) {
  return guarded([&] {
    AxiomConfig c;
    if (!j.is_object()) bad("axiom config must be an object");
    if (j.contains("ring_factors")) c.ring_factors = j.at("ring_factors").get<std::vector<double>>();
    c.ring_count = j.value("ring_count", c.ring_count);
    c.random_samples = j.value("random_samples", c.random_samples);
    if (j.contains("random_band")) c.random_band = j.at("random_band").get<std::array<double, 2>>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("extra_points")) {
      for (const auto& p : j.at("extra_points")) {
        if (!p.is_array() || p.empty() || p.size() > 3) bad("extra point needs 1 to 3 coordinates");
        Vec3 v = Vec3::Zero();
        for (std::size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(p[i], "coordinate");
        c.extra_points.push_back(v);
      }
    }
    c.interior_grid = j.value("interior_grid", c.interior_grid);
    c.clearance = number_or(j, "clearance", c.clearance);
    c.tol_match = number_or(j, "tol_match", c.tol_match);
    c.tol_dominate = number_or(j, "tol_dominate", c.tol_dominate);
    c.floor = number_or(j, "floor", c.floor);
    c.connectivity_grid = j.value("connectivity_grid", c.connectivity_grid);
    c.support_thickness = number_or(j, "support_thickness", c.support_thickness);
    c.quad_tol = number_or(j, "quad_tol", c.quad_tol);
    c.validate();
    return c;
  });
}

json to_json(const AxiomResult& r) {
  json j{{"pass", r.pass}, {"worst_residual", r.worst_residual}, {"samples", r.samples}, {"note", r.note}};
  j["witness"] = r.witness ? point_json(*r.witness, 3) : json(nullptr);
  return j;
}

json to_json(const VerificationReport& r) {
  json j;
  for (std::size_t i = 0; i < r.axioms.size(); ++i) j["axiom" + std::to_string(i + 1)] = to_json(r.axioms[i]);
  j["overall"] = r.overall;
  return j;
}

json to_json(const Packing& p) {
  return {{"measure", to_json(p.measure)}, {"radii", p.radii}, {"residual_area", p.residual_area}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::vector<Vec3> read_points_csv(std::istream& in, int dim) {
  std::vector<Vec3> pts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      bad("non-numeric row in points file: " + line);
    }
    first = false;
    if (static_cast<int>(vals.size()) != dim) {
      bad("expected " + std::to_string(dim) + " coordinates per row, got: " + line);
    }
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < dim; ++i) p(i) = vals[static_cast<std::size_t>(i)];
    pts.push_back(p);
  }
  return pts;
}

std::vector<Vec3> read_points_csv(const std::filesystem::path& path, int dim) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  return read_points_csv(in, dim);
}

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_number(row[i]);
    out += "\n";
  }
  return out;
}

}  // namespace mbody::io
