#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <sstream>

#include "mbody/error.hpp"
#include "mbody/io.hpp"
#include "support.hpp"

using namespace mbody;
using namespace testing;
using io::json;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mbody::Error");
  return ErrorCode::InvalidMeasure;
}

std::vector<Vec3> parse(const std::string& text, int dim) {
  std::istringstream in(text);
  return io::read_points_csv(in, dim);
}

}  // namespace

TEST_CASE("polygon round trip") {
  const auto p = regular(5, 1.3, 0.2);
  const auto back = io::polygon_from_json(json::parse(io::to_json(p).dump()));
  REQUIRE(back.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(back.vertices()[i] == p.vertices()[i]);
  CHECK(io::polygon_from_json(json{{"vertices", io::to_json(p)}}).size() == 5);

  CHECK(code_of([] { io::polygon_from_json(json::parse("[[0,0],[1,0]]")); }) == ErrorCode::TooFewVertices);
  CHECK(code_of([] { io::polygon_from_json(json::parse("[[0,0],[1,0],[\"a\",1]]")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::polygon_from_json(json::parse("{\"v\": 1}")); }) == ErrorCode::ParseError);
}

TEST_CASE("skeleton round trip") {
  const auto g = medial_axis(rectangle());
  const auto back = io::skeleton_from_json(json::parse(io::to_json(g).dump()));
  CHECK(back.nodes == g.nodes);
  CHECK(back.edges == g.edges);
  CHECK(code_of([] { io::skeleton_from_json(json::parse(R"({"nodes": [[0,0]], "edges": [[0,1]]})")); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("measure round trip keeps every bit") {
  AtomicMeasure m;
  m.dim = 3;
  m.add(PointMass{Vec3(0.1, 1.0 / 3.0, -2.0), 0.7});
  m.add(SegmentDensity{{0, 0, 0}, {1, 2, 3}, {1.0 / 7.0, 0.0, std::sqrt(2.0)}});
  const auto back = io::measure_from_json(json::parse(io::to_json(m).dump()));
  CHECK(back.dim == 3);
  REQUIRE(back.atoms.size() == 2);
  CHECK(std::get<PointMass>(back.atoms[0]).x == std::get<PointMass>(m.atoms[0]).x);
  CHECK(std::get<SegmentDensity>(back.atoms[1]).lambda == std::get<SegmentDensity>(m.atoms[1]).lambda);

  // dim from the first atom
  const auto inferred = io::measure_from_json(json::parse(R"({"atoms": [{"type": "point", "x": [1, 2], "m": 1}]})"));
  CHECK(inferred.dim == 2);
  CHECK(code_of([] { io::measure_from_json(json::parse(R"({"atoms": [{"type": "blob"}]})")); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] {
          io::measure_from_json(json::parse(R"({"atoms": [{"type": "segment", "p0": [0,0], "p1": [1,0], "lambda": [1]}]})"));
        }) == ErrorCode::ParseError);
}

TEST_CASE("body round trips") {
  const std::vector<BodyMeasure> bodies{
      make_body_measure(square(), 0.5, 1.0),
      make_body_measure(Disk{{1.0, -2.0}, 0.75}, 0.0, 2.0),
      make_body_measure(SymmetricBody3D::sphere_shell(2.0), 1.0, 0.0),
      make_body_measure(SymmetricBody3D::solid_ball(1.5), 0.0, 1.0),
      make_body_measure(SymmetricBody3D::solid_cylinder(0.5, 3.0), 0.0, 1.0),
      make_body_measure(SymmetricBody3D::cone_surface(1.0, 2.0), 1.0, 0.0),
  };
  for (const auto& b : bodies) {
    const json j = io::to_json(b);
    CAPTURE(j.dump());
    const auto back = io::body_from_json(json::parse(j.dump()));
    CHECK(io::to_json(back) == j);
    CHECK(back.a == b.a);
    CHECK(back.b == b.b);
  }
  CHECK(code_of([] { io::body_from_json(json::parse(R"({"type": "disk", "radius": -1})")); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { io::body_from_json(json::parse(R"({"type": "torus", "radius": 1})")); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { io::body_from_json(json::parse(R"({"type": "disk", "radius": 1, "a": -1})")); }) ==
        ErrorCode::InvalidMeasure);
}

TEST_CASE("scenes") {
  const auto s = io::scene_from_json(json::parse(R"({
    "dimension": 3,
    "bodies": [{"type": "sphere-shell", "radius": 1, "a": 1, "b": 0}],
    "measures": [{"type": "analytic-mother", "body": 0}],
    "constants": {"units": "si"}
  })"));
  CHECK(s.dimension == 3);
  CHECK(s.kernel.n == 3);
  REQUIRE(s.measures.size() == 1);
  const auto& mu = std::get<AtomicMeasure>(s.measures[0]);
  CHECK(total_mass(mu) == doctest::Approx(4.0 * kPi));
  CHECK(s.constants.kappa == doctest::Approx(ElectroConstants::si().kappa));

  const auto back = io::scene_from_json(json::parse(io::to_json(s).dump()));
  CHECK(back.constants.kappa == s.constants.kappa);
  CHECK(io::to_json(back) == io::to_json(s));

  CHECK(code_of([] {
          io::scene_from_json(json::parse(R"({"dimension": 2, "bodies": [{"type": "solid-ball", "radius": 1}]})"));
        }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          io::scene_from_json(json::parse(R"({"dimension": 2, "measures": [{"type": "analytic-mother", "body": 0}]})"));
        }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          io::scene_from_json(json::parse(R"({"dimension": 2, "constants": {"units": "cgs"}})"));
        }) == ErrorCode::ParseError);
  const auto eps = io::scene_from_json(json::parse(R"({"dimension": 2, "constants": {"eps0": 2}})"));
  CHECK(eps.constants.eps0() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("configs") {
  FitConfig f;
  f.collocation = {Ring{{0.5, 0}, 2.0, 12}};
  f.holdout = {Ring{{0, 0}, 4.0, 16}};
  f.lambda_reg = 1e-9;
  f.mass_constraint = false;
  f.subdivisions = 4;
  const auto fb = io::fit_config_from_json(json::parse(io::to_json(f).dump()));
  CHECK(io::to_json(fb) == io::to_json(f));
  CHECK_FALSE(io::fit_config_from_json(json::object()).lambda_reg);
  CHECK(code_of([] { io::fit_config_from_json(json{{"lambda_reg", -1.0}}); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::fit_config_from_json(json{{"collocation", {{{"radius", 1.0}, {"count", 0}}}}}); }) ==
        ErrorCode::ParseError);

  AxiomConfig a;
  a.ring_factors = {1.1, 3.0};
  a.seed = 99;
  a.extra_points = {Vec3(5, 0, 0)};
  a.tol_match = 1e-4;
  const auto ab = io::axiom_config_from_json(json::parse(io::to_json(a).dump()));
  CHECK(io::to_json(ab) == io::to_json(a));
  CHECK(code_of([] { io::axiom_config_from_json(json{{"tol_match", 0.0}}); }) == ErrorCode::InvalidMeasure);
}

TEST_CASE("points CSV") {
  const auto pts = parse("x,y\n1,2\n\n  3.5 , -4e-3\r\n", 2);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1] == Vec3(3.5, -4e-3, 0));
  CHECK(parse("x,y,z\n", 3).empty());
  CHECK(parse("0,0,1\n", 3)[0].z() == 1.0);
  CHECK(code_of([] { parse("1,2\nx,y\n", 2); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse("1,2,3\n", 2); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse("3,4\n1,2abc\n", 2); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::read_points_csv(std::filesystem::path("/nonexistent/points.csv"), 2); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "mbody_test_io";
  std::filesystem::remove_all(dir);
  const json j{{"a", 1.0 / 3.0}};
  io::write_json_file(dir / "sub" / "x.json", j);
  CHECK(io::read_json_file(dir / "sub" / "x.json") == j);
  io::write_text_file(dir / "bad.json", "{ not json");
  CHECK(code_of([&] { io::read_json_file(dir / "bad.json"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { io::read_json_file(dir / "missing.json"); }) == ErrorCode::ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("numbers print with 17 digits and read back exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, kPi, 0.0}) {
    const auto s = io::csv_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(io::csv_number(0.1) == "0.10000000000000001");
  Table t{"t", {"a", "b"}, {{1.0, 0.5}, {2.0, -0.25}}};
  CHECK(io::table_csv(t) == "a,b\n1,0.5\n2,-0.25\n");
}
