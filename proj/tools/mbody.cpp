// mbody: command-line front end for potentials, skeletons, mother-body fits
// and the axiom verifier.
//
// Exit codes: 0 success / pass, 1 verification or fit failure, 2 input error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "mbody/error.hpp"
#include "mbody/io.hpp"

namespace fs = std::filesystem;
using namespace mbody;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

struct Common {
  std::string out = ".";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string units = "natural";
  std::vector<std::string> sets;
  std::vector<std::string> rings;
};

Params parse_sets(const std::vector<std::string>& sets) {
  Params p;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ParseError, "--set expects key=value, got " + s);
    try {
      p[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "--set value is not a number: " + s);
    }
  }
  return p;
}

// R:COUNT
std::pair<double, std::size_t> parse_ring(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    const double r = std::stod(s.substr(0, colon));
    const long n = std::stol(s.substr(colon + 1));
    if (!(r > 0.0) || n <= 0) throw std::invalid_argument(s);
    return {r, static_cast<std::size_t>(n)};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "--ring expects R:COUNT with R > 0 and COUNT > 0, got " + s);
  }
}

std::string status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::OnSupport: return "on-support";
    case ErrorCode::OnBoundary: return "on-boundary";
    case ErrorCode::SingularPoint: return "singular";
    default: return "error";
  }
}

int cmd_eval(const Common& c, const std::string& scene_path, const std::string& points_path) {
  const io::Scene scene = io::scene_from_json(io::read_json_file(scene_path));
  const std::vector<Vec3> pts = io::read_points_csv(fs::path(points_path), scene.dimension);
  const double tol = c.tol.value_or(1e-10);
  static const char* axes[] = {"x", "y", "z"};

  std::string csv = "object";
  for (int i = 0; i < scene.dimension; ++i) csv += std::string(",") + axes[i];
  csv += ",value,estimated_error,status\n";
  auto emit = [&](const std::string& name, const Vec3& x, auto&& eval) {
    csv += name;
    for (int i = 0; i < scene.dimension; ++i) csv += "," + io::csv_number(x(i));
    try {
      const PotentialSample s = eval(x);
      csv += "," + io::csv_number(s.value) + "," + io::csv_number(s.estimated_error) + ",ok\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnSupport && e.code() != ErrorCode::OnBoundary && e.code() != ErrorCode::SingularPoint) {
        throw;
      }
      csv += ",nan,nan," + status_of(e.code()) + "\n";
    }
  };
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    for (const auto& x : pts) {
      emit("body" + std::to_string(b), x,
           [&](const Vec3& p) { return potential_body_quadrature(scene.kernel, scene.bodies[b], p, tol); });
    }
  }
  for (std::size_t m = 0; m < scene.measures.size(); ++m) {
    for (const auto& x : pts) {
      emit("measure" + std::to_string(m), x,
           [&](const Vec3& p) { return candidate_potential(scene.kernel, scene.measures[m], p, tol); });
    }
  }
  io::write_text_file(fs::path(c.out) / "potentials.csv", csv);
  return kPass;
}

int cmd_skeleton(const Common& c, const std::string& polygon_path) {
  const ConvexPolygon poly = io::polygon_from_json(io::read_json_file(polygon_path));
  io::write_json_file(fs::path(c.out) / "skeleton.json", io::to_json(medial_axis(poly)));
  return kPass;
}

int cmd_fit(const Common& c, const std::string& polygon_path, const std::string& config_path) {
  const ConvexPolygon poly = io::polygon_from_json(io::read_json_file(polygon_path));
  FitConfig cfg = config_path.empty() ? FitConfig{} : io::fit_config_from_json(io::read_json_file(config_path));
  const Params p = parse_sets(c.sets);
  for (const auto& [key, value] : p) {
    if (key == "lambda_reg") {
      cfg.lambda_reg = value;
    } else if (key == "subdivisions" || key == "K") {
      cfg.subdivisions = static_cast<int>(value);
    } else if (key == "holdout_tolerance") {
      cfg.holdout_tolerance = value;
    } else if (key == "mass_constraint") {
      cfg.mass_constraint = value != 0.0;
    } else {
      throw Error(ErrorCode::ParseError, "unknown fit setting " + key);
    }
  }
  if (c.tol) cfg.quad_tol = *c.tol;
  if (!c.rings.empty()) {
    cfg.collocation.clear();
    for (const auto& s : c.rings) {
      const auto [r, n] = parse_ring(s);
      cfg.collocation.push_back(Ring{poly.centroid(), r, n});
    }
  }
  const PolygonMother fit = mother_of_polygon(poly, cfg, Kernel::dim(2));

  const fs::path out(c.out);
  io::write_json_file(out / "measure.json", io::to_json(fit.measure));
  io::json report = io::to_json(fit.report);
  report["holdout_tolerance"] = cfg.holdout_tolerance;
  report["pass"] = fit.report.holdout_rel <= cfg.holdout_tolerance;
  io::write_json_file(out / "fit_report.json", report);

  Table density{"density", {"edge", "arclength", "density"}, {}};
  const auto& nodes = fit.basis.nodes();
  for (std::size_t e = 0; e < fit.basis.skeleton().edges.size(); ++e) {
    const auto& ids = fit.basis.edge_nodes(e);
    for (std::size_t id : ids) {
      density.rows.push_back({static_cast<double>(e), (nodes[id] - nodes[ids.front()]).norm(),
                              fit.coefficients(static_cast<Eigen::Index>(id))});
    }
  }
  io::write_text_file(out / "density.csv", io::table_csv(density));

  fmt::print("residual_rel {:.3e}  holdout_rel {:.3e}  mass_error {:.3e}\n", fit.report.residual_rel,
             fit.report.holdout_rel, fit.report.mass_error);
  return fit.report.holdout_rel <= cfg.holdout_tolerance ? kPass : kFail;
}

int cmd_verify(const Common& c, const std::string& scene_path, const std::string& config_path) {
  const io::Scene scene = io::scene_from_json(io::read_json_file(scene_path));
  if (scene.bodies.empty() || scene.measures.empty()) {
    throw Error(ErrorCode::ParseError, "verify needs at least one body and one measure in the scene");
  }
  AxiomConfig cfg = config_path.empty() ? AxiomConfig{} : io::axiom_config_from_json(io::read_json_file(config_path));
  if (c.seed) cfg.seed = *c.seed;
  if (c.tol) cfg.tol_match = *c.tol;
  for (const auto& s : c.rings) {
    const auto [r, n] = parse_ring(s);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      cfg.extra_points.push_back(r * Vec3(std::cos(t), std::sin(t), 0.0));
    }
  }
  const VerificationReport rep = verify_all(scene.bodies.front(), scene.measures.front(), cfg, scene.kernel);
  io::write_json_file(fs::path(c.out) / "report.json", io::to_json(rep));
  for (std::size_t i = 0; i < rep.axioms.size(); ++i) {
    fmt::print("axiom{} {} worst_residual {:.3e}\n", i + 1, rep.axioms[i].pass ? "pass" : "FAIL",
               rep.axioms[i].worst_residual);
  }
  fmt::print("overall {}\n", rep.overall ? "pass" : "FAIL");
  return rep.overall ? kPass : kFail;
}

int cmd_reproduce(const Common& c, const std::string& name) {
  Params p = parse_sets(c.sets);
  if (c.units == "si" && !p.count("eps0")) p["eps0"] = ElectroConstants::si().eps0();
  const std::vector<Table> tables = reproduce(name, p);
  for (const auto& t : tables) {
    const std::string csv = io::table_csv(t);
    io::write_text_file(fs::path(c.out) / (t.name + ".csv"), csv);
    fmt::print("# {}\n{}", t.name, csv);
  }
  return kPass;
}

int cmd_pack(const Common& c, const std::string& polygon_path, int depth) {
  const ConvexPolygon poly = io::polygon_from_json(io::read_json_file(polygon_path));
  if (depth < 1) throw Error(ErrorCode::ParseError, "--depth must be >= 1");
  const Kernel k = Kernel::dim(2);
  const BodyMeasure body{poly, 0.0, 1.0};
  const Ring ring{poly.centroid(), 2.0 * poly.circumradius(), 16};
  std::vector<double> ub;
  for (const auto& x : ring.points()) ub.push_back(potential_body_quadrature(k, body, lift(x), 1e-10).value);

  Table t{"pack", {"depth", "atoms", "residual_area", "relative_residual_area", "potential_rel_error"}, {}};
  Packing last;
  for (int d = 1; d <= depth; ++d) {
    Packing pk = ball_packing(poly, d);
    double worst = 0.0;
    const auto pts = ring.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double um = potential_atomic(k, pk.measure, lift(pts[i])).value;
      worst = std::max(worst, std::abs(um - ub[i]) / std::max(std::abs(ub[i]), 1e-12));
    }
    t.rows.push_back({static_cast<double>(d), static_cast<double>(pk.radii.size()), pk.residual_area,
                      pk.residual_area / poly.area(), worst});
    last = std::move(pk);
  }
  io::write_text_file(fs::path(c.out) / "pack.csv", io::table_csv(t));
  io::write_json_file(fs::path(c.out) / "packing.json", io::to_json(last));
  fmt::print("{}", io::table_csv(t));
  return kPass;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvergent:
    case ErrorCode::NumericCollapse:
    case ErrorCode::RankDeficient:
    case ErrorCode::NoConvergence: return kFail;
    default: return kInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mother bodies of convex polygons and symmetric 3D bodies"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--tol", c.tol, "quadrature / match tolerance");
    sub->add_option("--seed", c.seed, "random seed for exterior samples");
    sub->add_option("--units", c.units, "natural or si")->check(CLI::IsMember({"natural", "si"}));
    sub->add_option("--set", c.sets, "parameter override key=value (repeatable)");
    sub->add_option("--ring", c.rings, "ring R:COUNT about the centroid (repeatable)");
  };

  std::string scene, points, polygon, config, name;
  int depth = 8;

  auto* eval = app.add_subcommand("eval", "potentials of every scene object at every point");
  common(eval);
  eval->add_option("--scene", scene)->required();
  eval->add_option("--points", points)->required();

  auto* skel = app.add_subcommand("skeleton", "medial axis of a convex polygon");
  common(skel);
  skel->add_option("--polygon,polygon", polygon)->required();

  auto* fit = app.add_subcommand("fit", "nonnegative skeleton density fit");
  common(fit);
  fit->add_option("--polygon,polygon", polygon)->required();
  fit->add_option("--config", config);

  auto* verify = app.add_subcommand("verify", "check the five mother-body axioms");
  common(verify);
  verify->add_option("--scene", scene)->required();
  verify->add_option("--config", config);

  auto* repro = app.add_subcommand("reproduce", "tables for shell | cylinder | cone | square");
  common(repro);
  repro->add_option("case", name)->required();

  auto* pack = app.add_subcommand("pack", "quadtree ball packing of a polygon");
  common(pack);
  pack->add_option("--polygon,polygon", polygon)->required();
  pack->add_option("--depth", depth)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*eval) return cmd_eval(c, scene, points);
    if (*skel) return cmd_skeleton(c, polygon);
    if (*fit) return cmd_fit(c, polygon, config);
    if (*verify) return cmd_verify(c, scene, config);
    if (*repro) return cmd_reproduce(c, name);
    if (*pack) return cmd_pack(c, polygon, depth);
  } catch (const Error& e) {
    std::cerr << "mbody: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "mbody: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
