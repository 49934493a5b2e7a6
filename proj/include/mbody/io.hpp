#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbody/geometry.hpp"
#include "mbody/measure.hpp"
#include "mbody/potential.hpp"
#include "mbody/skeleton.hpp"
#include "mbody/verify.hpp"

namespace mbody::io {

using json = nlohmann::json;

/// Everything a subcommand needs to evaluate or verify. Bodies and measures
/// all live in R^dimension.
struct Scene {
  int dimension = 2;
  std::vector<BodyMeasure> bodies;
  std::vector<Candidate> measures;
  ElectroConstants constants;
  Kernel kernel;
};

// Polygon: [[x, y], ...] (an object with "vertices" is accepted too).
json to_json(const ConvexPolygon& poly);
ConvexPolygon polygon_from_json(const json& j);

// Skeleton: {"nodes": [[x, y], ...], "edges": [[i, j], ...]}
json to_json(const SkeletonGraph& g);
SkeletonGraph skeleton_from_json(const json& j);

// Measure: {"dim": n, "atoms": [{"type": "point", "x": [...], "m": m},
//                               {"type": "segment", "p0": [...], "p1": [...], "lambda": [...]}]}
// "dim" defaults to the coordinate length of the first atom.
json to_json(const AtomicMeasure& m);
AtomicMeasure measure_from_json(const json& j);

// Body: {"type": "polygon", "vertices": [...]} | {"type": "disk", "center": [x, y], "radius": R}
//     | {"type": "sphere-shell" | "solid-ball", "radius": R}
//     | {"type": "solid-cylinder", "radius": R, "length": L}
//     | {"type": "cone-surface", "radius": R, "height": h}
// plus density weights "a" (default 0) and "b" (default 1).
json to_json(const BodyMeasure& b);
BodyMeasure body_from_json(const json& j);

// A candidate measure is an atomic measure or a body object.
json to_json(const Candidate& c);
Candidate candidate_from_json(const json& j);

// Scene: {"dimension": n, "bodies": [...], "measures": [...],
//         "constants": {"units": "natural" | "si"} | {"eps0": e} | {"kappa": k},
//         "kernel": {"c2": .., "c3": ..}}
// A measure entry {"type": "analytic-mother", "body": i} expands to the
// closed-form mother body of bodies[i].
json to_json(const Scene& s);
Scene scene_from_json(const json& j);

json to_json(const Ring& r);
json to_json(const FitConfig& c);
FitConfig fit_config_from_json(const json& j);
json to_json(const FitReport& r);

json to_json(const AxiomConfig& c);
AxiomConfig axiom_config_from_json(const json& j);
json to_json(const AxiomResult& r);
json to_json(const VerificationReport& r);

json to_json(const Packing& p);

/// Throws ParseError for unreadable files and malformed JSON.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Points CSV: one point per line, `dim` comma-separated numbers; a
/// non-numeric first line is taken as a header. Throws ParseError.
std::vector<Vec3> read_points_csv(std::istream& in, int dim);
std::vector<Vec3> read_points_csv(const std::filesystem::path& path, int dim);

/// 17 significant digits.
std::string csv_number(double v);
std::string table_csv(const Table& t);

}  // namespace mbody::io
