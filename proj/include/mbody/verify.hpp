#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mbody/measure.hpp"
#include "mbody/potential.hpp"

namespace mbody {

struct AxiomConfig {
  // Exterior samples: rings (spheres in 3D) at these multiples of the body's
  // bounding radius, plus seeded random points with radius in random_band.
  std::vector<double> ring_factors{1.5, 2.0, 3.0};
  std::size_t ring_count = 32;
  std::size_t random_samples = 32;
  std::array<double, 2> random_band{1.2, 4.0};
  std::uint64_t seed = 1;
  // Extra exterior points; boundary points are accepted, interior ones rejected.
  std::vector<Vec3> extra_points;

  int interior_grid = 24;       // per axis
  double clearance = 1e-6;      // interior points this close to supp mu are skipped
  double tol_match = 1e-6;
  double tol_dominate = 1e-9;
  double floor = 1e-12;         // denominator floor for relative residuals

  int connectivity_grid = 200;  // per axis
  double support_thickness = 0.0;  // 0 -> one grid cell

  double quad_tol = 1e-10;

  /// Throws InvalidMeasure unless all tolerances are positive.
  void validate() const;
};

using Candidate = std::variant<AtomicMeasure, BodyMeasure>;

struct AxiomResult {
  bool pass = false;
  double worst_residual = 0.0;
  std::optional<Vec3> witness;
  std::size_t samples = 0;
  std::string note;
};

struct VerificationReport {
  std::array<AxiomResult, 5> axioms;
  bool overall = false;
};

/// Exterior samples used by check_exterior_match, in evaluation order.
std::vector<Vec3> exterior_samples(const BodyMeasure& body, const AxiomConfig& cfg);

/// max |U^mu - U^body| / max(|U^body|, floor) over the exterior samples.
/// Throws SampleInsideBody.
AxiomResult check_exterior_match(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg,
                                 const Kernel& k);
/// min (U^mu - U^body) over interior grid points clear of supp mu.
AxiomResult check_domination(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg, const Kernel& k);
/// Every atom mass and density sample is >= 0.
AxiomResult check_positivity(const Candidate& mu);
/// Every atom has dimension below the ambient one.
AxiomResult check_support_null(const Candidate& mu);
/// Grid flood fill from outside the body; every interior cell clear of supp mu
/// must be reached. 3D: point and axis supports pass, anything else throws
/// UnsupportedDimension.
AxiomResult check_connectivity(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg);

VerificationReport verify_all(const BodyMeasure& body, const Candidate& mu, const AxiomConfig& cfg, const Kernel& k);

/// Potential of a candidate at x.
PotentialSample candidate_potential(const Kernel& k, const Candidate& mu, const Vec3& x, double rel_tol);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

using Params = std::map<std::string, double>;

/// Tables for the worked examples: "shell", "cylinder", "cone", "square".
/// Unset parameters take their defaults. Throws UnknownCase.
std::vector<Table> reproduce(const std::string& name, const Params& params = {});

}  // namespace mbody
