#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mbody/geometry.hpp"
#include "mbody/measure.hpp"
#include "mbody/nnls.hpp"
#include "mbody/potential.hpp"

namespace mbody {

/// Closed-form mother bodies of the symmetric bodies:
///   sphere shell / ball -> point mass at the center
///   solid cylinder      -> axis segment with uniform density
///   cone surface        -> axis segment with density 2 pi R_i sigma (zero at the apex)
///   disk                -> point mass at the center
/// Throws UnsupportedBody for polygons and for solid cones.
AtomicMeasure analytic_mother(const BodyMeasure& body);

/// Hat-function basis on a skeleton whose edges are split into K pieces.
/// Skeleton nodes keep their indices; interior mesh nodes follow.
class DensityBasis {
 public:
  struct Piece {
    std::size_t a;  // mesh node at the start
    std::size_t b;  // mesh node at the end
    std::size_t edge;
  };

  DensityBasis(SkeletonGraph skeleton, int subdivisions);

  const SkeletonGraph& skeleton() const { return skeleton_; }
  int subdivisions() const { return subdivisions_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  /// Mesh nodes along skeleton edge e, from its first to its second endpoint.
  const std::vector<std::size_t>& edge_nodes(std::size_t e) const { return edge_nodes_[e]; }

  /// Total mass of each unit hat.
  Eigen::VectorXd hat_masses() const;
  /// Unit hat j as a measure of segment atoms.
  AtomicMeasure hat(std::size_t j) const;
  /// One piecewise-linear segment atom per skeleton edge.
  AtomicMeasure to_measure(const Eigen::VectorXd& coefficients) const;

 private:
  SkeletonGraph skeleton_;
  int subdivisions_;
  std::vector<Vec2> nodes_;
  std::vector<Piece> pieces_;
  std::vector<std::vector<std::size_t>> edge_nodes_;
};

struct Ring {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  std::size_t count = 8;

  std::vector<Vec2> points() const;
};

struct FitConfig {
  std::vector<Ring> collocation;
  std::vector<Ring> holdout;
  std::optional<double> lambda_reg;  // unset -> 1e-10 trace(A^T A) / cols
  bool mass_constraint = true;
  int subdivisions = 16;
  double quad_tol = 1e-11;           // relative tolerance for potentials
  double holdout_tolerance = 1e-3;   // relative holdout residual accepted by `fit`

  /// Rings at 1.5x and 2.5x circumradius about the centroid with 8x basis-size
  /// points in total; holdout ring at 3.5x. Counts are multiples of 4.
  static FitConfig defaults(const ConvexPolygon& poly, std::size_t basis_size, int subdivisions = 16);
};

struct FitReport {
  double residual_rms = 0.0;
  double residual_rel = 0.0;   // residual_rms / rms(y)
  double holdout_rms = 0.0;
  double holdout_rel = 0.0;    // holdout_rms / rms(y_holdout)
  double mass_error = 0.0;     // fitted mass - target (0 without a target)
  double min_coefficient = 0.0;
  double lambda_reg = 0.0;
  int iterations = 0;
};

struct CollocationSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  std::vector<Vec2> points;
};

/// A(i, j): potential at collocation point i of hat j; y(i): potential of the
/// unit-density polygon. Throws CollocationInsideBody.
CollocationSystem assemble_system(const ConvexPolygon& poly, const DensityBasis& basis,
                                  const std::vector<Ring>& rings, const Kernel& k, double quad_tol = 1e-11);

struct DensityFit {
  Eigen::VectorXd coefficients;
  FitReport report;
};

struct MassTarget {
  Eigen::VectorXd hat_masses;
  double mass = 0.0;
};

/// Nonnegative Tikhonov least squares; mass target enforced exactly when
/// given and cfg.mass_constraint is on. Holdout residuals are reported when a
/// holdout system is passed.
DensityFit fit_density(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const FitConfig& cfg,
                       const std::optional<MassTarget>& mass = std::nullopt,
                       const CollocationSystem* holdout = nullptr);

struct PolygonMother {
  DensityBasis basis;
  Eigen::VectorXd coefficients;
  AtomicMeasure measure;
  FitReport report;
};

/// medial_axis -> hat basis -> collocation -> nonnegative fit. Empty rings in
/// cfg are replaced by the defaults.
PolygonMother mother_of_polygon(const ConvexPolygon& poly, const FitConfig& cfg, const Kernel& k);

}  // namespace mbody
