#pragma once

#include <vector>

#include "mbody/geometry.hpp"
#include "mbody/measure.hpp"
#include "mbody/types.hpp"

namespace mbody {

/// Fundamental solution of -Laplace in R^n:
///   n = 1: -|x| / 2
///   n = 2: -c2 log|x|,  c2 = 1 / (2 pi)
///   n = 3:  c3 / |x|,   c3 = 1 / (4 pi)
struct Kernel {
  int n = 2;
  double c2 = 0.15915494309189535;
  double c3 = 0.07957747154594767;

  static Kernel dim(int n);
  /// Kernel as a function of |x|; no singularity check.
  double of_distance(double r) const;
  /// Radial antiderivative F(R) = integral_0^R E(r) r dr (planar kernel only).
  double radial_moment_2d(double r) const;
};

/// Throws SingularPoint at x = 0.
double kernel_eval(const Kernel& k, const Vec3& x);

/// Coulomb constant kappa = 1 / (4 pi eps0).
struct ElectroConstants {
  double kappa = 1.0;

  static ElectroConstants natural() { return {1.0}; }
  static ElectroConstants si();
  static ElectroConstants from_eps0(double eps0);
  double eps0() const;
};

struct PotentialSample {
  Vec3 x = Vec3::Zero();
  double value = 0.0;
  double estimated_error = 0.0;
};

/// Newtonian potential of a finite atomic measure. Segment atoms are integrated
/// piece by piece with adaptive Gauss-Legendre. Throws OnSupport when x lies on
/// an atom, except at a segment endpoint where the density sample is zero.
PotentialSample potential_atomic(const Kernel& k, const AtomicMeasure& m, const Vec3& x, double rel_tol = 1e-10);

/// Newtonian potential of a body measure by quadrature.
///   polygon, exterior x: centroid-fan triangles, tensor Gauss rule, 4-way refinement
///   polygon, interior x: polar fan around x (kernel singularity integrated analytically in r)
///   disk: polar coordinates about the center (exterior) or about x (interior)
///   3D bodies: ring decomposition about the symmetry axis
/// Throws OnBoundary, NonConvergent, UnsupportedDimension.
PotentialSample potential_body_quadrature(const Kernel& k, const BodyMeasure& m, const Vec3& x,
                                          double rel_tol = 1e-8);

namespace routes {

/// Volume potential of a unit-density polygon by the centroid-fan tensor rule.
PotentialSample polygon_fan(const Kernel& k, const ConvexPolygon& poly, const Vec2& x, double rel_tol);
/// Volume potential of a unit-density polygon by the polar fan around x. Valid
/// for any x off the boundary.
PotentialSample polygon_polar(const Kernel& k, const ConvexPolygon& poly, const Vec2& x, double rel_tol);
/// Potential of a unit-charge ring of radius a at height z0 (axis z), seen from
/// cylindrical coordinates (rho, z).
double ring(const Kernel& k, double a, double z0, double rho, double z);

}  // namespace routes

/// Potential outside a uniformly charged spherical shell: kappa q / r with
/// q = 4 pi R^2 sigma. Throws InsideShell for r <= R.
double shell_potential_closed(double R, double sigma, double r, const ElectroConstants& c);

/// Infinite-cylinder potential from Gauss's law, zero at ref_a:
/// -(R^2 rho / (2 eps0)) ln(r / ref_a). Throws InvalidRadius unless r > R and ref_a > R.
double cylinder_potential_closed(double R, double rho, double r, double ref_a, double eps0);

/// Line-charge potential -(lambda / (2 pi eps0)) ln(r / ref_a). Throws InvalidRadius.
double line_potential_closed(double lambda, double r, double ref_a, double eps0);

/// Potential at the apex of a uniformly charged conical surface: sigma R / (2 eps0).
double cone_apex_potential_closed(double R, double h, double sigma, double eps0);
/// Same value written through the total charge q = pi R sqrt(R^2 + h^2) sigma.
double cone_apex_potential_from_charge(double q, double R, double h, double eps0);

/// Potential at the apex of the axis segment carrying q_i = 2 pi R_i sigma,
/// R_i / h_i = R / h: (1 / (4 pi eps0)) integral_0^h q_i / h_i dh_i.
double cone_axis_mother_potential(double R, double h, double sigma, double eps0);

}  // namespace mbody
