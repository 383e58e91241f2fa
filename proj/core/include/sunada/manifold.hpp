#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace sunada::geo {

// Small fixed-capacity types: n <= 3 base dimensions, 2n <= 6 phase coordinates,
// 2n - 1 <= 5 frame directions.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using PhaseVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using FrameVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 5, 1>;
using FrameMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 5>;
using CoordToFrame = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 6>;
using FrameToCoord = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 5>;

/// R^n / B Z^n with the Euclidean metric; columns of B span the lattice.
/// Coordinates live on the universal cover and are never wrapped.
struct FlatTorus {
  Mat lattice;
};

/// Round sphere of radius r in two spherical charts,
///   chart 0: r (sin t cos p, sin t sin p, cos t)
///   chart 1: r (cos t, sin t cos p, sin t sin p)
/// related by a cyclic permutation of the ambient axes, so both carry the
/// outward orientation. Integration moves to the other chart when sin t < 0.35.
struct RoundSphere {
  double radius = 1.0;
};

/// Meridian profile u -> f(u) > 0 with u the meridian arc length.
struct Profile {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  std::optional<double> period;  ///< u is periodic when set
  double u_min = 0.0;            ///< chart domain when not periodic
  double u_max = 0.0;
};

/// Torus of revolution with tube radius r around a circle of radius R:
/// f(u) = R + r cos(u / r), period 2 pi r.
Profile torus_profile(double big_r, double small_r);
/// Catenoid neck c: f(u) = sqrt(c^2 + u^2) on [-half_width, half_width].
Profile catenoid_profile(double c, double half_width);

/// Metric du^2 + f(u)^2 dtheta^2 in coordinates (u, theta).
struct SurfaceOfRevolution {
  Profile profile;
};

using Manifold = std::variant<FlatTorus, RoundSphere, SurfaceOfRevolution>;

/// Checks radius/lattice/profile parameters and that the metric is positive
/// definite (and the profile positive) on a sample of chart points.
/// Throws PreconditionError.
void validate(const Manifold& m);

std::size_t dimension(const Manifold& m);
std::string kind_name(const Manifold& m);

/// Unit cotangent vector at base point x in the given chart.
struct PhasePoint {
  Vec x;
  Vec xi;
  int chart = 0;
};

/// Inverse metric and its first two coordinate derivatives at one point.
struct MetricJet {
  Mat g;
  Mat ginv;
  std::array<Mat, 3> dginv;                  ///< dginv[c] = d_c g^{..}
  std::array<std::array<Mat, 3>, 3> d2ginv;  ///< d2ginv[c][d] = d_c d_d g^{..}
  /// S_ab = Gamma^c_ab xi_c, the connection contracted with a covector.
  Mat gamma_xi(const Vec& xi) const;
};

/// Throws NumericalError outside the chart domain.
MetricJet metric_jet(const Manifold& m, const Vec& x, int chart);

/// g^{ab} xi_a xi_b.
double energy(const Manifold& m, const PhasePoint& p);
/// Scales xi so the energy is exactly one.
void normalize(const Manifold& m, PhasePoint& p);

/// Canonical coordinate ranges (angles in [0, 2 pi), periodic u in [0, period)),
/// chart change on the sphere when the current chart degenerates, and a
/// domain check for non-periodic profiles.
void canonicalize(const Manifold& m, PhasePoint& p);

/// Re-expresses p in another chart (identity for single-chart manifolds).
PhasePoint to_chart(const Manifold& m, const PhasePoint& p, int chart);

/// (b - a) in a's chart: lattice reduction on tori, angle wrapping elsewhere.
PhaseVec displacement(const Manifold& m, const PhasePoint& a, const PhasePoint& b);
/// Max-norm of displacement(a, b).
double phase_distance(const Manifold& m, const PhasePoint& a, const PhasePoint& b);

/// Builds a unit covector from a tangent direction v at x (v need not be unit).
PhasePoint from_velocity(const Manifold& m, const Vec& x, const Vec& v, int chart = 0);

/// Sasaki-orthonormal frame of T(S*M) at p, columns in coordinates (dx, dxi):
/// the flow generator X, horizontal lifts h(e_i), vertical lifts v(e_i), where
/// u = g^-1 xi and e_1..e_{n-1} complete u to an orthonormal basis. For n = 2,
/// e = (-xi_2, xi_1) / sqrt(det g), which is chart independent.
FrameToCoord frame(const Manifold& m, const PhasePoint& p);
/// Left inverse of frame() on T(S*M): (dx, dxi) -> (g(w,u), g(w,e_i), nu.e_i)
/// with w = dx and nu_a = dxi_a - Gamma^c_ab xi_c dx^b.
CoordToFrame coords_to_frame(const Manifold& m, const PhasePoint& p);
/// Orthonormal tangent basis e_1..e_{n-1} of u-perp as matrix columns.
Mat normal_basis(const Manifold& m, const PhasePoint& p);

/// Applies a frame-coordinate displacement to p and renormalizes.
PhasePoint shift(const Manifold& m, const PhasePoint& p, const FrameVec& step);

/// Point in the ambient space for the sphere and surfaces of revolution
/// (the latter embedded as (f cos t, f sin t, u)); the covering-space
/// coordinates for tori.
Eigen::Vector3d embed(const Manifold& m, const Vec& x, int chart);

/// Quantities conserved by the geodesic flow: xi on tori, the ambient angular
/// momentum x cross v on spheres, the Clairaut constant xi_theta on surfaces
/// of revolution. Points on one orbit share them.
Eigen::VectorXd first_integrals(const Manifold& m, const PhasePoint& p);

/// Lattice covolume, sphere area, or surface area of revolution.
double base_volume(const Manifold& m);

/// Lattice vectors of the torus with 0 < |v| <= l_max.
std::vector<Vec> lattice_vectors(const Mat& lattice, double l_max);

}  // namespace sunada::geo
