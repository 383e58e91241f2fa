#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sunada/defaults.hpp"

namespace sunada::micro {

using Complex = std::complex<double>;
using Point = Eigen::Vector2d;  ///< only the first N coordinates are used
using Hessian = Eigen::Matrix2d;

/// Connected piece of the critical set of the phase.
///   k = 0: a point, param(0) gives it.
///   k = 1 (N = 2): a closed curve y -> param(y), y in [0, param_length).
///   k = N: the whole box; param is unused.
struct CriticalComponent {
  int dimension = 0;
  int signature = 0;  ///< declared signature of the transverse Hessian
  std::function<Point(double)> param;
  double param_length = 0.0;
};

/// e^{i h phi} a on the periodic box prod [lo_i, hi_i), N = 1 or 2.
struct PhaseProblem {
  std::string name;
  int dim = 1;
  Point lo = Point::Zero();
  Point hi = Point::Zero();
  std::function<double(const Point&)> phase;
  std::function<Point(const Point&)> gradient;
  std::function<Hessian(const Point&)> hessian;
  std::function<double(const Point&)> amplitude;
  std::vector<CriticalComponent> critical;
  /// Closed form of the integral when one is known.
  std::function<Complex(double)> exact;
};

/// Checks that the gradient vanishes on sampled points of every declared
/// component (<= 1e-10), that the transverse Hessian is nondegenerate
/// (min |eigenvalue| >= 1e-6) and that the declared signature matches.
/// Throws PreconditionError.
void validate(const PhaseProblem& p);

struct QuadratureResult {
  Complex value;
  std::size_t grid = 0;   ///< points per axis of the accepted grid
  double doubling_change = 0.0;  ///< |I(2M) - I(M)| / |I(2M)|
};

/// Periodic trapezoidal rule with grid points per axis. grid = 0 picks the
/// smallest even grid with spacing <= (2 pi / h) / 10. The grid is doubled
/// until the change is <= tol relative (up to max_grid). Throws
/// PreconditionError for an explicit grid coarser than that spacing and
/// NumericalError when doubling does not converge.
QuadratureResult oscillatory_integral(const PhaseProblem& p, double h, std::size_t grid = 0,
                                      double tol = defaults::richardson_tol, std::size_t max_grid = 1 << 22);

/// Sum over components of
///   (2 pi / h)^{(N - k) / 2} e^{i pi sgn / 4} e^{i h phi(Z)} int_Z a |det Hess_perp|^{-1/2} dy,
/// the component integral by periodic trapezoidal quadrature with doubling.
/// Throws NumericalError for a degenerate transverse Hessian.
Complex stationary_phase_prediction(const PhaseProblem& p, double h);

struct StationaryPhaseRow {
  double h = 0.0;
  Complex integral;
  Complex prediction;
  double scaled_residual = 0.0;  ///< |I - prediction| / (2 pi / h)^{(N - k_max) / 2}
  std::optional<double> exact_residual;  ///< |I - exact| / |exact| when a closed form exists
};

struct StationaryPhaseReport {
  std::vector<StationaryPhaseRow> rows;
  std::optional<double> slope;  ///< least-squares slope of log residual vs log h
  bool at_floor = false;        ///< every residual <= floor; no slope fitted
  bool pass = false;            ///< at_floor or slope <= max_slope
};

/// Requires >= 4 increasing values of h.
StationaryPhaseReport validate_stationary_phase(const PhaseProblem& p, const std::vector<double>& h_list,
                                                double max_slope = -0.8, double floor = 1e-8);

// Builtin fixtures.
PhaseProblem cos_x_problem();                 ///< N = 1, [0, 2 pi), a = 1; exact 2 pi J0(h)
PhaseProblem cos_y_torus_problem();           ///< N = 2, T^2, phi = cos y, a = 1; exact 4 pi^2 J0(h)
PhaseProblem gaussian_fresnel_problem(double alpha = 4.0);  ///< phi = x^2 / 2, a = e^{-alpha x^2} on [-pi, pi)
PhaseProblem constant_problem(int dim = 1, double value = 0.3);  ///< a = 1 + cos(x) / 2
PhaseProblem zero_amplitude_problem();        ///< cos x with a = 0
/// Linearised defining-function phase phi(s, theta) = -sigma theta s with
/// amplitude e^{-alpha s^2 - beta theta^2} on [-w, w)^2; sigma is the nonzero
/// singular value of I - dG^tau transverse to a flat-torus component.
PhaseProblem bilinear_problem(double sigma, double alpha = 1.0, double beta = 1.0, double half_width = 6.0);
/// Names: cos_x, cos_y_torus, gaussian_fresnel, constant, constant_2d, zero_amplitude.
PhaseProblem builtin_problem(const std::string& name);

/// Named phase (cos_x, cos_y, quadratic, constant, bilinear) combined with a
/// named amplitude (one, zero, gaussian, one_plus_half_cos). Parameters:
/// alpha, beta (gaussian widths), sigma, half_width (bilinear), value
/// (constant). The closed form is attached only for the combinations that
/// have one. Throws PreconditionError for unknown names or a dimension the
/// phase does not support.
PhaseProblem make_problem(const std::string& phase, const std::string& amplitude, int dim,
                          const std::map<std::string, double>& params = {});

/// Compactly supported bump psi(theta) = C e^{1/(|theta|^2 - 1)} on |theta| < 1 in dimension N.
struct MollifierConfig {
  int dim = 1;
  double normalization = 0.0;  ///< C with int psi = 1
  double h = 1.0;
};

/// Computes C by adaptive quadrature and checks int psi = 1 within bump_mass_tol.
MollifierConfig make_mollifier(int dim, double h);
double bump(const MollifierConfig& c, double radius);

/// Discrete convolution of periodic samples (row-major, points_per_axis^dim
/// values over [0, period)^dim) with psi_h(theta) = h^N psi(h theta), the
/// weights rescaled so their discrete mass is exactly one. Requires h > 1 and
/// spacing <= 1 / (10 h); throws PreconditionError otherwise.
std::vector<double> mollify(const std::vector<double>& samples, int dim, double period, double h);

struct MollifyRow {
  double h = 0.0;
  std::size_t grid = 0;
  double sup_error = 0.0;
};

struct MollifyOrderReport {
  std::vector<MollifyRow> rows;
  std::optional<double> slope;
  bool at_floor = false;  ///< every error <= floor; nothing fitted
  bool pass = false;      ///< slope in [-2.3, -1.7]
};

/// sup |f_h - f| on [0, 2 pi) for each h (grid spacing 1 / (10 h) rounded to a
/// power of two), then the least-squares slope in log-log coordinates.
/// Requires the h list to span at least one decade.
MollifyOrderReport mollification_error_order(const std::function<double(double)>& f, const std::vector<double>& h_list,
                                             double floor = 1e-13);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sunada::micro
