#include "sunada/microlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sunada/errors.hpp"
#include "sunada/parallel.hpp"

namespace sunada::micro {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr Complex i_unit{0.0, 1.0};

double max_width(const PhaseProblem& p) {
  double w = 0.0;
  for (int i = 0; i < p.dim; ++i) w = std::max(w, p.hi(i) - p.lo(i));
  return w;
}

// Trapezoidal sum of g over the box with m points per axis; rows are summed
// separately and merged in order so the result does not depend on threading.
Complex box_sum(const PhaseProblem& p, std::size_t m, const std::function<Complex(const Point&)>& g) {
  const double md = static_cast<double>(m);
  const Point step((p.hi(0) - p.lo(0)) / md, p.dim == 2 ? (p.hi(1) - p.lo(1)) / md : 1.0);
  const std::size_t rows = p.dim == 2 ? m : 1;
  std::vector<Complex> partial(rows);
  parallel_for(rows, [&](std::size_t r) {
    Complex acc = 0.0;
    Point x(p.lo(0), p.dim == 2 ? p.lo(1) + static_cast<double>(r) * step(1) : 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      x(0) = p.lo(0) + static_cast<double>(i) * step(0);
      acc += g(x);
    }
    partial[r] = acc;
  });
  Complex total = 0.0;
  for (const Complex& c : partial) total += c;
  return total * step(0) * step(1);
}

double relative_change(Complex fine, Complex coarse) {
  const double diff = std::abs(fine - coarse);
  if (diff == 0.0) return 0.0;
  return diff / std::abs(fine);
}

// Periodic trapezoidal rule on [0, length) with doubling until the relative
// change is below tol.
Complex periodic_line_integral(const std::function<Complex(double)>& g, double length, double tol = 1e-12) {
  std::size_t m = 64;
  const auto sum = [&](std::size_t count) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += g(length * static_cast<double>(i) / static_cast<double>(count));
    return acc * (length / static_cast<double>(count));
  };
  Complex coarse = sum(m);
  for (; m <= (1u << 20); m *= 2) {
    const Complex fine = sum(2 * m);
    if (relative_change(fine, coarse) <= tol) return fine;
    coarse = fine;
  }
  throw NumericalError("component quadrature did not converge");
}

Point tangent(const CriticalComponent& c, double y) {
  const double e = 1e-3;
  return (8.0 * (c.param(y + e) - c.param(y - e)) - (c.param(y + 2 * e) - c.param(y - 2 * e))) / (12.0 * e);
}

struct Transverse {
  double det = 1.0;  ///< |det| of the transverse Hessian
  int signature = 0;
  double min_abs_eigen = std::numeric_limits<double>::infinity();
};

Transverse transverse_hessian(const PhaseProblem& p, const CriticalComponent& c, double y) {
  Transverse t;
  if (c.dimension == p.dim) return t;
  const Point x = c.param(y);
  const Hessian h = p.hessian(x);
  Eigen::VectorXd eig;
  if (c.dimension == 0) {
    const Eigen::MatrixXd block = h.topLeftCorner(p.dim, p.dim);
    eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues();
  } else {
    const Point tan = tangent(c, y).normalized();
    const Point normal(-tan(1), tan(0));
    eig = Eigen::VectorXd::Constant(1, normal.dot(h * normal));
  }
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    t.det *= std::abs(eig(i));
    t.signature += eig(i) > 0 ? 1 : -1;
    t.min_abs_eigen = std::min(t.min_abs_eigen, std::abs(eig(i)));
  }
  return t;
}

int max_component_dimension(const PhaseProblem& p) {
  int k = 0;
  for (const CriticalComponent& c : p.critical) k = std::max(k, c.dimension);
  return k;
}

}  // namespace

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void validate(const PhaseProblem& p) {
  if (p.dim != 1 && p.dim != 2) throw PreconditionError("phase problems live in dimension 1 or 2");
  for (int i = 0; i < p.dim; ++i)
    if (!(p.hi(i) > p.lo(i))) throw PreconditionError("empty box");
  if (!p.phase || !p.amplitude) throw PreconditionError("phase and amplitude are required");
  for (const CriticalComponent& c : p.critical) {
    if (c.dimension < 0 || c.dimension > p.dim) throw PreconditionError("critical component dimension out of range");
    if (c.dimension == p.dim) continue;
    if (!c.param || !p.gradient || !p.hessian) throw PreconditionError("critical components need derivatives");
    if (c.dimension == 1 && (p.dim != 2 || !(c.param_length > 0.0)))
      throw PreconditionError("curve components need N = 2 and a positive parameter length");
    const int samples = c.dimension == 0 ? 1 : 16;
    for (int s = 0; s < samples; ++s) {
      const double y = c.param_length * s / samples;
      const Point x = c.param(y);
      if (p.gradient(x).head(p.dim).cwiseAbs().maxCoeff() > 1e-10)
        throw PreconditionError("phase gradient does not vanish on a declared critical component");
      const Transverse t = transverse_hessian(p, c, y);
      if (t.min_abs_eigen < 1e-6) throw PreconditionError("transverse Hessian is degenerate");
      if (t.signature != c.signature) throw PreconditionError("declared signature does not match the Hessian");
    }
  }
}

QuadratureResult oscillatory_integral(const PhaseProblem& p, double h, std::size_t grid, double tol,
                                      std::size_t max_grid) {
  if (!(h > 0.0)) throw PreconditionError("h must be positive");
  const double spacing = two_pi / h / 10.0;
  const double width = max_width(p);
  if (grid == 0) {
    grid = static_cast<std::size_t>(std::ceil(width / spacing));
    grid = std::max<std::size_t>(16, grid + grid % 2);
  } else if (width / static_cast<double>(grid) > spacing * (1.0 + 1e-12)) {
    throw PreconditionError("grid under-resolves the oscillation: spacing must be <= (2 pi / h) / 10");
  }
  if (p.dim == 2) max_grid = std::min<std::size_t>(max_grid, 1 << 14);

  const auto g = [&](const Point& x) { return std::exp(i_unit * (h * p.phase(x))) * p.amplitude(x); };
  Complex coarse = box_sum(p, grid, g);
  while (2 * grid <= max_grid) {
    const Complex fine = box_sum(p, 2 * grid, g);
    const double change = relative_change(fine, coarse);
    if (change <= tol) return {fine, 2 * grid, change};
    coarse = fine;
    grid *= 2;
  }
  throw NumericalError("oscillatory quadrature did not converge under grid doubling");
}

Complex stationary_phase_prediction(const PhaseProblem& p, double h) {
  if (!(h > 0.0)) throw PreconditionError("h must be positive");
  Complex total = 0.0;
  for (const CriticalComponent& c : p.critical) {
    const double scale = std::pow(two_pi / h, 0.5 * (p.dim - c.dimension));
    if (c.dimension == p.dim) {
      // Phase constant on the whole box: the prediction is the integral itself.
      const Complex mass = box_sum(p, 256, [&](const Point& x) { return Complex(p.amplitude(x)); });
      total += std::exp(i_unit * (h * p.phase(p.lo))) * mass;
      continue;
    }
    const Transverse t0 = transverse_hessian(p, c, 0.0);
    if (t0.min_abs_eigen < 1e-6) throw NumericalError("degenerate transverse Hessian");
    const Complex prefactor =
        scale * std::exp(i_unit * (pi * t0.signature / 4.0)) * std::exp(i_unit * (h * p.phase(c.param(0.0))));
    Complex density;
    if (c.dimension == 0) {
      density = p.amplitude(c.param(0.0)) / std::sqrt(t0.det);
    } else {
      density = periodic_line_integral(
          [&](double y) {
            const Transverse t = transverse_hessian(p, c, y);
            if (t.min_abs_eigen < 1e-6) throw NumericalError("degenerate transverse Hessian");
            return Complex(p.amplitude(c.param(y)) * tangent(c, y).norm() / std::sqrt(t.det));
          },
          c.param_length);
    }
    total += prefactor * density;
  }
  return total;
}

StationaryPhaseReport validate_stationary_phase(const PhaseProblem& p, const std::vector<double>& h_list,
                                                double max_slope, double floor) {
  if (h_list.size() < 4) throw PreconditionError("stationary phase validation needs at least 4 values of h");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] > h_list[i - 1])) throw PreconditionError("h values must be increasing");
  validate(p);

  const int k = max_component_dimension(p);
  StationaryPhaseReport rep;
  rep.rows.resize(h_list.size());
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    StationaryPhaseRow& row = rep.rows[i];
    row.h = h_list[i];
    row.integral = oscillatory_integral(p, row.h).value;
    row.prediction = stationary_phase_prediction(p, row.h);
    const double scale = p.critical.empty() ? 1.0 : std::pow(two_pi / row.h, 0.5 * (p.dim - k));
    row.scaled_residual = std::abs(row.integral - row.prediction) / scale;
    if (p.exact) {
      const Complex e = p.exact(row.h);
      row.exact_residual = std::abs(row.integral - e) / std::max(std::abs(e), 1e-300);
    }
  }

  std::vector<double> hs, rs;
  for (const StationaryPhaseRow& row : rep.rows)
    if (row.scaled_residual > floor) {
      hs.push_back(row.h);
      rs.push_back(row.scaled_residual);
    }
  if (hs.size() < 2) {
    rep.at_floor = true;
    rep.pass = true;
  } else {
    rep.slope = log_log_slope(hs, rs);
    rep.pass = *rep.slope <= max_slope;
  }
  return rep;
}

PhaseProblem cos_x_problem() {
  PhaseProblem p;
  p.name = "cos_x";
  p.dim = 1;
  p.lo = Point(0.0, 0.0);
  p.hi = Point(two_pi, 0.0);
  p.phase = [](const Point& x) { return std::cos(x(0)); };
  p.gradient = [](const Point& x) { return Point(-std::sin(x(0)), 0.0); };
  p.hessian = [](const Point& x) {
    Hessian h = Hessian::Zero();
    h(0, 0) = -std::cos(x(0));
    return h;
  };
  p.amplitude = [](const Point&) { return 1.0; };
  p.critical = {{0, -1, [](double) { return Point(0.0, 0.0); }, 0.0},
                {0, 1, [](double) { return Point(pi, 0.0); }, 0.0}};
  p.exact = [](double h) { return Complex(two_pi * std::cyl_bessel_j(0.0, h)); };
  return p;
}

PhaseProblem cos_y_torus_problem() {
  PhaseProblem p;
  p.name = "cos_y_torus";
  p.dim = 2;
  p.lo = Point(0.0, 0.0);
  p.hi = Point(two_pi, two_pi);
  p.phase = [](const Point& x) { return std::cos(x(1)); };
  p.gradient = [](const Point& x) { return Point(0.0, -std::sin(x(1))); };
  p.hessian = [](const Point& x) {
    Hessian h = Hessian::Zero();
    h(1, 1) = -std::cos(x(1));
    return h;
  };
  p.amplitude = [](const Point&) { return 1.0; };
  p.critical = {{1, -1, [](double y) { return Point(y, 0.0); }, two_pi},
                {1, 1, [](double y) { return Point(y, pi); }, two_pi}};
  p.exact = [](double h) { return Complex(two_pi * two_pi * std::cyl_bessel_j(0.0, h)); };
  return p;
}

PhaseProblem gaussian_fresnel_problem(double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("Gaussian width must be positive");
  PhaseProblem p;
  p.name = "gaussian_fresnel";
  p.dim = 1;
  p.lo = Point(-pi, 0.0);
  p.hi = Point(pi, 0.0);
  p.phase = [](const Point& x) { return 0.5 * x(0) * x(0); };
  p.gradient = [](const Point& x) { return Point(x(0), 0.0); };
  p.hessian = [](const Point&) {
    Hessian h = Hessian::Zero();
    h(0, 0) = 1.0;
    return h;
  };
  p.amplitude = [alpha](const Point& x) { return std::exp(-alpha * x(0) * x(0)); };
  p.critical = {{0, 1, [](double) { return Point(0.0, 0.0); }, 0.0}};
  p.exact = [alpha](double h) { return std::sqrt(pi / Complex(alpha, -0.5 * h)); };
  return p;
}

PhaseProblem constant_problem(int dim, double value) {
  if (dim != 1 && dim != 2) throw PreconditionError("dimension must be 1 or 2");
  PhaseProblem p;
  p.name = dim == 1 ? "constant" : "constant_2d";
  p.dim = dim;
  p.lo = Point(0.0, 0.0);
  p.hi = Point(two_pi, dim == 2 ? two_pi : 0.0);
  p.phase = [value](const Point&) { return value; };
  p.gradient = [](const Point&) { return Point(0.0, 0.0); };
  p.hessian = [](const Point&) { return Hessian(Hessian::Zero()); };
  p.amplitude = [](const Point& x) { return 1.0 + 0.5 * std::cos(x(0)); };
  p.critical = {{dim, 0, {}, 0.0}};
  p.exact = [value, dim](double h) { return std::exp(i_unit * (h * value)) * std::pow(two_pi, dim); };
  return p;
}

PhaseProblem zero_amplitude_problem() {
  PhaseProblem p = cos_x_problem();
  p.name = "zero_amplitude";
  p.amplitude = [](const Point&) { return 0.0; };
  p.exact = [](double) { return Complex(0.0); };
  return p;
}

PhaseProblem bilinear_problem(double sigma, double alpha, double beta, double half_width) {
  if (!(sigma > 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(half_width > 0.0))
    throw PreconditionError("bilinear problem parameters must be positive");
  PhaseProblem p;
  p.name = "bilinear";
  p.dim = 2;
  p.lo = Point(-half_width, -half_width);
  p.hi = Point(half_width, half_width);
  p.phase = [sigma](const Point& x) { return -sigma * x(1) * x(0); };
  p.gradient = [sigma](const Point& x) { return Point(-sigma * x(1), -sigma * x(0)); };
  p.hessian = [sigma](const Point&) {
    Hessian h;
    h << 0.0, -sigma, -sigma, 0.0;
    return h;
  };
  p.amplitude = [alpha, beta](const Point& x) { return std::exp(-alpha * x(0) * x(0) - beta * x(1) * x(1)); };
  p.critical = {{0, 0, [](double) { return Point(0.0, 0.0); }, 0.0}};
  // Gaussian integral over the plane; the box truncation is below double precision.
  p.exact = [sigma, alpha, beta](double h) {
    return Complex(pi / std::sqrt(alpha * beta + 0.25 * h * h * sigma * sigma));
  };
  return p;
}

PhaseProblem builtin_problem(const std::string& name) {
  if (name == "cos_x") return cos_x_problem();
  if (name == "cos_y_torus") return cos_y_torus_problem();
  if (name == "gaussian_fresnel") return gaussian_fresnel_problem();
  if (name == "constant") return constant_problem(1);
  if (name == "constant_2d") return constant_problem(2);
  if (name == "zero_amplitude") return zero_amplitude_problem();
  throw PreconditionError("unknown phase problem '" + name + "'");
}

PhaseProblem make_problem(const std::string& phase, const std::string& amplitude, int dim,
                          const std::map<std::string, double>& params) {
  const auto param = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const auto require_dim = [&](int expected) {
    if (dim != expected)
      throw PreconditionError("phase '" + phase + "' lives in dimension " + std::to_string(expected));
  };
  const double alpha = param("alpha", phase == "bilinear" ? 1.0 : 4.0);
  const double beta = param("beta", 1.0);

  PhaseProblem p;
  if (phase == "cos_x") {
    require_dim(1);
    p = cos_x_problem();
  } else if (phase == "cos_y") {
    require_dim(2);
    p = cos_y_torus_problem();
  } else if (phase == "quadratic") {
    require_dim(1);
    p = gaussian_fresnel_problem(alpha);
  } else if (phase == "constant") {
    p = constant_problem(dim, param("value", 0.3));
  } else if (phase == "bilinear") {
    require_dim(2);
    p = bilinear_problem(param("sigma", 1.0), alpha, beta, param("half_width", 6.0));
  } else {
    throw PreconditionError("unknown phase '" + phase + "'");
  }

  // Amplitude the builtin already carries, for which its closed form holds.
  const std::string native = phase == "quadratic" || phase == "bilinear" ? "gaussian"
                             : phase == "constant"                       ? "one_plus_half_cos"
                                                                         : "one";
  if (amplitude == native) return p;
  p.name = phase + "+" + amplitude;
  if (amplitude == "zero") {
    p.amplitude = [](const Point&) { return 0.0; };
    p.exact = [](double) { return Complex(0.0); };
  } else if (amplitude == "one") {
    p.amplitude = [](const Point&) { return 1.0; };
    p.exact = {};
  } else if (amplitude == "gaussian") {
    p.amplitude = [alpha, beta, dim](const Point& x) {
      return std::exp(-alpha * x(0) * x(0) - (dim == 2 ? beta * x(1) * x(1) : 0.0));
    };
    p.exact = {};
  } else if (amplitude == "one_plus_half_cos") {
    p.amplitude = [](const Point& x) { return 1.0 + 0.5 * std::cos(x(0)); };
    p.exact = {};
  } else {
    throw PreconditionError("unknown amplitude '" + amplitude + "'");
  }
  if (phase == "constant" && amplitude == "one") {
    const double value = param("value", 0.3);
    p.exact = [value, dim](double h) { return std::exp(i_unit * (h * value)) * std::pow(two_pi, dim); };
  }
  return p;
}

}  // namespace sunada::micro
