#include "sunada/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sunada/errors.hpp"

namespace sunada::geo {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double chart_switch_sin = 0.35;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap_positive(double a, double period) {
  double r = std::fmod(a, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

double wrap_centered(double a, double period) {
  return a - period * std::round(a / period);
}

Mat zeros(Eigen::Index n) { return Mat::Zero(n, n); }

MetricJet flat_jet(Eigen::Index n) {
  MetricJet j;
  j.g = Mat::Identity(n, n);
  j.ginv = Mat::Identity(n, n);
  for (int c = 0; c < 3; ++c) {
    j.dginv[c] = zeros(n);
    for (int d = 0; d < 3; ++d) j.d2ginv[c][d] = zeros(n);
  }
  return j;
}

// g = diag(a^2, w(x0)^2), everything depending on x0 only.
MetricJet warped_jet(double a, double w, double dw, double d2w) {
  MetricJet j = flat_jet(2);
  j.g(0, 0) = a * a;
  j.g(1, 1) = w * w;
  j.ginv(0, 0) = 1.0 / (a * a);
  j.ginv(1, 1) = 1.0 / (w * w);
  const double w3 = w * w * w;
  j.dginv[0](1, 1) = -2.0 * dw / w3;
  j.d2ginv[0][0](1, 1) = -2.0 * d2w / w3 + 6.0 * dw * dw / (w3 * w);
  return j;
}

Eigen::Vector3d sphere_chart0(double r, double t, double p) {
  return {r * std::sin(t) * std::cos(p), r * std::sin(t) * std::sin(p), r * std::cos(t)};
}

// Columns d/dt, d/dp of the chart map.
Eigen::Matrix<double, 3, 2> sphere_jacobian0(double r, double t, double p) {
  Eigen::Matrix<double, 3, 2> j;
  j << r * std::cos(t) * std::cos(p), -r * std::sin(t) * std::sin(p),  //
      r * std::cos(t) * std::sin(p), r * std::sin(t) * std::cos(p),    //
      -r * std::sin(t), 0.0;
  return j;
}

// Chart 1 is chart 0 followed by (a, b, c) -> (c, a, b).
Eigen::Matrix3d cyclic() {
  Eigen::Matrix3d p;
  p << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  return p;
}

Eigen::Vector3d sphere_point(double r, const Vec& x, int chart) {
  Eigen::Vector3d q = sphere_chart0(r, x(0), x(1));
  return chart == 0 ? q : Eigen::Vector3d(cyclic() * q);
}

Eigen::Matrix<double, 3, 2> sphere_jacobian(double r, const Vec& x, int chart) {
  Eigen::Matrix<double, 3, 2> j = sphere_jacobian0(r, x(0), x(1));
  return chart == 0 ? j : Eigen::Matrix<double, 3, 2>(cyclic() * j);
}

Vec sphere_coords(double r, const Eigen::Vector3d& point, int chart) {
  const Eigen::Vector3d q = chart == 0 ? point : Eigen::Vector3d(cyclic().transpose() * point);
  Vec x(2);
  x(0) = std::acos(std::clamp(q(2) / r, -1.0, 1.0));
  x(1) = wrap_positive(std::atan2(q(1), q(0)), two_pi);
  return x;
}

void check_profile_domain(const Profile& prof, double u) {
  if (!prof.period && (u < prof.u_min || u > prof.u_max))
    throw NumericalError("trajectory left the profile domain of " + prof.name);
}

}  // namespace

Mat MetricJet::gamma_xi(const Vec& xi) const {
  const Eigen::Index n = g.rows();
  const Vec u = ginv * xi;
  // d_c g_ab = -(g d_c g^-1 g)_ab
  std::array<Mat, 3> dg;
  for (Eigen::Index c = 0; c < n; ++c) dg[c] = -g * dginv[c] * g;
  Mat s = zeros(n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      double acc = 0.0;
      for (Eigen::Index d = 0; d < n; ++d) acc += u(d) * (dg[a](d, b) + dg[b](d, a) - dg[d](a, b));
      s(a, b) = 0.5 * acc;
    }
  return s;
}

Profile torus_profile(double big_r, double small_r) {
  if (!(small_r > 0.0) || !(big_r > small_r))
    throw PreconditionError("torus profile needs R > r > 0");
  Profile p;
  p.name = "torus";
  p.f = [=](double u) { return big_r + small_r * std::cos(u / small_r); };
  p.df = [=](double u) { return -std::sin(u / small_r); };
  p.d2f = [=](double u) { return -std::cos(u / small_r) / small_r; };
  p.period = two_pi * small_r;
  return p;
}

Profile catenoid_profile(double c, double half_width) {
  if (!(c > 0.0) || !(half_width > 0.0)) throw PreconditionError("catenoid needs c > 0 and a positive width");
  Profile p;
  p.name = "catenoid";
  p.f = [=](double u) { return std::hypot(c, u); };
  p.df = [=](double u) { return u / std::hypot(c, u); };
  p.d2f = [=](double u) {
    const double f = std::hypot(c, u);
    return c * c / (f * f * f);
  };
  p.u_min = -half_width;
  p.u_max = half_width;
  return p;
}

void validate(const Manifold& m) {
  std::visit(overloaded{
                 [](const FlatTorus& t) {
                   const auto n = t.lattice.rows();
                   if ((n != 2 && n != 3) || t.lattice.cols() != n)
                     throw PreconditionError("flat torus lattice must be 2x2 or 3x3");
                   if (!std::isfinite(t.lattice.sum()) || std::abs(t.lattice.determinant()) < 1e-12)
                     throw PreconditionError("flat torus lattice is singular");
                 },
                 [](const RoundSphere& s) {
                   if (!(s.radius > 0.0) || !std::isfinite(s.radius))
                     throw PreconditionError("sphere radius must be positive");
                 },
                 [](const SurfaceOfRevolution& s) {
                   const Profile& p = s.profile;
                   if (!p.f || !p.df || !p.d2f) throw PreconditionError("profile callbacks missing");
                   double lo = p.u_min, hi = p.u_max;
                   if (p.period) {
                     if (!(*p.period > 0.0)) throw PreconditionError("profile period must be positive");
                     lo = 0.0;
                     hi = *p.period;
                   } else if (!(hi > lo)) {
                     throw PreconditionError("profile domain is empty");
                   }
                   for (int i = 0; i <= 256; ++i) {
                     const double u = lo + (hi - lo) * i / 256.0;
                     if (!(p.f(u) > 0.0)) throw PreconditionError("profile must be strictly positive");
                   }
                 },
             },
             m);
}

std::size_t dimension(const Manifold& m) {
  if (const auto* t = std::get_if<FlatTorus>(&m)) return static_cast<std::size_t>(t->lattice.rows());
  return 2;
}

std::string kind_name(const Manifold& m) {
  return std::visit(overloaded{[](const FlatTorus&) { return std::string("flat_torus"); },
                               [](const RoundSphere&) { return std::string("round_sphere"); },
                               [](const SurfaceOfRevolution&) { return std::string("surface_of_revolution"); }},
                    m);
}

MetricJet metric_jet(const Manifold& m, const Vec& x, int chart) {
  (void)chart;  // both sphere charts share the coordinate expression of the metric
  return std::visit(
      overloaded{
          [&](const FlatTorus& t) { return flat_jet(t.lattice.rows()); },
          [&](const RoundSphere& s) {
            const double r = s.radius;
            const double sn = std::sin(x(0));
            if (std::abs(sn) < 1e-9) throw NumericalError("sphere chart evaluated at its pole");
            return warped_jet(r, r * sn, r * std::cos(x(0)), -r * sn);
          },
          [&](const SurfaceOfRevolution& s) {
            const Profile& p = s.profile;
            check_profile_domain(p, x(0));
            const double f = p.f(x(0));
            if (!(f > 0.0)) throw NumericalError("profile is not positive at the current point");
            return warped_jet(1.0, f, p.df(x(0)), p.d2f(x(0)));
          },
      },
      m);
}

double energy(const Manifold& m, const PhasePoint& p) {
  const MetricJet j = metric_jet(m, p.x, p.chart);
  return p.xi.dot(j.ginv * p.xi);
}

void normalize(const Manifold& m, PhasePoint& p) {
  const double e = energy(m, p);
  if (!(e > 0.0)) throw NumericalError("zero covector cannot be normalized");
  p.xi /= std::sqrt(e);
}

PhasePoint to_chart(const Manifold& m, const PhasePoint& p, int chart) {
  const auto* s = std::get_if<RoundSphere>(&m);
  if (s == nullptr || chart == p.chart) return p;
  const double r = s->radius;
  const MetricJet j_old = metric_jet(m, p.x, p.chart);
  const Eigen::Vector3d point = sphere_point(r, p.x, p.chart);
  const Eigen::Vector3d velocity = sphere_jacobian(r, p.x, p.chart) * (j_old.ginv * p.xi);

  PhasePoint q;
  q.chart = chart;
  q.x = sphere_coords(r, point, chart);
  const Eigen::Matrix<double, 3, 2> jac = sphere_jacobian(r, q.x, chart);
  const Eigen::Vector2d xdot = (jac.transpose() * jac).ldlt().solve(jac.transpose() * velocity);
  const MetricJet j_new = metric_jet(m, q.x, chart);
  q.xi = j_new.g * Vec(xdot);
  return q;
}

void canonicalize(const Manifold& m, PhasePoint& p) {
  std::visit(overloaded{
                 [](const FlatTorus&) {},
                 [&](const RoundSphere&) {
                   if (std::abs(std::sin(p.x(0))) < chart_switch_sin) p = to_chart(m, p, 1 - p.chart);
                   p.x(1) = wrap_positive(p.x(1), two_pi);
                 },
                 [&](const SurfaceOfRevolution& s) {
                   p.x(1) = wrap_positive(p.x(1), two_pi);
                   if (s.profile.period)
                     p.x(0) = wrap_positive(p.x(0), *s.profile.period);
                   else
                     check_profile_domain(s.profile, p.x(0));
                 },
             },
             m);
}

PhaseVec displacement(const Manifold& m, const PhasePoint& a, const PhasePoint& b) {
  const PhasePoint bb = to_chart(m, b, a.chart);
  const auto n = a.x.size();
  Vec dx = bb.x - a.x;
  std::visit(overloaded{
                 [&](const FlatTorus& t) {
                   const Vec k = t.lattice.partialPivLu().solve(dx);
                   dx -= t.lattice * Vec(k.array().round().matrix());
                 },
                 [&](const RoundSphere&) { dx(1) = wrap_centered(dx(1), two_pi); },
                 [&](const SurfaceOfRevolution& s) {
                   dx(1) = wrap_centered(dx(1), two_pi);
                   if (s.profile.period) dx(0) = wrap_centered(dx(0), *s.profile.period);
                 },
             },
             m);
  PhaseVec d(2 * n);
  d.head(n) = dx;
  d.tail(n) = bb.xi - a.xi;
  return d;
}

double phase_distance(const Manifold& m, const PhasePoint& a, const PhasePoint& b) {
  return displacement(m, a, b).cwiseAbs().maxCoeff();
}

PhasePoint from_velocity(const Manifold& m, const Vec& x, const Vec& v, int chart) {
  PhasePoint p{x, Vec::Zero(x.size()), chart};
  p.xi = metric_jet(m, x, chart).g * v;
  normalize(m, p);
  canonicalize(m, p);
  return p;
}

Mat normal_basis(const Manifold& m, const PhasePoint& p) {
  const MetricJet j = metric_jet(m, p.x, p.chart);
  const auto n = p.x.size();
  const Vec u = j.ginv * p.xi;
  if (n == 2) {
    Mat e(2, 1);
    const double s = std::sqrt(j.g.determinant());
    e(0, 0) = -p.xi(1) / s;
    e(1, 0) = p.xi(0) / s;
    return e;
  }
  // Gram-Schmidt in the metric, starting from the coordinate axes least aligned with u.
  std::vector<Eigen::Index> axes(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) axes[static_cast<std::size_t>(i)] = i;
  std::stable_sort(axes.begin(), axes.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(p.xi(a)) < std::abs(p.xi(b)); });
  Mat e(n, n - 1);
  std::vector<Vec> basis{u};
  for (Eigen::Index c = 0; c < n - 1; ++c) {
    Vec v = Vec::Zero(n);
    v(axes[static_cast<std::size_t>(c)]) = 1.0;
    for (const Vec& b : basis) v -= b * (b.dot(j.g * v));
    v /= std::sqrt(v.dot(j.g * v));
    basis.push_back(v);
    e.col(c) = v;
  }
  return e;
}

FrameToCoord frame(const Manifold& m, const PhasePoint& p) {
  const MetricJet j = metric_jet(m, p.x, p.chart);
  const auto n = p.x.size();
  const Mat s = j.gamma_xi(p.xi);
  const Vec u = j.ginv * p.xi;
  const Mat e = normal_basis(m, p);
  FrameToCoord f = FrameToCoord::Zero(2 * n, 2 * n - 1);
  f.col(0).head(n) = u;
  f.col(0).tail(n) = s * u;
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    f.col(1 + i).head(n) = e.col(i);
    f.col(1 + i).tail(n) = s * e.col(i);
    f.col(n + i).tail(n) = j.g * e.col(i);
  }
  return f;
}

CoordToFrame coords_to_frame(const Manifold& m, const PhasePoint& p) {
  const MetricJet j = metric_jet(m, p.x, p.chart);
  const auto n = p.x.size();
  const Mat s = j.gamma_xi(p.xi);
  const Mat e = normal_basis(m, p);
  CoordToFrame c = CoordToFrame::Zero(2 * n - 1, 2 * n);
  c.row(0).head(n) = p.xi.transpose();
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    c.row(1 + i).head(n) = (j.g * e.col(i)).transpose();
    c.row(n + i).head(n) = -(s * e.col(i)).transpose();
    c.row(n + i).tail(n) = e.col(i).transpose();
  }
  return c;
}

PhasePoint shift(const Manifold& m, const PhasePoint& p, const FrameVec& step) {
  const auto n = p.x.size();
  const PhaseVec d = frame(m, p) * step;
  PhasePoint q = p;
  q.x += d.head(n);
  q.xi += d.tail(n);
  normalize(m, q);
  canonicalize(m, q);
  return q;
}

Eigen::Vector3d embed(const Manifold& m, const Vec& x, int chart) {
  return std::visit(overloaded{
                        [&](const FlatTorus&) {
                          Eigen::Vector3d v = Eigen::Vector3d::Zero();
                          v.head(x.size()) = x;
                          return v;
                        },
                        [&](const RoundSphere& s) { return sphere_point(s.radius, x, chart); },
                        [&](const SurfaceOfRevolution& s) {
                          const double f = s.profile.f(x(0));
                          return Eigen::Vector3d(f * std::cos(x(1)), f * std::sin(x(1)), x(0));
                        },
                    },
                    m);
}

Eigen::VectorXd first_integrals(const Manifold& m, const PhasePoint& p) {
  return std::visit(overloaded{
                        [&](const FlatTorus&) { return Eigen::VectorXd(p.xi); },
                        [&](const RoundSphere& s) {
                          const Eigen::Vector3d x = sphere_point(s.radius, p.x, p.chart);
                          const MetricJet j = metric_jet(m, p.x, p.chart);
                          const Eigen::Vector3d v = sphere_jacobian(s.radius, p.x, p.chart) * (j.ginv * p.xi);
                          return Eigen::VectorXd(x.cross(v));
                        },
                        [&](const SurfaceOfRevolution&) {
                          Eigen::VectorXd c(1);
                          c(0) = p.xi(1);
                          return c;
                        },
                    },
                    m);
}

double base_volume(const Manifold& m) {
  return std::visit(overloaded{
                        [](const FlatTorus& t) { return std::abs(t.lattice.determinant()); },
                        [](const RoundSphere& s) { return 4.0 * std::numbers::pi * s.radius * s.radius; },
                        [](const SurfaceOfRevolution& s) {
                          const Profile& p = s.profile;
                          const double lo = p.period ? 0.0 : p.u_min;
                          const double hi = p.period ? *p.period : p.u_max;
                          using boost::math::quadrature::gauss_kronrod;
                          return two_pi * gauss_kronrod<double, 61>::integrate(p.f, lo, hi, 15, 1e-13);
                        },
                    },
                    m);
}

std::vector<Vec> lattice_vectors(const Mat& lattice, double l_max) {
  const auto n = lattice.rows();
  const Mat inv = lattice.inverse();
  std::array<long, 3> bound{0, 0, 0};
  for (Eigen::Index i = 0; i < n; ++i)
    bound[static_cast<std::size_t>(i)] = static_cast<long>(std::ceil(l_max * inv.row(i).norm())) + 1;

  std::vector<Vec> out;
  Vec k = Vec::Zero(n);
  const long b2 = n == 3 ? bound[2] : 0;
  for (long i = -bound[0]; i <= bound[0]; ++i)
    for (long j = -bound[1]; j <= bound[1]; ++j)
      for (long l = -b2; l <= b2; ++l) {
        k(0) = static_cast<double>(i);
        k(1) = static_cast<double>(j);
        if (n == 3) k(2) = static_cast<double>(l);
        if (i == 0 && j == 0 && l == 0) continue;
        const Vec v = lattice * k;
        if (v.norm() <= l_max * (1.0 + 1e-12)) out.push_back(v);
      }
  std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) {
    const double la = a.norm(), lb = b.norm();
    if (std::abs(la - lb) > 1e-12 * std::max(1.0, la)) return la < lb;
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  return out;
}

}  // namespace sunada::geo
