#include "sunada/flow.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "sunada/errors.hpp"

namespace sunada::geo {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;
using Stepper = odeint::runge_kutta_dopri5<State>;
using Controlled = odeint::result_of::make_controlled<Stepper>::type;

PhasePoint unpack(const State& y, Eigen::Index n, int chart) {
  PhasePoint p{Vec(n), Vec(n), chart};
  for (Eigen::Index i = 0; i < n; ++i) {
    p.x(i) = y[static_cast<std::size_t>(i)];
    p.xi(i) = y[static_cast<std::size_t>(n + i)];
  }
  return p;
}

void pack_point(const PhasePoint& p, State& y) {
  const Eigen::Index n = p.x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = p.x(i);
    y[static_cast<std::size_t>(n + i)] = p.xi(i);
  }
}

// Variational block: 2n x (2n-1), column-major after the base point.
using VarMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 5>;

VarMat unpack_var(const State& y, Eigen::Index n) {
  return Eigen::Map<const Eigen::MatrixXd>(y.data() + 2 * n, 2 * n, 2 * n - 1);
}

void pack_var(const VarMat& v, State& y, Eigen::Index n) {
  Eigen::Map<Eigen::MatrixXd>(y.data() + 2 * n, 2 * n, 2 * n - 1) = v;
}

}  // namespace

PhaseVec hamilton_rhs(const Manifold& m, const PhasePoint& p) {
  const MetricJet j = metric_jet(m, p.x, p.chart);
  const auto n = p.x.size();
  PhaseVec d(2 * n);
  d.head(n) = j.ginv * p.xi;
  for (Eigen::Index a = 0; a < n; ++a) d(n + a) = -0.5 * p.xi.dot(j.dginv[a] * p.xi);
  return d;
}

FrameMat contact_form(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(2 * n - 1);
  const auto half = static_cast<Eigen::Index>(n - 1);
  FrameMat w = FrameMat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < half; ++i) {
    w(1 + i, 1 + half + i) = 1.0;
    w(1 + half + i, 1 + i) = -1.0;
  }
  return w;
}

struct FlowPropagator::Impl {
  Manifold manifold;
  StepControl control;
  bool variational;
  Eigen::Index n;
  int chart;
  State y;
  double t = 0.0;
  double dt;
  FrameMat accumulated;
  double drift = 0.0;
  std::size_t steps = 0;
  Controlled stepper;

  Impl(const Manifold& m, const PhasePoint& p0, bool var, const StepControl& c)
      : manifold(m),
        control(c),
        variational(var),
        n(p0.x.size()),
        chart(p0.chart),
        dt(c.initial_step),
        stepper(odeint::make_controlled(c.abs_tol, c.rel_tol, Stepper())) {
    if (p0.x.size() != static_cast<Eigen::Index>(dimension(m)) || p0.xi.size() != p0.x.size())
      throw PreconditionError("phase point dimension does not match the manifold");
    PhasePoint p = p0;
    if (std::abs(energy(m, p) - 1.0) > 1e-8) throw PreconditionError("phase point is not on the unit cosphere bundle");
    if (std::holds_alternative<RoundSphere>(m) && std::abs(std::sin(p.x(0))) < 0.35) canonicalize(m, p);
    chart = p.chart;
    const auto dim = 2 * n - 1;
    y.assign(static_cast<std::size_t>(2 * n + (var ? 2 * n * dim : 0)), 0.0);
    pack_point(p, y);
    accumulated = FrameMat::Identity(dim, dim);
    if (var) pack_var(frame(m, p), y, n);
  }

  void rhs(const State& s, State& ds, double) const {
    const PhasePoint p = unpack(s, n, chart);
    const MetricJet j = metric_jet(manifold, p.x, chart);
    const Vec xdot = j.ginv * p.xi;
    for (Eigen::Index a = 0; a < n; ++a) {
      ds[static_cast<std::size_t>(a)] = xdot(a);
      ds[static_cast<std::size_t>(n + a)] = -0.5 * p.xi.dot(j.dginv[a] * p.xi);
    }
    if (!variational) return;

    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6> jac(2 * n, 2 * n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Vec dx_dxc = j.dginv[c] * p.xi;
      for (Eigen::Index a = 0; a < n; ++a) {
        jac(a, c) = dx_dxc(a);
        jac(n + a, c) = -0.5 * p.xi.dot(j.d2ginv[a][c] * p.xi);
      }
    }
    jac.topRightCorner(n, n) = j.ginv;
    for (Eigen::Index a = 0; a < n; ++a) jac.row(n + a).tail(n) = -(j.dginv[a] * p.xi).transpose();

    const VarMat v = unpack_var(s, n);
    pack_var(jac * v, ds, n);
  }

  // Renormalizes, wraps coordinates, and switches charts after an accepted step.
  void post_step() {
    PhasePoint p = unpack(y, n, chart);
    const double e = energy(manifold, p);
    drift = std::max(drift, std::abs(e - 1.0));
    p.xi /= std::sqrt(e);
    const int old_chart = chart;
    PhasePoint q = p;
    canonicalize(manifold, q);
    if (variational && q.chart != old_chart) {
      accumulated = FrameMat(coords_to_frame(manifold, p) * unpack_var(y, n)) * accumulated;
      pack_var(frame(manifold, q), y, n);
    }
    chart = q.chart;
    pack_point(q, y);
    stepper.reset();
  }

  void advance_to(double t_end, FlowPath* path) {
    if (t_end < t) throw PreconditionError("cannot integrate backwards");
    auto system = [this](const State& s, State& ds, double tt) { rhs(s, ds, tt); };
    const double eps = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_end));
    while (t_end - t > eps) {
      if (steps >= control.max_steps) throw NumericalError("step budget exhausted");
      const bool clamped = dt >= t_end - t;
      double h = clamped ? t_end - t : dt;
      const double before = dt;
      const auto result = stepper.try_step(system, y, t, h);
      if (result == odeint::fail) {
        dt = h;
        if (dt < control.min_step) throw NumericalError("step size underflow");
        continue;
      }
      dt = clamped ? std::max(h, before) : h;
      ++steps;
      if (clamped) t = t_end;
      post_step();
      if (path) {
        path->times.push_back(t);
        path->points.push_back(unpack(y, n, chart));
      }
    }
    t = std::max(t, t_end);
  }
};

FlowPropagator::FlowPropagator(const Manifold& m, const PhasePoint& p0, bool variational, const StepControl& step)
    : impl_(std::make_unique<Impl>(m, p0, variational, step)) {}
FlowPropagator::~FlowPropagator() = default;
FlowPropagator::FlowPropagator(FlowPropagator&&) noexcept = default;
FlowPropagator& FlowPropagator::operator=(FlowPropagator&&) noexcept = default;

void FlowPropagator::advance_to(double t) { impl_->advance_to(t, nullptr); }
void FlowPropagator::advance_to(double t, FlowPath& path) { impl_->advance_to(t, &path); }
double FlowPropagator::time() const { return impl_->t; }
PhasePoint FlowPropagator::point() const { return unpack(impl_->y, impl_->n, impl_->chart); }
double FlowPropagator::max_energy_drift() const { return impl_->drift; }
std::size_t FlowPropagator::steps() const { return impl_->steps; }

FrameMat FlowPropagator::monodromy() const {
  if (!impl_->variational) throw PreconditionError("propagator was built without variational equations");
  const PhasePoint p = point();
  return FrameMat(coords_to_frame(impl_->manifold, p) * unpack_var(impl_->y, impl_->n)) * impl_->accumulated;
}

FlowPath integrate_flow(const Manifold& m, const PhasePoint& p0, double t_end, const StepControl& step) {
  if (!(t_end >= 0.0)) throw PreconditionError("integration time must be non-negative");
  FlowPropagator prop(m, p0, false, step);
  FlowPath path;
  path.times.push_back(0.0);
  path.points.push_back(p0);
  prop.advance_to(t_end, path);
  path.max_energy_drift = prop.max_energy_drift();
  path.steps = prop.steps();
  return path;
}

FlowJet integrate_monodromy(const Manifold& m, const PhasePoint& p0, double t_end, const StepControl& step) {
  if (!(t_end >= 0.0)) throw PreconditionError("integration time must be non-negative");
  FlowPropagator prop(m, p0, true, step);
  prop.advance_to(t_end);

  FlowJet jet;
  jet.start = p0;
  jet.endpoint = t_end > 0.0 ? prop.point() : p0;
  jet.time = t_end;
  jet.monodromy = prop.monodromy();
  jet.start_frame = frame(m, p0);
  jet.end_frame = frame(m, jet.endpoint);
  jet.max_energy_drift = prop.max_energy_drift();

  const auto dim = jet.monodromy.rows();
  FrameVec e0 = FrameVec::Zero(dim);
  e0(0) = 1.0;
  jet.flow_residual = (jet.monodromy * e0 - e0).cwiseAbs().maxCoeff();
  const FrameMat w = contact_form(dimension(m));
  jet.symplectic_residual = (jet.monodromy.transpose() * w * jet.monodromy - w).cwiseAbs().maxCoeff();
  return jet;
}

}  // namespace sunada::geo
