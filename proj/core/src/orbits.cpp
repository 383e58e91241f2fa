#include "sunada/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sunada/errors.hpp"
#include "sunada/parallel.hpp"

namespace sunada::geo {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double degeneracy_tol = 1e-8;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void add_iterates(std::vector<OrbitCandidate>& out, const PhasePoint& p, double prime, double l_max) {
  for (int k = 1; k * prime <= l_max * (1.0 + 1e-12); ++k) out.push_back({p, k * prime, "symmetry"});
}

// Roots of f' on [lo, hi] by sign changes on a fine grid and bisection.
std::vector<double> profile_critical_points(const Profile& prof, double lo, double hi, bool periodic) {
  constexpr int samples = 2048;
  std::vector<double> roots;
  const double step = (hi - lo) / samples;
  for (int i = 0; i < samples; ++i) {
    double a = lo + i * step, b = a + step;
    double fa = prof.df(a), fb = prof.df(b);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fa * fb > 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = prof.df(mid);
      if ((fm < 0) == (fa < 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  if (periodic)
    std::erase_if(roots, [&](double r) { return r >= hi - 1e-12; });
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());
  return roots;
}

PhasePoint unit_point(const Manifold& m, Vec x, Vec v, int chart = 0) { return from_velocity(m, x, v, chart); }

// Unit tangent directions at x, evenly spread in an orthonormal frame.
std::vector<Vec> grid_directions(const Manifold& m, const Vec& x, int chart, std::size_t count) {
  const auto n = x.size();
  const MetricJet j = metric_jet(m, x, chart);
  std::vector<Vec> dirs;
  if (n == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a = two_pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      Vec v(2);
      v(0) = std::cos(a) / std::sqrt(j.g(0, 0));
      v(1) = std::sin(a) / std::sqrt(j.g(1, 1));
      dirs.push_back(v);
    }
    return dirs;
  }
  // Fibonacci sphere for n = 3 (flat metric).
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * static_cast<double>(k);
    Vec v(3);
    v << r * std::cos(a), r * std::sin(a), z;
    dirs.push_back(v);
  }
  return dirs;
}

std::vector<std::pair<Vec, int>> grid_base_points(const Manifold& m, std::size_t g) {
  std::vector<std::pair<Vec, int>> pts;
  const double gd = static_cast<double>(g);
  std::visit(overloaded{
                 [&](const FlatTorus& t) {
                   const auto n = t.lattice.rows();
                   const std::size_t total = n == 3 ? g * g * g : g * g;
                   for (std::size_t idx = 0; idx < total; ++idx) {
                     Vec c(n);
                     std::size_t r = idx;
                     for (Eigen::Index i = 0; i < n; ++i) {
                       c(i) = (static_cast<double>(r % g) + 0.37) / gd;
                       r /= g;
                     }
                     pts.emplace_back(Vec(t.lattice * c), 0);
                   }
                 },
                 [&](const RoundSphere&) {
                   for (std::size_t i = 0; i < g; ++i)
                     for (std::size_t j = 0; j < g; ++j) {
                       Vec x(2);
                       x << 0.4 + (std::numbers::pi - 0.8) * (static_cast<double>(i) + 0.5) / gd,
                           two_pi * (static_cast<double>(j) + 0.25) / gd;
                       pts.emplace_back(x, 0);
                     }
                 },
                 [&](const SurfaceOfRevolution& s) {
                   const Profile& p = s.profile;
                   const double lo = p.period ? 0.0 : p.u_min;
                   const double hi = p.period ? *p.period : p.u_max;
                   for (std::size_t i = 0; i < g; ++i)
                     for (std::size_t j = 0; j < g; ++j) {
                       Vec x(2);
                       x << lo + (hi - lo) * (static_cast<double>(i) + 0.5) / gd,
                           two_pi * (static_cast<double>(j) + 0.25) / gd;
                       pts.emplace_back(x, 0);
                     }
                 },
             },
             m);
  return pts;
}

// Point at time t along a recorded path, integrated from the last sample at or before t.
PhasePoint point_at(const Manifold& m, const FlowPath& path, double t, const StepControl& step) {
  auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - path.times.begin()) - 1));
  const double t0 = path.times[idx];
  if (t - t0 <= 0.0) return path.points[idx];
  FlowPropagator prop(m, path.points[idx], false, step);
  prop.advance_to(t - t0);
  return prop.point();
}

bool less_by_start(const ClosedOrbit& a, const ClosedOrbit& b) {
  if (std::abs(a.length - b.length) > 1e-9 * std::max(1.0, a.length)) return a.length < b.length;
  const auto n = a.start.x.size();
  for (Eigen::Index i = 0; i < n; ++i)
    if (a.start.x(i) != b.start.x(i)) return a.start.x(i) < b.start.x(i);
  for (Eigen::Index i = 0; i < n; ++i)
    if (a.start.xi(i) != b.start.xi(i)) return a.start.xi(i) < b.start.xi(i);
  return a.start.chart < b.start.chart;
}

}  // namespace

std::vector<OrbitCandidate> symmetry_candidates(const Manifold& m, double l_max) {
  std::vector<OrbitCandidate> out;
  std::visit(overloaded{
                 [&](const FlatTorus& t) {
                   const auto n = t.lattice.rows();
                   for (const Vec& v : lattice_vectors(t.lattice, l_max))
                     out.push_back({unit_point(m, Vec::Zero(n), v), v.norm(), "symmetry"});
                 },
                 [&](const RoundSphere& s) {
                   Vec x(2);
                   x << std::numbers::pi / 2, 0.0;
                   for (double sign : {1.0, -1.0}) {
                     Vec v(2);
                     v << 0.0, sign;
                     add_iterates(out, unit_point(m, x, v), two_pi * s.radius, l_max);
                   }
                 },
                 [&](const SurfaceOfRevolution& s) {
                   const Profile& p = s.profile;
                   const double lo = p.period ? 0.0 : p.u_min;
                   const double hi = p.period ? *p.period : p.u_max;
                   for (double u : profile_critical_points(p, lo, hi, p.period.has_value())) {
                     Vec x(2);
                     x << u, 0.0;
                     for (double sign : {1.0, -1.0}) {
                       Vec v(2);
                       v << 0.0, sign;
                       add_iterates(out, unit_point(m, x, v), two_pi * p.f(u), l_max);
                     }
                   }
                   if (p.period) {
                     Vec x(2);
                     x << 0.0, 0.0;
                     for (double sign : {1.0, -1.0}) {
                       Vec v(2);
                       v << sign, 0.0;
                       add_iterates(out, unit_point(m, x, v), *p.period, l_max);
                     }
                   }
                 },
             },
             m);
  return out;
}

double prime_period(const Manifold& m, const PhasePoint& start, double length, const OrbitSearchOptions& options) {
  const auto k_max = static_cast<long>(std::floor(length / options.min_length));
  if (k_max < 2) return length;
  const FlowPath path = integrate_flow(m, start, length, options.step);

  // Distance to the start at every sample, and the largest gap between samples.
  std::vector<double> dist(path.points.size());
  double max_gap = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    dist[i] = phase_distance(m, start, path.points[i]);
    if (i > 0) max_gap = std::max(max_gap, phase_distance(m, path.points[i - 1], path.points[i]));
  }
  // Ascending candidate times L/k_max < ... < L/2; the first closure is the prime period.
  for (long k = k_max; k >= 2; --k) {
    const double t = length / static_cast<double>(k);
    const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - path.times.begin(),
                                                                      static_cast<std::ptrdiff_t>(dist.size()) - 1));
    const std::size_t lo = hi > 0 ? hi - 1 : 0;
    if (std::min(dist[lo], dist[hi]) > max_gap + options.closure_tol) continue;
    if (phase_distance(m, start, point_at(m, path, t, options.step)) <= options.closure_tol) return t;
  }
  return length;
}

std::optional<ClosedOrbit> refine_closed_orbit(const Manifold& m, const PhasePoint& guess, double period_guess,
                                               double l_max, const OrbitSearchOptions& options,
                                               const std::string& source) {
  PhasePoint p = guess;
  double period = period_guess;
  const auto dim = static_cast<Eigen::Index>(2 * dimension(m) - 1);
  double closure = std::numeric_limits<double>::infinity();
  FlowJet jet;
  try {
    for (int it = 0; it <= options.newton_max_iter; ++it) {
      jet = integrate_monodromy(m, p, period, options.step);
      const PhaseVec d = displacement(m, p, jet.endpoint);
      closure = d.cwiseAbs().maxCoeff();
      if (closure <= 1e-3 * options.closure_tol || it == options.newton_max_iter) break;

      const FrameVec r = coords_to_frame(m, p) * d;
      Eigen::MatrixXd j(dim, dim + 1);
      j.leftCols(dim) = jet.monodromy - FrameMat::Identity(dim, dim);
      j.col(dim).setZero();
      j(0, dim) = 1.0;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-9);
      Eigen::VectorXd delta = -svd.solve(Eigen::VectorXd(r));
      const double norm = delta.norm();
      if (norm > 0.25) delta *= 0.25 / norm;
      if (norm < 1e-15) break;
      p = shift(m, p, FrameVec(delta.head(dim)));
      period += delta(dim);
      if (period < options.min_length || period > 1.5 * l_max + 1.0) return std::nullopt;
    }
  } catch (const NumericalError&) {
    return std::nullopt;
  }
  if (!(closure <= options.closure_tol)) return std::nullopt;
  if (period < options.min_length || period > l_max * (1.0 + 1e-9)) return std::nullopt;

  ClosedOrbit orbit;
  orbit.start = p;
  orbit.length = period;
  orbit.monodromy = jet.monodromy;
  orbit.closure_error = closure;
  orbit.source = source;
  orbit.prime_period = prime_period(m, p, period, options);
  orbit.poincare = jet.monodromy.bottomRightCorner(dim - 1, dim - 1);
  const DetReport det = det_I_minus_P(orbit);
  orbit.det_I_minus_P = det.direct;
  orbit.degenerate = det.degenerate;
  return orbit;
}

bool same_orbit(const Manifold& m, const ClosedOrbit& a, const ClosedOrbit& b, double tol) {
  if (std::abs(a.length - b.length) > tol * std::max(1.0, a.length)) return false;
  if (phase_distance(m, a.start, b.start) <= tol) return true;
  const Eigen::VectorXd ia = first_integrals(m, a.start);
  const Eigen::VectorXd ib = first_integrals(m, b.start);
  if ((ia - ib).cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, ia.cwiseAbs().maxCoeff())) return false;

  StepControl step;
  const FlowPath path = integrate_flow(m, a.start, a.prime_period, step);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const double d = phase_distance(m, path.points[i], b.start);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
    if (i > 0) max_gap = std::max(max_gap, phase_distance(m, path.points[i - 1], path.points[i]));
  }
  // Every point of the orbit is within one sample gap of some sample.
  if (best_d > max_gap + tol) return false;

  // Newton on the time shift along the flow direction.
  double t = path.times[best];
  for (int it = 0; it < 6; ++it) {
    const PhasePoint q = point_at(m, path, t, step);
    const PhaseVec d = displacement(m, q, b.start);
    const PhaseVec f = hamilton_rhs(m, q);
    t += d.dot(f) / f.squaredNorm();
    t = std::fmod(t, a.prime_period);
    if (t < 0) t += a.prime_period;
  }
  return phase_distance(m, point_at(m, path, t, step), b.start) <= tol;
}

std::vector<ClosedOrbit> find_closed_orbits(const Manifold& m, double l_max, const OrbitSearchOptions& options,
                                            OrbitSearchStats* stats) {
  if (!(l_max > 0.0)) throw PreconditionError("l_max must be positive");
  validate(m);

  std::vector<OrbitCandidate> seeds;
  if (options.use_symmetry) seeds = symmetry_candidates(m, l_max);
  const std::size_t symmetric = seeds.size();
  if (options.use_grid && options.grid_points > 0 && options.grid_directions > 0 && options.period_step > 0) {
    for (const auto& [x, chart] : grid_base_points(m, options.grid_points))
      for (const Vec& v : grid_directions(m, x, chart, options.grid_directions))
        for (double t = options.period_step; t <= l_max * (1.0 + 1e-12); t += options.period_step)
          seeds.push_back({unit_point(m, x, v, chart), t, "grid"});
  }

  std::vector<std::optional<ClosedOrbit>> refined(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    refined[i] = refine_closed_orbit(m, seeds[i].start, seeds[i].period, l_max, options, seeds[i].source);
  });

  // Symmetry results first so their exact starting points represent merged orbits.
  std::vector<ClosedOrbit> sym, grid;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (refined[i]) (i < symmetric ? sym : grid).push_back(std::move(*refined[i]));
  std::sort(sym.begin(), sym.end(), less_by_start);
  std::sort(grid.begin(), grid.end(), less_by_start);

  std::vector<ClosedOrbit> kept;
  for (auto* group : {&sym, &grid})
    for (ClosedOrbit& o : *group) {
      const bool dup = std::any_of(kept.begin(), kept.end(),
                                   [&](const ClosedOrbit& k) { return same_orbit(m, k, o, options.merge_tol); });
      if (!dup) kept.push_back(std::move(o));
    }
  std::sort(kept.begin(), kept.end(), less_by_start);

  if (stats) {
    stats->seeds = seeds.size();
    stats->converged = sym.size() + grid.size();
    stats->dropped = seeds.size() - stats->converged;
  }
  return kept;
}

PoincareBlocks poincare_map(const ClosedOrbit& orbit) {
  const auto dim = orbit.monodromy.rows();
  if (dim < 3) throw PreconditionError("monodromy too small for a transversal");
  const auto h = (dim - 1) / 2;
  PoincareBlocks b;
  b.p = orbit.monodromy.bottomRightCorner(dim - 1, dim - 1);
  b.a = b.p.topLeftCorner(h, h);
  b.b = b.p.topRightCorner(h, h);
  b.c = b.p.bottomLeftCorner(h, h);
  b.d = b.p.bottomRightCorner(h, h);
  return b;
}

DetReport det_I_minus_P(const ClosedOrbit& orbit) {
  const PoincareBlocks b = poincare_map(orbit);
  const auto h = b.a.rows();
  DetReport r;
  r.direct = (FrameMat::Identity(2 * h, 2 * h) - b.p).determinant();
  r.degenerate = std::abs(r.direct) <= degeneracy_tol;

  const FrameMat i_d = FrameMat::Identity(h, h) - b.d;
  // Absolute test: an LU pivot threshold is relative and never flags a 1 x 1 block.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(i_d);
  if (svd.singularValues().minCoeff() <= 1e-10) {
    r.notice = "I - D is singular; Schur evaluation skipped";
    r.schur_gap = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const FrameMat schur_block = (FrameMat::Identity(h, h) - b.a) - b.b * FrameMat(Eigen::MatrixXd(i_d).partialPivLu().solve(Eigen::MatrixXd(b.c)));
  r.schur = i_d.determinant() * schur_block.determinant();
  r.schur_gap = std::abs(r.direct - *r.schur) / std::max(1.0, std::abs(r.direct));
  return r;
}

}  // namespace sunada::geo
