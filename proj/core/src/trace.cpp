#include "sunada/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>

#include "sunada/errors.hpp"
#include "sunada/parallel.hpp"
#include "sunada/rng.hpp"

namespace sunada::zeta {

using geo::ClosedOrbit;
using geo::FrameMat;
using geo::FrameVec;
using geo::Manifold;
using geo::PhasePoint;
using geo::PhaseVec;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double merge_tol = defaults::merge_tol;

struct Corrected {
  PhasePoint point;
  FrameMat monodromy;
};

// Newton at fixed period: minimum-norm steps solving (M - I) delta = -r.
std::optional<Corrected> correct_onto_fixed_set(const Manifold& m, PhasePoint z, double tau,
                                                const ClassifyOptions& opt) {
  try {
    for (int it = 0; it <= opt.newton_max_iter; ++it) {
      const geo::FlowJet jet = geo::integrate_monodromy(m, z, tau, opt.step);
      const PhaseVec d = geo::displacement(m, z, jet.endpoint);
      const double res = d.cwiseAbs().maxCoeff();
      if (res <= 1e-2 * opt.closure_tol) return Corrected{z, jet.monodromy};
      if (it == opt.newton_max_iter) return res <= opt.closure_tol ? std::optional(Corrected{z, jet.monodromy})
                                                                    : std::nullopt;
      const FrameVec r = geo::coords_to_frame(m, z) * d;
      const auto dim = jet.monodromy.rows();
      const Eigen::MatrixXd j = jet.monodromy - FrameMat::Identity(dim, dim);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double smax = svd.singularValues()(0);
      if (smax <= opt.rank_tol) return res <= opt.closure_tol ? std::optional(Corrected{z, jet.monodromy})
                                                               : std::nullopt;
      svd.setThreshold(opt.rank_tol / smax);
      Eigen::VectorXd delta = -svd.solve(Eigen::VectorXd(r));
      const double norm = delta.norm();
      if (norm > opt.continuation_step) delta *= opt.continuation_step / norm;
      if (norm < 1e-15) return res <= opt.closure_tol ? std::optional(Corrected{z, jet.monodromy}) : std::nullopt;
      z = geo::shift(m, z, FrameVec(delta));
    }
  } catch (const NumericalError&) {
  }
  return std::nullopt;
}

// Predictor-corrector walk from a towards b inside the fixed set.
bool connected_by_continuation(const Manifold& m, double tau, const ClosedOrbit& a, const ClosedOrbit& b,
                               const ClassifyOptions& opt) {
  const double h = opt.continuation_step;
  PhasePoint z = a.start;
  FrameMat mono = a.monodromy;
  double dist = geo::displacement(m, z, b.start).norm();
  const int max_iter = 50 + 4 * static_cast<int>(std::ceil(dist / h));
  int stalls = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (dist <= merge_tol) return true;
    const FrameVec f = geo::coords_to_frame(m, z) * geo::displacement(m, z, b.start);
    const RankReport rr = rank_report(mono, opt);
    if (rr.kernel_dimension == 0) return false;
    FrameVec p = rr.kernel * (rr.kernel.transpose() * Eigen::VectorXd(f));
    const double pn = p.norm();
    // The target lies in a normal direction: no tangent progress possible.
    if (pn < 1e-3 * f.norm()) return false;
    if (pn > h) p *= h / pn;

    const auto next = correct_onto_fixed_set(m, geo::shift(m, z, p), tau, opt);
    if (!next) return false;
    const double next_dist = geo::displacement(m, next->point, b.start).norm();
    const bool progress = next_dist < 0.95 * dist || next_dist < dist - 0.25 * h;
    stalls = progress ? 0 : stalls + 1;
    if (stalls >= 3) return false;
    z = next->point;
    mono = next->monodromy;
    dist = next_dist;
  }
  return dist <= merge_tol;
}

// Number of kernel directions along which the fixed set actually extends:
// a probe of size step along +-v must be corrected back by much less than step.
int continuation_dimension(const Manifold& m, double tau, const ClosedOrbit& o, const RankReport& rr,
                           const ClassifyOptions& opt) {
  const double h = opt.continuation_step;
  int count = 0;
  for (Eigen::Index c = 0; c < rr.kernel.cols(); ++c) {
    bool tangent = true;
    for (double sign : {1.0, -1.0}) {
      const PhasePoint probe = geo::shift(m, o.start, FrameVec(sign * h * rr.kernel.col(c)));
      const auto fixed = correct_onto_fixed_set(m, probe, tau, opt);
      if (!fixed || geo::phase_distance(m, probe, fixed->point) > 0.1 * h) {
        tangent = false;
        break;
      }
    }
    if (tangent) ++count;
  }
  return count;
}

// Times t in (0, L#) at which the orbit returns to the start up to rotation:
// the orbit is invariant under that many rotations (counting the identity).
int rotation_symmetry(const Manifold& m, const ClosedOrbit& o, const geo::StepControl& step) {
  const double prime = o.prime_period;
  const geo::FlowPath path = geo::integrate_flow(m, o.start, prime, step);
  const auto reduced = [&](const PhasePoint& q) {
    const PhaseVec d = geo::displacement(m, o.start, q);
    return std::max({std::abs(d(0)), std::abs(d(2)), std::abs(d(3))});
  };
  std::vector<double> r(path.points.size());
  double max_gap = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = reduced(path.points[i]);
    if (i > 0) max_gap = std::max(max_gap, geo::phase_distance(m, path.points[i - 1], path.points[i]));
  }
  std::vector<double> returns;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] > r[i - 1] || r[i] > r[i + 1] || r[i] > max_gap + merge_tol) continue;
    // Newton on u(t) = u(0) with du/dt = xi_u.
    double t = path.times[i];
    PhasePoint q = path.points[i];
    for (int it = 0; it < 8; ++it) {
      if (std::abs(q.xi(0)) < 1e-12) break;
      t -= geo::displacement(m, o.start, q)(0) / q.xi(0);
      if (t <= 0.0 || t >= prime) break;
      geo::FlowPropagator prop(m, o.start, false, step);
      prop.advance_to(t);
      q = prop.point();
    }
    if (t <= merge_tol || t >= prime - merge_tol || reduced(q) > merge_tol) continue;
    if (std::none_of(returns.begin(), returns.end(), [&](double s) { return std::abs(s - t) <= merge_tol; }))
      returns.push_back(t);
  }
  return 1 + static_cast<int>(returns.size());
}

VolumeEstimate revolution_family_volume(const Manifold& m, const FixedComponent& z, const ClassifyOptions& opt) {
  const ClosedOrbit& o = z.samples.front();
  const auto dim = o.monodromy.rows();
  const int normal = static_cast<int>(dim) - z.dimension;

  const auto integrand = [&](const PhasePoint& p, const FrameMat& d) {
    // Rotation generator d/dtheta with xi fixed, in the Sasaki frame at p.
    PhaseVec rot = PhaseVec::Zero(4);
    rot(1) = 1.0;
    const FrameVec c = geo::coords_to_frame(m, p) * rot;
    const double r_perp = c.tail(dim - 1).norm();
    const FrameMat mono = d * o.monodromy * d.inverse();
    const Eigen::VectorXd sv =
        Eigen::JacobiSVD<Eigen::MatrixXd>(FrameMat::Identity(dim, dim) - mono).singularValues();
    double det = 1.0;
    for (int i = 0; i < normal; ++i) det *= sv(i);
    return std::pair{r_perp, r_perp / det};
  };

  if (integrand(o.start, FrameMat::Identity(dim, dim)).first < 1e-8)
    throw NumericalError("rotation orbit is tangent to the flow; no two-dimensional parametrisation");

  const double measure = o.prime_period * two_pi / rotation_symmetry(m, o, opt.step);
  Rng rng(opt.seed);
  double sv = 0.0, sv2 = 0.0, sw = 0.0, sw2 = 0.0;
  std::size_t count = 0;
  while (count < opt.mc_max_samples) {
    std::vector<double> times(opt.mc_batch);
    for (double& t : times) t = rng.uniform(0.0, o.prime_period);
    std::sort(times.begin(), times.end());
    geo::FlowPropagator prop(m, o.start, true, opt.step);
    for (double t : times) {
      prop.advance_to(t);
      const auto [v, w] = integrand(prop.point(), prop.monodromy());
      sv += v;
      sv2 += v * v;
      sw += w;
      sw2 += w * w;
    }
    count += times.size();
    const double nd = static_cast<double>(count);
    const double mv = sv / nd, mw = sw / nd;
    const double ev = std::sqrt(std::max(0.0, sv2 / nd - mv * mv) / (nd - 1.0));
    const double ew = std::sqrt(std::max(0.0, sw2 / nd - mw * mw) / (nd - 1.0));
    if (count >= 2 * opt.mc_batch && ev <= opt.mc_rel_error * mv && ew <= opt.mc_rel_error * mw)
      return {measure * mv, measure * mw, measure * ev, true};
  }
  throw NumericalError("Monte Carlo standard error target not reached within the sample budget");
}

bool same_length(double a, double b) {
  return std::abs(a - b) <= defaults::length_coalesce_tol * std::max(1.0, std::abs(a));
}

}  // namespace

RankReport rank_report(const FrameMat& monodromy, const ClassifyOptions& options) {
  const auto dim = monodromy.rows();
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim) - Eigen::MatrixXd(monodromy);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullV);
  RankReport r;
  r.singular_values = svd.singularValues();
  Eigen::Index kept = 0;
  while (kept < dim && r.singular_values(kept) > options.rank_tol) ++kept;
  r.kernel_dimension = static_cast<int>(dim - kept);
  for (Eigen::Index i = 0; i < kept; ++i) r.determinant *= r.singular_values(i);
  if (kept > 0 && kept < dim)
    r.gap_ok = r.singular_values(kept - 1) > options.spectral_gap * r.singular_values(kept);
  r.kernel = svd.matrixV().rightCols(dim - kept);
  return r;
}

std::vector<FixedComponent> classify_fixed_set(const Manifold& m, double tau, const std::vector<ClosedOrbit>& orbits,
                                               const ClassifyOptions& options) {
  if (!(tau > 0.0)) throw PreconditionError("period must be positive");
  for (const ClosedOrbit& o : orbits)
    if (std::abs(o.length - tau) > 1e-6 * std::max(1.0, tau))
      throw PreconditionError("orbit length differs from the period being classified");

  const int full = static_cast<int>(2 * geo::dimension(m) - 1);
  std::vector<RankReport> ranks(orbits.size());
  parallel_for(orbits.size(), [&](std::size_t i) { ranks[i] = rank_report(orbits[i].monodromy, options); });

  std::vector<std::vector<std::size_t>> members;
  std::vector<int> dims;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const int k = ranks[i].kernel_dimension;
    std::vector<std::pair<double, std::size_t>> nearest;  // (distance, component) for equal k
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (dims[c] != k) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j : members[c]) best = std::min(best, geo::phase_distance(m, orbits[i].start, orbits[j].start));
      nearest.emplace_back(best, c);
    }
    std::sort(nearest.begin(), nearest.end());

    std::optional<std::size_t> joined;
    for (const auto& [dist, c] : nearest) {
      if (k == full) {
        joined = c;
        break;
      }
      std::size_t target = members[c].front();
      for (std::size_t j : members[c])
        if (geo::phase_distance(m, orbits[i].start, orbits[j].start) <
            geo::phase_distance(m, orbits[i].start, orbits[target].start))
          target = j;
      if (connected_by_continuation(m, tau, orbits[i], orbits[target], options)) {
        joined = c;
        break;
      }
    }
    if (joined) {
      members[*joined].push_back(i);
    } else {
      members.push_back({i});
      dims.push_back(k);
    }
  }

  std::vector<FixedComponent> out(members.size());
  parallel_for(members.size(), [&](std::size_t c) {
    FixedComponent& z = out[c];
    z.period = tau;
    z.dimension = dims[c];
    bool gap_ok = true;
    for (std::size_t i : members[c]) {
      z.samples.push_back(orbits[i]);
      gap_ok = gap_ok && ranks[i].gap_ok;
    }
    const RankReport& first = ranks[members[c].front()];
    z.continuation_dimension = continuation_dimension(m, tau, z.samples.front(), first, options);
    z.clean = gap_ok && z.continuation_dimension == z.dimension;
    if (!gap_ok) z.notice = "singular values of I - M show no spectral gap at the rank threshold";
    else if (!z.clean)
      z.notice = "fixed set extends in " + std::to_string(z.continuation_dimension) + " of " +
                 std::to_string(z.dimension) + " kernel directions: not clean";
    if (!z.clean) return;

    z.transverse_determinant = transverse_determinant(z, options);
    ClassifyOptions local = options;
    local.seed = options.seed + c;
    const VolumeEstimate v = canonical_volume(m, z, local);
    z.canonical_volume = v.volume;
    z.weight = v.weight;
    z.volume_std_error = v.std_error;
  });
  return out;
}

double transverse_determinant(const FixedComponent& z, const ClassifyOptions& options) {
  if (!z.clean) throw PreconditionError("transverse determinant needs a clean component");
  return rank_report(z.samples.front().monodromy, options).determinant;
}

VolumeEstimate canonical_volume(const Manifold& m, const FixedComponent& z, const ClassifyOptions& options) {
  if (!z.clean) throw PreconditionError("canonical volume needs a clean component");
  const auto n = static_cast<int>(geo::dimension(m));
  const double det = transverse_determinant(z, options);
  const auto closed_form = [&](double vol) { return VolumeEstimate{vol, vol / det, 0.0, false}; };

  if (z.dimension == 2 * n - 1) {
    const double fiber = n == 2 ? two_pi : 4.0 * std::numbers::pi;
    return closed_form(geo::base_volume(m) * fiber);
  }
  if (z.dimension == 1) return closed_form(z.samples.front().prime_period);
  if (std::holds_alternative<geo::FlatTorus>(m) && z.dimension == n) return closed_form(geo::base_volume(m));
  if (std::holds_alternative<geo::SurfaceOfRevolution>(m) && z.dimension == 2)
    return revolution_family_volume(m, z, options);
  throw NumericalError("no canonical volume parametrisation for a component of dimension " +
                       std::to_string(z.dimension));
}

TraceWeights weights_from_orbits(const Manifold& m, double l_max, const std::vector<ClosedOrbit>& orbits,
                                 const ClassifyOptions& options) {
  std::vector<ClosedOrbit> sorted = orbits;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ClosedOrbit& a, const ClosedOrbit& b) { return a.length < b.length; });

  TraceWeights out;
  out.orbit_count = sorted.size();
  std::vector<LSeriesEntry> entries;
  for (std::size_t lo = 0; lo < sorted.size();) {
    std::size_t hi = lo + 1;
    while (hi < sorted.size() && same_length(sorted[lo].length, sorted[hi].length)) ++hi;
    const std::vector<ClosedOrbit> group(sorted.begin() + static_cast<std::ptrdiff_t>(lo),
                                         sorted.begin() + static_cast<std::ptrdiff_t>(hi));
    const double tau = group.front().length;
    double weight = 0.0;
    for (FixedComponent& z : classify_fixed_set(m, tau, group, options)) {
      if (!z.clean) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", tau);
        throw NumericalError("non-clean fixed component at tau = " + std::string(buf) + ": " + z.notice);
      }
      weight += z.weight;
      out.components.push_back(std::move(z));
    }
    entries.push_back({tau, weight, Provenance::computed});
    lo = hi;
  }
  out.series = make_series(std::move(entries), l_max);
  return out;
}

TraceWeights flat_trace_weights(const Manifold& m, double l_max, const geo::OrbitSearchOptions& search,
                                const ClassifyOptions& options) {
  const std::vector<ClosedOrbit> orbits = geo::find_closed_orbits(m, l_max, search);
  return weights_from_orbits(m, l_max, orbits, options);
}

}  // namespace sunada::zeta
