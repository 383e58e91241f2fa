#include "sunada/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sunada/errors.hpp"
#include "sunada/parallel.hpp"
#include "sunada/rng.hpp"

namespace sunada::cover {

namespace {

// Orbits of the left H-action, numbered by smallest member.
void quotient(const CoverDiagram& d, const Subgroup& h, std::vector<std::size_t>& project,
              std::vector<std::size_t>& reps) {
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  project.assign(d.size(), unset);
  reps.clear();
  for (std::size_t x = 0; x < d.size(); ++x) {
    if (project[x] != unset) continue;
    const std::size_t id = reps.size();
    reps.push_back(x);
    for (ElementId b : h.members()) project[d.act(b, x)] = id;
  }
}

std::vector<std::size_t> induced_map(const std::vector<std::size_t>& total,
                                     const std::vector<std::size_t>& project,
                                     const std::vector<std::size_t>& reps) {
  std::vector<std::size_t> out(reps.size());
  for (std::size_t q = 0; q < reps.size(); ++q) out[q] = project[total[reps[q]]];
  return out;
}

bool is_equivariant(const CoverDiagram& d, const std::vector<std::size_t>& total) {
  for (ElementId a : d.group.generators())
    for (std::size_t x = 0; x < d.size(); ++x)
      if (total[d.act(a, x)] != d.act(a, total[x])) return false;
  return true;
}

bool well_defined(const std::vector<std::size_t>& total, const std::vector<std::size_t>& project,
                  const std::vector<std::size_t>& map) {
  for (std::size_t x = 0; x < total.size(); ++x)
    if (project[total[x]] != map[project[x]]) return false;
  return true;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::warning: return "warning";
  }
  return "fail";
}

CoverDiagram build_cover(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2, Model model,
                         std::size_t fiber_size) {
  if (!(h1.parent() == g) || !(h2.parent() == g))
    throw PreconditionError("subgroups do not belong to the given group");
  if (fiber_size == 0) throw PreconditionError("fiber must be nonempty");
  if (model == Model::regular && fiber_size != 1)
    throw PreconditionError("the regular model has a one-point fiber");

  CoverDiagram d{g, h1, h2, model, fiber_size, {}, {}, {}, {}};

  for (ElementId a = 1; a < g.order(); ++a)
    for (std::size_t x = 0; x < d.size(); ++x)
      if (d.act(a, x) == x) throw PreconditionError("group action on the cover is not free");

  quotient(d, h1, d.project1, d.reps1);
  quotient(d, h2, d.project2, d.reps2);
  return d;
}

EquivariantDynamics translation_dynamics(const CoverDiagram& d, ElementId c, std::vector<std::size_t> sigma) {
  if (c >= d.group.order()) throw PreconditionError("translation element out of range");
  if (sigma.empty()) {
    sigma.resize(d.fiber_size);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  }
  if (sigma.size() != d.fiber_size) throw PreconditionError("fiber permutation has the wrong size");
  std::vector<bool> hit(d.fiber_size, false);
  for (std::size_t f : sigma) {
    if (f >= d.fiber_size || hit[f]) throw PreconditionError("sigma is not a permutation of the fiber");
    hit[f] = true;
  }

  std::vector<std::size_t> total(d.size());
  for (std::size_t x = 0; x < d.size(); ++x) {
    const auto g = static_cast<ElementId>(x / d.fiber_size);
    total[x] = d.group.multiply(g, c) * d.fiber_size + sigma[x % d.fiber_size];
  }
  return dynamics_from_map(d, std::move(total), true);
}

EquivariantDynamics random_equivariant_dynamics(const CoverDiagram& d, std::uint64_t seed) {
  Rng rng(seed);
  const auto c = static_cast<ElementId>(rng.below(d.group.order()));
  std::vector<std::size_t> sigma(d.fiber_size);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  for (std::size_t i = sigma.size(); i > 1; --i) std::swap(sigma[i - 1], sigma[rng.below(i)]);
  return translation_dynamics(d, c, std::move(sigma));
}

EquivariantDynamics dynamics_from_map(const CoverDiagram& d, std::vector<std::size_t> total,
                                      bool require_equivariant) {
  if (total.size() != d.size()) throw PreconditionError("dynamics has the wrong number of points");
  for (std::size_t y : total)
    if (y >= d.size()) throw PreconditionError("dynamics maps outside the cover");

  EquivariantDynamics dyn;
  dyn.level1 = induced_map(total, d.project1, d.reps1);
  dyn.level2 = induced_map(total, d.project2, d.reps2);
  dyn.equivariant = is_equivariant(d, total) && well_defined(total, d.project1, dyn.level1) &&
                    well_defined(total, d.project2, dyn.level2);
  dyn.total = std::move(total);
  if (require_equivariant && !dyn.equivariant)
    throw PreconditionError("dynamics does not commute with the group action");
  return dyn;
}

RadonMatrix lift_radon(const IntertwinerKernel& kernel, const CoverDiagram& d) {
  if (!(kernel.group == d.group) || !(kernel.h1 == d.h1) || !(kernel.h2 == d.h2))
    throw PreconditionError("kernel and diagram use different (G, H1, H2)");

  const auto rows = static_cast<Eigen::Index>(d.reps2.size());
  const auto cols = static_cast<Eigen::Index>(d.reps1.size());
  RadonMatrix u{kernel, Eigen::MatrixXcd::Zero(rows, cols)};

  // Column q1: pull back the indicator of q1, translate by a, push forward.
  // The 1 / (|H1| |H2|) factor is applied once at the end so 0/1 kernels stay exact.
  for (ElementId a = 0; a < d.group.order(); ++a) {
    const group::Complex weight = kernel.value_at(a);
    if (weight == group::Complex{0.0}) continue;
    for (std::size_t x = 0; x < d.size(); ++x) {
      // (T_a 1_{q1})(y) = 1_{q1}(a^-1 y), so the mass at x moves to y = a x.
      const auto q1 = static_cast<Eigen::Index>(d.project1[x]);
      const auto q2 = static_cast<Eigen::Index>(d.project2[d.act(a, x)]);
      u.matrix(q2, q1) += weight;
    }
  }
  u.matrix /= static_cast<double>(d.h1.order() * d.h2.order());
  return u;
}

double unitarity_residual(const RadonMatrix& u) {
  const Eigen::MatrixXcd& m = u.matrix;
  const Eigen::MatrixXcd left = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.cols(), m.cols());
  const Eigen::MatrixXcd right = m * m.adjoint() - Eigen::MatrixXcd::Identity(m.rows(), m.rows());
  return std::max(left.cwiseAbs().maxCoeff(), right.cwiseAbs().maxCoeff());
}

double verify_intertwining(const RadonMatrix& u, const EquivariantDynamics& dyn) {
  const Eigen::MatrixXcd& m = u.matrix;
  if (static_cast<std::size_t>(m.cols()) != dyn.level1.size() ||
      static_cast<std::size_t>(m.rows()) != dyn.level2.size())
    throw PreconditionError("Radon matrix and dynamics have different quotient sizes");

  // (U V_1)[:, j] = sum over q with T_1 q = j of U[:, q]
  Eigen::MatrixXcd uv = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  for (std::size_t q = 0; q < dyn.level1.size(); ++q)
    uv.col(static_cast<Eigen::Index>(dyn.level1[q])) += m.col(static_cast<Eigen::Index>(q));
  // (V_2 U)[i, :] = U[T_2 i, :]
  Eigen::MatrixXcd vu(m.rows(), m.cols());
  for (std::size_t i = 0; i < dyn.level2.size(); ++i)
    vu.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(dyn.level2[i]));
  return (uv - vu).cwiseAbs().maxCoeff();
}

std::size_t flat_trace_discrete(const EquivariantDynamics& dyn, int level, unsigned t) {
  if (t == 0) throw PreconditionError("flat trace needs t >= 1");
  if (level != 1 && level != 2) throw PreconditionError("level must be 1 or 2");
  const auto& map = dyn.level(level);
  std::size_t count = 0;
  for (std::size_t q = 0; q < map.size(); ++q) {
    std::size_t y = q;
    for (unsigned s = 0; s < t; ++s) y = map[y];
    if (y == q) ++count;
  }
  return count;
}

std::size_t orbit_return_count(const CoverDiagram& d, const EquivariantDynamics& dyn, int level,
                               unsigned t) {
  if (t == 0) throw PreconditionError("orbit count needs t >= 1");
  if (level != 1 && level != 2) throw PreconditionError("level must be 1 or 2");
  const Subgroup& h = level == 1 ? d.h1 : d.h2;
  std::size_t count = 0;
  for (std::size_t x = 0; x < d.size(); ++x) {
    std::size_t y = x;
    for (unsigned s = 0; s < t; ++s) y = dyn.total[y];
    for (ElementId b : h.members())
      if (d.act(b, x) == y) {
        ++count;
        break;
      }
  }
  return count;
}

TraceReport verify_trace_equality(const CoverDiagram& d, const EquivariantDynamics& dyn, unsigned t_max,
                                  const RadonMatrix* radon, double conjugation_tol) {
  if (t_max == 0) throw PreconditionError("t_max must be positive");
  TraceReport rep;
  rep.gassmann = group::is_gassmann(d.group, d.h1, d.h2).verdict;
  rep.all_equal = true;
  for (unsigned t = 1; t <= t_max; ++t) {
    TraceRow row{t, flat_trace_discrete(dyn, 1, t), flat_trace_discrete(dyn, 2, t), false};
    row.equal = row.trace1 == row.trace2;
    rep.all_equal = rep.all_equal && row.equal;
    rep.rows.push_back(row);
  }

  if (radon != nullptr) {
    // tr(V_2^t) = tr(U V_1^t U*) when U intertwines.
    const Eigen::MatrixXcd& u = radon->matrix;
    const auto n1 = static_cast<Eigen::Index>(dyn.level1.size());
    Eigen::MatrixXcd v1 = Eigen::MatrixXcd::Zero(n1, n1);
    for (Eigen::Index q = 0; q < n1; ++q) v1(q, static_cast<Eigen::Index>(dyn.level1[static_cast<std::size_t>(q)])) = 1.0;
    const Eigen::MatrixXcd conj = u * v1 * u.adjoint();
    Eigen::MatrixXcd power = conj;
    double worst = 0.0;
    for (unsigned t = 1; t <= t_max; ++t) {
      if (t > 1) power = power * conj;
      worst = std::max(worst, std::abs(power.trace() - static_cast<double>(rep.rows[t - 1].trace2)));
    }
    rep.conjugation_residual = worst;
  }

  if (!rep.gassmann) {
    rep.verdict = Verdict::warning;
    rep.warning = "subgroups are not a Gassmann pair; trace equality is not guaranteed";
  } else {
    const bool conj_ok = !rep.conjugation_residual || *rep.conjugation_residual <= conjugation_tol;
    rep.verdict = rep.all_equal && conj_ok ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

std::vector<SeedResult> sweep_seeds(const CoverDiagram& d, const RadonMatrix* radon, unsigned t_max,
                                    std::uint64_t first_seed, std::size_t count, double conjugation_tol) {
  std::vector<SeedResult> out(count);
  parallel_for(count, [&](std::size_t i) {
    SeedResult& r = out[i];
    r.seed = first_seed + i;
    const auto dyn = random_equivariant_dynamics(d, r.seed);
    r.intertwining_residual = radon ? verify_intertwining(*radon, dyn) : std::nan("");
    r.report = verify_trace_equality(d, dyn, t_max, radon, conjugation_tol);
  });
  return out;
}

}  // namespace sunada::cover
