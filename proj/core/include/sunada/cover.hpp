#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sunada/defaults.hpp"
#include "sunada/group.hpp"
#include "sunada/intertwiner.hpp"

namespace sunada::cover {

using group::ElementId;
using group::FiniteGroup;
using group::IntertwinerKernel;
using group::Subgroup;

enum class Model { regular, product };

// Finite free G-set X = G x F with a·(g, f) = (ag, f), point index g·|F| + f,
// and its quotients X_i = H_i \ X. Each quotient point is an orbit H_i g × {f},
// numbered in order of its smallest point index.
struct CoverDiagram {
  FiniteGroup group;
  Subgroup h1;
  Subgroup h2;
  Model model = Model::regular;
  std::size_t fiber_size = 1;

  std::vector<std::size_t> project1;  // point -> X_1 index
  std::vector<std::size_t> project2;  // point -> X_2 index
  std::vector<std::size_t> reps1;     // X_1 index -> smallest point of the orbit
  std::vector<std::size_t> reps2;

  std::size_t size() const { return group.order() * fiber_size; }
  std::size_t quotient_size(int level) const { return level == 1 ? reps1.size() : reps2.size(); }
  std::size_t project(int level, std::size_t point) const {
    return level == 1 ? project1[point] : project2[point];
  }
  std::size_t act(ElementId a, std::size_t point) const {
    return group.multiply(a, static_cast<ElementId>(point / fiber_size)) * fiber_size + point % fiber_size;
  }
};

/// Regular model takes fiber_size 1. The action is checked to be free.
CoverDiagram build_cover(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                         Model model = Model::regular, std::size_t fiber_size = 1);

// Self-map of X together with the maps it induces on X_1 and X_2.
// `equivariant` records whether commutation with G and well-definedness on
// both quotients were verified.
struct EquivariantDynamics {
  std::vector<std::size_t> total;
  std::vector<std::size_t> level1;
  std::vector<std::size_t> level2;
  bool equivariant = false;

  const std::vector<std::size_t>& level(int i) const { return i == 1 ? level1 : level2; }
};

/// T(g, f) = (g c, sigma(f)). sigma defaults to the identity on F.
EquivariantDynamics translation_dynamics(const CoverDiagram& d, ElementId c,
                                         std::vector<std::size_t> sigma = {});

/// Right translation by a seeded random element and, in the product model,
/// a seeded random permutation of F.
EquivariantDynamics random_equivariant_dynamics(const CoverDiagram& d, std::uint64_t seed);

/// Arbitrary self-map of X. Quotient maps send an orbit to the orbit of the
/// image of its representative. With `require_equivariant` a map that fails
/// the checks throws PreconditionError.
EquivariantDynamics dynamics_from_map(const CoverDiagram& d, std::vector<std::size_t> total,
                                      bool require_equivariant = true);

struct RadonMatrix {
  IntertwinerKernel kernel;
  Eigen::MatrixXcd matrix;  // |X_2| x |X_1|
};

/// U = |H_1|^-1 sum_a A(a) p2_* T_a p1^*, with (T_a F)(x) = F(a^-1 x) and the
/// pushforward averaging over fibers. On indicators,
///   U[H_2 y × f, H_1 z × f'] = A(y z^-1) δ(f, f').
RadonMatrix lift_radon(const IntertwinerKernel& kernel, const CoverDiagram& d);

/// max(||U U* - I||_max, ||U* U - I||_max).
double unitarity_residual(const RadonMatrix& u);

/// ||U V_1 - V_2 U||_max with V_i the 0/1 composition matrices (V f)(q) = f(T_i q).
double verify_intertwining(const RadonMatrix& u, const EquivariantDynamics& dyn);

/// Fixed points of T_level^t.
std::size_t flat_trace_discrete(const EquivariantDynamics& dyn, int level, unsigned t);

/// #{x in X : T^t x in H_level x}; equals |H_level| times the flat trace.
std::size_t orbit_return_count(const CoverDiagram& d, const EquivariantDynamics& dyn, int level,
                               unsigned t);

enum class Verdict { pass, fail, warning };
std::string to_string(Verdict v);

struct TraceRow {
  unsigned t = 0;
  std::size_t trace1 = 0;
  std::size_t trace2 = 0;
  bool equal = false;
};

struct TraceReport {
  std::vector<TraceRow> rows;
  bool gassmann = false;
  bool all_equal = false;
  /// max_t |tr(U V_1^t U*) - tr(V_2^t)|; empty without a Radon matrix.
  std::optional<double> conjugation_residual;
  Verdict verdict = Verdict::fail;
  std::string warning;
};

/// Exact trace table for t = 1..t_max. Without a Gassmann certificate the
/// verdict is `warning`; otherwise it passes iff every row is equal and the
/// conjugation residual, when a Radon matrix is given, is within tolerance.
TraceReport verify_trace_equality(const CoverDiagram& d, const EquivariantDynamics& dyn,
                                  unsigned t_max = defaults::t_max, const RadonMatrix* radon = nullptr,
                                  double conjugation_tol = defaults::trace_conjugation_tol);

struct SeedResult {
  std::uint64_t seed = 0;
  double intertwining_residual = 0.0;  // NaN when no Radon matrix was supplied
  TraceReport report;
};

/// Runs seeds first_seed .. first_seed + count - 1 in parallel; results in seed order.
std::vector<SeedResult> sweep_seeds(const CoverDiagram& d, const RadonMatrix* radon, unsigned t_max,
                                    std::uint64_t first_seed, std::size_t count,
                                    double conjugation_tol = defaults::trace_conjugation_tol);

}  // namespace sunada::cover
