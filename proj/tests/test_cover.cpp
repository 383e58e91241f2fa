#include <doctest.h>

#include <numeric>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sunada/cover.hpp"
#include "sunada/errors.hpp"
#include "sunada/intertwiner.hpp"

using namespace sunada;
using namespace sunada::cover;
using group::ElementId;
using group::Point;

namespace {

FiniteGroup s3() {
  const std::vector<std::string> gens{"(0 1 2)", "(0 1)"};
  return group::parse_group(gens, 3);
}
FiniteGroup g168() { return group::load_group_file(test::fixture("g168.grp")); }

Subgroup generated(const FiniteGroup& g, const std::string& cycles) {
  const ElementId id = *g.find(group::parse_cycles(cycles, g.degree()));
  return Subgroup::generated_by(g, std::vector<ElementId>{id});
}

Subgroup line_stabilizer(const FiniteGroup& g) {
  const std::vector<Point> line{0, 1, 3};
  return group::set_stabilizer(g, line);
}

CoverDiagram gassmann_regular() {
  const FiniteGroup g = g168();
  return build_cover(g, group::point_stabilizer(g, 0), line_stabilizer(g));
}

ElementId element_of_order(const FiniteGroup& g, std::size_t order) {
  for (ElementId a = 1; a < g.order(); ++a) {
    ElementId p = a;
    std::size_t k = 1;
    while (p != g.identity()) {
      p = g.multiply(p, a);
      ++k;
    }
    if (k == order) return a;
  }
  throw std::logic_error("no element of that order");
}

}  // namespace

TEST_SUITE("cover") {
  TEST_CASE("quotient sizes") {
    const FiniteGroup s = s3();
    const CoverDiagram d = build_cover(s, generated(s, "(0 1)"), generated(s, "(0 2)"));
    CHECK(d.size() == 6);
    CHECK(d.quotient_size(1) == 3);
    CHECK(d.quotient_size(2) == 3);

    const CoverDiagram big = gassmann_regular();
    CHECK(big.quotient_size(1) == 7);
    CHECK(big.quotient_size(2) == 7);

    const FiniteGroup g = g168();
    const CoverDiagram prod = build_cover(g, Subgroup::trivial(g), Subgroup::trivial(g), Model::product, 3);
    CHECK(prod.size() == 3 * 168);
    CHECK(prod.quotient_size(1) == 3 * 168);
    CHECK(prod.quotient_size(2) == 3 * 168);
  }

  TEST_CASE("the action on the cover is free") {
    const CoverDiagram d = gassmann_regular();
    for (ElementId a = 1; a < d.group.order(); ++a)
      for (std::size_t x = 0; x < d.size(); x += 13) CHECK(d.act(a, x) != x);
  }

  TEST_CASE("Radon matrix for equal subgroups and identity kernel is the identity") {
    const FiniteGroup g = g168();
    const Subgroup h = group::point_stabilizer(g, 2);
    const CoverDiagram d = build_cover(g, h, h);
    const RadonMatrix u = lift_radon(group::identity_kernel(g, h), d);
    CHECK(unitarity_residual(u) == 0.0);

    const CoverDiagram t = build_cover(g, Subgroup::trivial(g), Subgroup::trivial(g));
    const RadonMatrix ut = lift_radon(group::identity_kernel(g, Subgroup::trivial(g)), t);
    CHECK(ut.matrix.isApprox(Eigen::MatrixXcd::Identity(168, 168), 0.0));
  }

  TEST_CASE("Radon matrix for the Gassmann pair is unitary") {
    const CoverDiagram d = gassmann_regular();
    const RadonMatrix u = lift_radon(group::intertwiner_solve(d.group, d.h1, d.h2, 4), d);
    CHECK(u.matrix.rows() == 7);
    CHECK(unitarity_residual(u) <= 1e-10);
  }

  TEST_CASE("identity dynamics") {
    const CoverDiagram d = gassmann_regular();
    const EquivariantDynamics id = translation_dynamics(d, d.group.identity());
    CHECK(id.equivariant);
    for (std::size_t x = 0; x < d.size(); ++x) CHECK(id.total[x] == x);
    for (int level : {1, 2}) CHECK(flat_trace_discrete(id, level, 5) == d.quotient_size(level));
    const RadonMatrix u = lift_radon(group::intertwiner_solve(d.group, d.h1, d.h2, 4), d);
    CHECK(verify_intertwining(u, id) <= 1e-12);
  }

  TEST_CASE("right translation acts on H1\\G with the cycle type of a") {
    const CoverDiagram d = gassmann_regular();
    for (ElementId a : {ElementId{1}, ElementId{5}, ElementId{17}, ElementId{100}}) {
      const EquivariantDynamics dyn = translation_dynamics(d, a);
      for (unsigned t = 1; t <= 8; ++t) {
        ElementId at = d.group.identity();
        for (unsigned k = 0; k < t; ++k) at = d.group.multiply(at, a);
        // Coset H1 g is fixed by right translation by a^t iff g a^t g^-1 lies in H1.
        std::size_t fixed = 0;
        for (std::size_t q = 0; q < d.quotient_size(1); ++q) {
          const auto g = static_cast<ElementId>(d.reps1[q]);
          fixed += d.h1.contains(d.group.multiply(d.group.multiply(g, at), d.group.inverse(g)));
        }
        CHECK(flat_trace_discrete(dyn, 1, t) == fixed);
      }
    }
  }

  TEST_CASE("a single seven-cycle has no fixed points below its length") {
    const CoverDiagram d = gassmann_regular();
    const EquivariantDynamics dyn = translation_dynamics(d, element_of_order(d.group, 7));
    for (unsigned t = 1; t < 7; ++t) CHECK(flat_trace_discrete(dyn, 1, t) == 0);
    CHECK(flat_trace_discrete(dyn, 1, 7) == 7);
  }

  TEST_CASE("product model with a fiber three-cycle") {
    const FiniteGroup g = g168();
    const CoverDiagram d =
        build_cover(g, group::point_stabilizer(g, 0), line_stabilizer(g), Model::product, 3);
    const EquivariantDynamics dyn = translation_dynamics(d, g.identity(), {1, 2, 0});
    CHECK(dyn.equivariant);
    for (int level : {1, 2})
      for (unsigned t = 1; t <= 9; ++t)
        CHECK(flat_trace_discrete(dyn, level, t) == (t % 3 == 0 ? d.quotient_size(level) : 0));
  }

  TEST_CASE("non-equivariant dynamics is rejected") {
    const CoverDiagram d = gassmann_regular();
    std::vector<std::size_t> total(d.size());
    std::iota(total.begin(), total.end(), std::size_t{0});
    std::swap(total[0], total[1]);  // moves two points of one orbit only
    CHECK_THROWS_AS(dynamics_from_map(d, total), PreconditionError);
    const EquivariantDynamics bad = dynamics_from_map(d, total, false);
    CHECK_FALSE(bad.equivariant);
    // Gassmann entries have modulus below 1, so the residual is bounded away from 1 yet far above 1e-9.
    const RadonMatrix u = lift_radon(group::intertwiner_solve(d.group, d.h1, d.h2, 4), d);
    CHECK(verify_intertwining(u, bad) >= 0.5);

    // A conjugate pair lifts to a permutation matrix: the same swap misses by a full unit.
    const Subgroup h = group::point_stabilizer(d.group, 0);
    for (ElementId c = 1; c < d.group.order(); c += 17) {
      if (h.contains(c)) continue;
      const Subgroup h2 = group::conjugate(h, c);
      const CoverDiagram e = build_cover(d.group, h, h2);
      const RadonMatrix p = lift_radon(group::conjugation_kernel(d.group, h, h2, c), e);
      CHECK(verify_intertwining(p, dynamics_from_map(e, total, false)) >= 1.0);
    }
  }

  TEST_CASE("seeded dynamics: intertwining, orbit counting and trace equality") {
    const CoverDiagram d = gassmann_regular();
    const RadonMatrix u = lift_radon(group::intertwiner_solve(d.group, d.h1, d.h2, 1), d);
    const auto results = sweep_seeds(d, &u, 50, 1, 100);
    REQUIRE(results.size() == 100);
    for (const SeedResult& r : results) {
      CHECK(r.intertwining_residual <= 1e-9);
      CHECK(r.report.all_equal);
      CHECK(r.report.verdict == Verdict::pass);
    }
    const EquivariantDynamics dyn = random_equivariant_dynamics(d, 42);
    for (int level : {1, 2})
      for (unsigned t = 1; t <= 50; ++t) {
        const std::size_t h = level == 1 ? d.h1.order() : d.h2.order();
        CHECK(orbit_return_count(d, dyn, level, t) == h * flat_trace_discrete(dyn, level, t));
      }
  }

  TEST_CASE("product model trace equality") {
    const FiniteGroup g = g168();
    const CoverDiagram d =
        build_cover(g, group::point_stabilizer(g, 0), line_stabilizer(g), Model::product, 3);
    const RadonMatrix u = lift_radon(group::intertwiner_solve(g, d.h1, d.h2, 2), d);
    for (const SeedResult& r : sweep_seeds(d, &u, 30, 7, 10)) {
      CHECK(r.intertwining_residual <= 1e-9);
      CHECK(r.report.verdict == Verdict::pass);
    }
  }

  TEST_CASE("conjugate subgroups give equal traces") {
    const FiniteGroup g = g168();
    const Subgroup h = group::point_stabilizer(g, 0);
    const CoverDiagram d = build_cover(g, h, group::conjugate(h, 9));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const TraceReport r = verify_trace_equality(d, random_equivariant_dynamics(d, seed), 50);
      CHECK(r.all_equal);
    }
  }

  TEST_CASE("non-Gassmann control") {
    const FiniteGroup s = s3();
    const CoverDiagram d = build_cover(s, generated(s, "(0 1)"), generated(s, "(0 1 2)"));
    bool unequal = false;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const TraceReport r = verify_trace_equality(d, random_equivariant_dynamics(d, seed), 50);
      CHECK(r.verdict == Verdict::warning);
      unequal = unequal || !r.all_equal;
    }
    CHECK(unequal);
  }

  TEST_CASE("precondition errors") {
    const CoverDiagram d = gassmann_regular();
    const EquivariantDynamics id = translation_dynamics(d, 0);
    CHECK_THROWS_AS(flat_trace_discrete(id, 3, 1), PreconditionError);
    CHECK_THROWS_AS(flat_trace_discrete(id, 1, 0), PreconditionError);
    CHECK_THROWS_AS(translation_dynamics(d, 1000), PreconditionError);
  }
}
