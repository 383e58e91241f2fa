#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sunada/errors.hpp"
#include "sunada/flow.hpp"
#include "sunada/manifold.hpp"
#include "sunada/orbits.hpp"

using namespace sunada;
using namespace sunada::geo;

namespace {

constexpr double pi = std::numbers::pi;

Manifold z2_torus() { return FlatTorus{Mat::Identity(2, 2)}; }
Manifold unit_sphere() { return RoundSphere{1.0}; }
Manifold torus_of_revolution() { return SurfaceOfRevolution{torus_profile(2.0, 1.0)}; }
Manifold catenoid() { return SurfaceOfRevolution{catenoid_profile(1.0, 2.0)}; }

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

PhasePoint equator_point() { return from_velocity(unit_sphere(), vec2(pi / 2, 0.3), vec2(0.0, 1.0)); }

const ClosedOrbit* find_orbit(const std::vector<ClosedOrbit>& orbits, double length, double u) {
  for (const auto& o : orbits)
    if (std::abs(o.length - length) < 1e-6 && std::abs(o.start.x(0) - u) < 1e-6) return &o;
  return nullptr;
}

}  // namespace

TEST_SUITE("geoflow") {
  TEST_CASE("Hamilton equations on the sphere equator") {
    const PhasePoint p = equator_point();
    const PhaseVec rhs = hamilton_rhs(unit_sphere(), p);
    CHECK(rhs(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rhs(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(rhs(2)) < 1e-14);
    CHECK(std::abs(rhs(3)) < 1e-14);
  }

  TEST_CASE("Clairaut constant along a surface of revolution") {
    const Manifold m = torus_of_revolution();
    const PhasePoint p0 = from_velocity(m, vec2(pi, 0.0), vec2(0.6, 0.2));
    const FlowPath path = integrate_flow(m, p0, 20.0);
    const double c0 = first_integrals(m, p0)(0);
    const auto& prof = std::get<SurfaceOfRevolution>(m).profile;
    double worst = 0.0;
    for (const PhasePoint& p : path.points) {
      worst = std::max(worst, std::abs(first_integrals(m, p)(0) - c0));
      // f^2 dtheta/dt equals xi_theta.
      const double f = prof.f(p.x(0));
      const double theta_dot = hamilton_rhs(m, p)(1);
      CHECK(std::abs(f * f * theta_dot - c0) < 1e-9);
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("zero-time flow returns the start point") {
    const PhasePoint p0 = equator_point();
    const FlowPath path = integrate_flow(unit_sphere(), p0, 0.0);
    REQUIRE_FALSE(path.points.empty());
    CHECK(path.points.back().x == p0.x);
    CHECK(path.points.back().xi == p0.xi);
    const FlowJet jet = integrate_monodromy(unit_sphere(), p0, 0.0);
    CHECK(jet.monodromy.isApprox(FrameMat::Identity(3, 3), 0.0));
  }

  TEST_CASE("great circles close after 2 pi") {
    const Manifold m = unit_sphere();
    for (const PhasePoint& p0 : {equator_point(), from_velocity(m, vec2(1.0, 2.0), vec2(0.3, -0.7))}) {
      const FlowPath path = integrate_flow(m, p0, 2 * pi);
      CHECK(phase_distance(m, p0, path.points.back()) <= 1e-8);
      CHECK(path.max_energy_drift <= 1e-10);
    }
  }

  TEST_CASE("straight lines on the flat torus") {
    const Manifold m = z2_torus();
    const PhasePoint p0 = from_velocity(m, vec2(0.0, 0.0), vec2(1.0, 0.0));
    const FlowPath path = integrate_flow(m, p0, 1.0);
    const PhasePoint& end = path.points.back();
    CHECK(end.x(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(end.x(1)) < 1e-12);
    CHECK(end.xi == p0.xi);
    CHECK(phase_distance(m, p0, end) < 1e-12);
  }

  TEST_CASE("Jacobi blocks of the sphere and the torus") {
    const double tau = 1.3;
    const FlowJet s = integrate_monodromy(unit_sphere(), equator_point(), tau);
    FrameMat rot = FrameMat::Identity(3, 3);
    rot(1, 1) = std::cos(tau);
    rot(1, 2) = std::sin(tau);
    rot(2, 1) = -std::sin(tau);
    rot(2, 2) = std::cos(tau);
    CHECK((s.monodromy - rot).cwiseAbs().maxCoeff() <= 1e-6);

    const Manifold t = z2_torus();
    const FlowJet j = integrate_monodromy(t, from_velocity(t, vec2(0.1, 0.2), vec2(0.6, 0.8)), tau);
    FrameMat shear = FrameMat::Identity(3, 3);
    shear(1, 2) = tau;
    CHECK((j.monodromy - shear).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("monodromy columns match finite differences") {
    const double delta = 1e-6;
    struct Case {
      Manifold m;
      PhasePoint p0;
      double t;
    };
    const std::vector<Case> cases{
        {z2_torus(), from_velocity(z2_torus(), vec2(0.1, 0.2), vec2(0.6, 0.8)), 2.0},
        {unit_sphere(), from_velocity(unit_sphere(), vec2(1.0, 2.0), vec2(0.3, -0.7)), 2.0},
        {torus_of_revolution(), from_velocity(torus_of_revolution(), vec2(2.0, 0.5), vec2(0.4, 0.2)), 3.0},
        {catenoid(), from_velocity(catenoid(), vec2(0.0, 0.5), vec2(0.3, 0.5)), 1.0}};
    for (const Case& c : cases) {
      const FlowJet jet = integrate_monodromy(c.m, c.p0, c.t);
      for (Eigen::Index col = 0; col < jet.monodromy.cols(); ++col) {
        FrameVec step = FrameVec::Zero(jet.monodromy.rows());
        step(col) = delta;
        const PhasePoint moved = shift(c.m, c.p0, step);
        const PhasePoint end = integrate_flow(c.m, moved, c.t).points.back();
        const FrameVec fd = coords_to_frame(c.m, jet.endpoint) * displacement(c.m, jet.endpoint, end) / delta;
        CHECK((fd - jet.monodromy.col(col)).cwiseAbs().maxCoeff() <= 1e-4);
      }
      CHECK(jet.symplectic_residual <= 1e-6);
      CHECK(jet.flow_residual <= 1e-8);
    }
  }

  TEST_CASE("closed orbits of the flat torus") {
    // Each direction is a two-dimensional family; the search may return several members of it.
    const auto orbits = find_closed_orbits(z2_torus(), 1.5);
    const auto directions = [&](double length) {
      std::vector<Vec> seen;
      for (const auto& o : orbits) {
        if (std::abs(o.length - length) >= 1e-9) continue;
        CHECK(o.prime_period == doctest::Approx(length));
        const Vec xi = o.start.xi;
        if (std::none_of(seen.begin(), seen.end(), [&](const Vec& v) { return (v - xi).norm() < 1e-6; })) seen.push_back(xi);
      }
      return seen.size();
    };
    for (const auto& o : orbits) CHECK(o.degenerate);
    CHECK(directions(1.0) == 4);
    CHECK(directions(std::sqrt(2.0)) == 4);
  }

  TEST_CASE("equators of the torus of revolution") {
    const Manifold m = torus_of_revolution();
    const auto orbits = find_closed_orbits(m, 7.0);
    const ClosedOrbit* inner = find_orbit(orbits, 2 * pi, pi);
    REQUIRE(inner != nullptr);
    for (const auto& o : orbits) CHECK(o.length <= 7.0);
    CHECK(find_orbit(orbits, 6 * pi, 0.0) == nullptr);

    // Scalar Jacobi oracle: curvature -1 along the inner equator.
    const PoincareBlocks pb = poincare_map(*inner);
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(pb.p));
    std::vector<double> ev{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(std::exp(-2 * pi)).epsilon(1e-6));
    CHECK(ev[1] == doctest::Approx(std::exp(2 * pi)).epsilon(1e-6));

    const DetReport det = det_I_minus_P(*inner);
    CHECK(det.direct == doctest::Approx(2 - 2 * std::cosh(2 * pi)).epsilon(1e-6));
    REQUIRE(det.schur.has_value());
    CHECK(det.schur_gap <= 1e-8);
    CHECK_FALSE(det.degenerate);
  }

  TEST_CASE("time reversal pairs orbits") {
    const Manifold m = torus_of_revolution();
    const auto orbits = find_closed_orbits(m, 7.0);
    for (const auto& o : orbits) {
      bool partner = false;
      for (const auto& q : orbits) {
        if (std::abs(q.length - o.length) > 1e-6) continue;
        PhasePoint rev = o.start;
        rev.xi = -rev.xi;
        ClosedOrbit reversed = o;
        reversed.start = rev;
        if (same_orbit(m, q, reversed, 1e-6)) {
          partner = true;
          CHECK(std::abs(std::abs(det_I_minus_P(q).direct) - std::abs(det_I_minus_P(o).direct)) <=
                1e-6 * std::max(1.0, std::abs(det_I_minus_P(o).direct)));
        }
      }
      CHECK(partner);
    }
  }

  TEST_CASE("sphere orbits are great circles") {
    const auto orbits = find_closed_orbits(unit_sphere(), 7.0);
    REQUIRE_FALSE(orbits.empty());
    for (const auto& o : orbits) {
      CHECK(o.prime_period == doctest::Approx(2 * pi).epsilon(1e-8));
      const PoincareBlocks pb = poincare_map(o);
      CHECK((pb.p - FrameMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK(o.degenerate);
    }
  }

  TEST_CASE("flat torus Poincare blocks and degenerate determinant") {
    const auto orbits = find_closed_orbits(z2_torus(), 1.5);
    REQUIRE_FALSE(orbits.empty());
    for (const auto& o : orbits) {
      const PoincareBlocks pb = poincare_map(o);
      CHECK(std::abs(pb.a(0, 0) - 1.0) <= 1e-9);
      CHECK(std::abs(pb.b(0, 0) - o.length) <= 1e-9);
      CHECK(std::abs(pb.c(0, 0)) <= 1e-9);
      CHECK(std::abs(pb.d(0, 0) - 1.0) <= 1e-9);
      const DetReport det = det_I_minus_P(o);
      CHECK(det.degenerate);
      CHECK(std::abs(det.direct) <= 1e-8);
      // C = 0: det(I - P) = det(I - A) det(I - D).
      CHECK(std::abs(det.direct - (1 - pb.a(0, 0)) * (1 - pb.d(0, 0))) <= 1e-8);
      CHECK_FALSE(det.schur.has_value());
      CHECK_FALSE(det.notice.empty());
    }
  }

  TEST_CASE("invalid manifolds are rejected") {
    CHECK_THROWS_AS(validate(RoundSphere{-1.0}), PreconditionError);
    CHECK_THROWS_AS(validate(FlatTorus{Mat::Zero(2, 2)}), PreconditionError);
    CHECK_THROWS_AS(validate(SurfaceOfRevolution{torus_profile(1.0, 2.0)}), PreconditionError);
  }

  TEST_CASE("leaving the catenoid chart is a numerical error") {
    const Manifold m = catenoid();
    const PhasePoint p0 = from_velocity(m, vec2(0.0, 0.0), vec2(1.0, 0.0));
    CHECK_THROWS_AS(integrate_flow(m, p0, 10.0), NumericalError);
  }
}
