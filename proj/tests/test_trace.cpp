#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sunada/errors.hpp"
#include "sunada/lseries.hpp"
#include "sunada/rng.hpp"
#include "sunada/trace.hpp"

using namespace sunada;
using namespace sunada::zeta;

namespace {

constexpr double pi = std::numbers::pi;

geo::Manifold z2_torus() { return geo::FlatTorus{geo::Mat::Identity(2, 2)}; }
geo::Manifold torus_of_revolution() { return geo::SurfaceOfRevolution{geo::torus_profile(2.0, 1.0)}; }

std::vector<geo::ClosedOrbit> with_length(const std::vector<geo::ClosedOrbit>& all, double tau) {
  std::vector<geo::ClosedOrbit> out;
  for (const auto& o : all)
    if (std::abs(o.length - tau) < 1e-6) out.push_back(o);
  return out;
}

double weight_at(const LSeries& s, double tau) {
  for (const auto& e : s.entries)
    if (std::abs(e.tau - tau) < 1e-8) return e.weight;
  return std::nan("");
}

}  // namespace

TEST_SUITE("trace-zeta") {
  TEST_CASE("flat torus components at tau = 1 and sqrt 2") {
    const geo::Manifold m = z2_torus();
    const auto orbits = geo::find_closed_orbits(m, 1.5);
    const auto ones = classify_fixed_set(m, 1.0, with_length(orbits, 1.0));
    REQUIRE(ones.size() == 4);
    for (const auto& z : ones) {
      CHECK(z.dimension == 2);
      CHECK(z.clean);
      CHECK(z.transverse_determinant == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(z.canonical_volume == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(transverse_determinant(z) == doctest::Approx(1.0).epsilon(1e-9));
    }
    const auto diag = classify_fixed_set(m, std::sqrt(2.0), with_length(orbits, std::sqrt(2.0)));
    REQUIRE(diag.size() == 4);
    for (const auto& z : diag) CHECK(z.transverse_determinant == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }

  TEST_CASE("flat torus weights match the lattice oracle") {
    const TraceWeights tw = flat_trace_weights(z2_torus(), 3.0);
    const LSeries oracle = oracle_flat_torus(geo::Mat::Identity(2, 2), 3.0);
    REQUIRE(tw.series.entries.size() == oracle.entries.size());
    for (std::size_t i = 0; i < oracle.entries.size(); ++i) {
      CHECK(tw.series.entries[i].tau == doctest::Approx(oracle.entries[i].tau).epsilon(1e-8));
      CHECK(tw.series.entries[i].weight == doctest::Approx(oracle.entries[i].weight).epsilon(1e-6));
      CHECK(tw.series.entries[i].provenance == Provenance::computed);
    }
    CHECK(weight_at(tw.series, 1.0) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(weight_at(tw.series, std::sqrt(2.0)) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("oblique lattice agrees with its oracle") {
    geo::Mat b(2, 2);
    b << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2;
    const TraceWeights tw = flat_trace_weights(geo::FlatTorus{b}, 2.0);
    const LSeries oracle = oracle_flat_torus(b, 2.0);
    REQUIRE(tw.series.entries.size() == oracle.entries.size());
    for (std::size_t i = 0; i < oracle.entries.size(); ++i)
      CHECK(tw.series.entries[i].weight == doctest::Approx(oracle.entries[i].weight).epsilon(1e-6));
  }

  TEST_CASE("sphere: the whole bundle is fixed at 2 pi") {
    const geo::Manifold m = geo::RoundSphere{1.0};
    const TraceWeights tw = flat_trace_weights(m, 7.0);
    REQUIRE(tw.components.size() == 1);
    const FixedComponent& z = tw.components.front();
    CHECK(z.dimension == 3);
    CHECK(z.clean);
    CHECK(z.transverse_determinant == 1.0);
    CHECK(z.canonical_volume == doctest::Approx(8 * pi * pi).epsilon(1e-12));
    CHECK(weight_at(tw.series, 2 * pi) == doctest::Approx(8 * pi * pi).epsilon(1e-4));
  }

  TEST_CASE("isolated hyperbolic equator: Lefschetz reduction") {
    const geo::Manifold m = torus_of_revolution();
    const auto orbits = geo::find_closed_orbits(m, 7.0);
    const auto comps = classify_fixed_set(m, 2 * pi, with_length(orbits, 2 * pi));
    std::size_t isolated = 0;
    for (const auto& z : comps) {
      if (z.dimension != 1) continue;
      ++isolated;
      CHECK(z.clean);
      const geo::DetReport det = geo::det_I_minus_P(z.samples.front());
      CHECK(z.canonical_volume == doctest::Approx(z.samples.front().prime_period).epsilon(1e-12));
      CHECK(z.weight == doctest::Approx(z.samples.front().prime_period / std::abs(det.direct)).epsilon(1e-6));
      CHECK(z.weight == doctest::Approx(2 * pi / std::abs(2 - 2 * std::cosh(2 * pi))).epsilon(1e-6));
    }
    CHECK(isolated == 2);  // both orientations of the inner equator
  }

  TEST_CASE("transverse determinant is invariant under orthogonal change of frame") {
    const geo::Manifold m = torus_of_revolution();
    const auto orbits = geo::find_closed_orbits(m, 7.0);
    const auto eq = with_length(orbits, 2 * pi);
    Rng rng(3);
    for (const auto& o : eq) {
      const RankReport base = rank_report(o.monodromy);
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd r(3, 3);
        for (Eigen::Index i = 0; i < 9; ++i) r.data()[i] = rng.uniform(-1, 1);
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(r).householderQ();
        const geo::FrameMat rotated = q.transpose() * Eigen::MatrixXd(o.monodromy) * q;
        const RankReport rep = rank_report(rotated);
        CHECK(rep.kernel_dimension == base.kernel_dimension);
        CHECK(rep.determinant == doctest::Approx(base.determinant).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("surface of revolution two-dimensional families are measured by Monte Carlo") {
    const geo::Manifold m = torus_of_revolution();
    const TraceWeights a = flat_trace_weights(m, 7.0);
    const TraceWeights b = flat_trace_weights(m, 7.0);
    bool saw_family = false;
    for (const auto& z : a.components) {
      CHECK(z.clean);
      if (z.dimension != 2) continue;
      saw_family = true;
      CHECK(z.volume_std_error <= 0.011 * z.canonical_volume);
      CHECK(std::isfinite(z.weight));
      CHECK(z.weight > 0.0);
    }
    CHECK(saw_family);
    REQUIRE(a.series.entries.size() == b.series.entries.size());
    for (std::size_t i = 0; i < a.series.entries.size(); ++i) CHECK(a.series.entries[i].weight == b.series.entries[i].weight);
  }

  TEST_CASE("unclean component is refused") {
    FixedComponent z;
    z.clean = false;
    CHECK_THROWS_AS(transverse_determinant(z), PreconditionError);
  }

  TEST_CASE("rank report gap check") {
    geo::FrameMat m = geo::FrameMat::Zero(3, 3);
    m(0, 0) = 1e-5;  // I - M has singular values 1e-5, 5e-7, 0: no clear gap
    m(1, 1) = 5e-7;
    m = geo::FrameMat::Identity(3, 3) - m;
    const RankReport r = rank_report(m);
    CHECK_FALSE(r.gap_ok);
    geo::FrameMat clear = geo::FrameMat::Identity(3, 3);
    clear(1, 2) = 2.0;
    const RankReport ok = rank_report(clear);
    CHECK(ok.gap_ok);
    CHECK(ok.kernel_dimension == 2);
    CHECK(ok.determinant == doctest::Approx(2.0));
  }
}

TEST_SUITE("lseries") {
  TEST_CASE("oracle enumeration") {
    const LSeries one = oracle_flat_torus(geo::Mat::Identity(2, 2), 1.0);
    REQUIRE(one.entries.size() == 1);
    CHECK(one.entries[0].tau == 1.0);
    CHECK(one.entries[0].weight == 4.0);
    CHECK(one.entries[0].provenance == Provenance::oracle);

    const LSeries two = oracle_flat_torus(geo::Mat::Identity(2, 2), 1.5);
    REQUIRE(two.entries.size() == 2);
    CHECK(two.entries[1].tau == doctest::Approx(std::sqrt(2.0)));
    CHECK(two.entries[1].weight == doctest::Approx(2 * std::sqrt(2.0)));

    const LSeries cube = oracle_flat_torus(geo::Mat::Identity(3, 3), 1.0);
    REQUIRE(cube.entries.size() == 1);
    CHECK(cube.entries[0].weight == 6.0);
  }

  TEST_CASE("l_function_eval examples") {
    const LSeries single = make_series({{1.0, 4.0, Provenance::computed}}, 1.0);
    CHECK(l_function_eval(single, 1.0).partial_sum.real() == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-15));

    const LSeries torus = oracle_flat_torus(geo::Mat::Identity(2, 2), 3.0);
    double total = 0.0;
    std::complex<double> hand = 0.0;
    for (const auto& e : torus.entries) {
      total += e.weight;
      hand += e.weight * std::exp(-2.0 * e.tau);
    }
    CHECK(std::abs(l_function_eval(torus, 2.0).partial_sum - hand) <= 1e-12);

    const LValue at_zero = l_function_eval(torus, 0.0);
    CHECK(at_zero.partial_sum.real() == doctest::Approx(total).epsilon(1e-15));
    CHECK_FALSE(at_zero.tail_bound.has_value());
    CHECK_FALSE(at_zero.warning.empty());

    const std::complex<double> s(2.0, 3.0);
    std::complex<double> hand_c = 0.0;
    for (const auto& e : torus.entries) hand_c += e.weight * std::exp(-s * e.tau);
    CHECK(std::abs(l_function_eval(torus, s).partial_sum - hand_c) <= 1e-12);
  }

  TEST_CASE("tail bounds and monotone partial sums") {
    const geo::Mat id = geo::Mat::Identity(2, 2);
    double previous = 0.0;
    for (double l_max : {1.0, 2.0, 3.0, 4.0, 5.0}) {
      const double v = l_function_eval(oracle_flat_torus(id, l_max), 2.0).partial_sum.real();
      CHECK(v >= previous);
      previous = v;
    }
    const LValue three = l_function_eval(oracle_flat_torus(id, 3.0), 2.0);
    const LValue five = l_function_eval(oracle_flat_torus(id, 5.0), 2.0);
    REQUIRE(three.tail_bound.has_value());
    CHECK(std::abs(five.partial_sum - three.partial_sum) <= *three.tail_bound);
  }

  TEST_CASE("make_series merges and validates") {
    const LSeries s = make_series({{2.0, 1.0, Provenance::computed},
                                   {1.0, 1.0, Provenance::computed},
                                   {1.0 + 1e-10, 0.5, Provenance::computed}},
                                  3.0);
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].weight == doctest::Approx(1.5));
    CHECK_THROWS_AS(make_series({{-1.0, 1.0, Provenance::computed}}, 3.0), PreconditionError);
    CHECK_THROWS_AS(make_series({{1.0, std::nan(""), Provenance::computed}}, 3.0), PreconditionError);
    CHECK_THROWS_AS(l_function_eval(LSeries{}, 2.0), PreconditionError);
  }
}
