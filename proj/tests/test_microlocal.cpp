#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sunada/errors.hpp"
#include "sunada/microlocal.hpp"
#include "sunada/rng.hpp"

using namespace sunada;
using namespace sunada::micro;

namespace {

constexpr double pi = std::numbers::pi;
const Complex i_unit(0.0, 1.0);

std::vector<double> sampled(double (*f)(double), std::size_t m) {
  std::vector<double> s(m);
  for (std::size_t k = 0; k < m; ++k) s[k] = f(2 * pi * static_cast<double>(k) / static_cast<double>(m));
  return s;
}

}  // namespace

TEST_SUITE("microlocal") {
  TEST_CASE("oscillatory integral closed forms") {
    const PhaseProblem zero = zero_amplitude_problem();
    CHECK(std::abs(oscillatory_integral(zero, 50.0).value) == 0.0);

    const PhaseProblem flat = constant_problem(1, 0.3);
    const double h = 70.0;
    // a = 1 + cos(x)/2 integrates to 2 pi on [0, 2 pi).
    const Complex expected = std::exp(i_unit * (h * 0.3)) * (2 * pi);
    CHECK(std::abs(oscillatory_integral(flat, h).value - expected) <= 1e-12);

    const PhaseProblem cosx = cos_x_problem();
    CHECK(std::abs(oscillatory_integral(cosx, 50.0).value - 2 * pi * std::cyl_bessel_j(0.0, 50.0)) <= 1e-6);
  }

  TEST_CASE("oscillatory integral is linear in the amplitude") {
    Rng rng(17);
    PhaseProblem p = cos_x_problem();
    for (int trial = 0; trial < 5; ++trial) {
      const double c1 = rng.uniform(-2, 2);
      const double c2 = rng.uniform(-2, 2);
      const double w = rng.uniform(1, 4);
      const double lambda = rng.uniform(-3, 3);
      const auto a1 = [c1](const Point& x) { return c1 + std::sin(x(0)); };
      const auto a2 = [c2, w](const Point& x) { return std::exp(c2 * std::cos(w * x(0))); };
      const auto eval = [&](std::function<double(const Point&)> a) {
        p.amplitude = std::move(a);
        return oscillatory_integral(p, 60.0, 1024, 1.0).value;  // tol 1: exactly one doubling, fixed grid
      };
      const Complex lhs = eval([&](const Point& x) { return a1(x) + lambda * a2(x); });
      const Complex rhs = eval(a1) + lambda * eval(a2);
      CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
  }

  TEST_CASE("explicit grid coarser than the oscillation is rejected") {
    CHECK_THROWS_AS(oscillatory_integral(cos_x_problem(), 400.0, 64), PreconditionError);
    CHECK_THROWS_AS(oscillatory_integral(cos_x_problem(), -1.0), PreconditionError);
  }

  TEST_CASE("stationary phase predictions") {
    const double h = 80.0;
    const Complex cosx = std::sqrt(2 * pi / h) *
                         (std::exp(-i_unit * pi / 4.0) * std::exp(i_unit * h) + std::exp(i_unit * pi / 4.0) * std::exp(-i_unit * h));
    CHECK(std::abs(stationary_phase_prediction(cos_x_problem(), h) - cosx) <= 1e-12);

    const Complex circles = std::sqrt(2 * pi / h) * 2 * pi *
                            (std::exp(i_unit * pi / 4.0) * std::exp(-i_unit * h) + std::exp(-i_unit * pi / 4.0) * std::exp(i_unit * h));
    CHECK(std::abs(stationary_phase_prediction(cos_y_torus_problem(), h) - circles) <= 1e-10);

    CHECK(std::abs(stationary_phase_prediction(zero_amplitude_problem(), h)) == 0.0);
  }

  TEST_CASE("validate_stationary_phase on cos x") {
    const StationaryPhaseReport r = validate_stationary_phase(cos_x_problem(), {50, 100, 200, 400});
    REQUIRE(r.slope.has_value());
    CHECK(*r.slope <= -0.8);
    CHECK(r.pass);
    for (const auto& row : r.rows) {
      REQUIRE(row.exact_residual.has_value());
      CHECK(*row.exact_residual <= 1e-8);
    }
  }

  TEST_CASE("Gaussian-Fresnel integral sits at the quadrature floor") {
    const StationaryPhaseReport r = validate_stationary_phase(gaussian_fresnel_problem(), {50, 100, 200, 400});
    CHECK(r.pass);
    for (const auto& row : r.rows) {
      REQUIRE(row.exact_residual.has_value());
      CHECK(*row.exact_residual <= 1e-8);
    }
  }

  TEST_CASE("constant phase: the prediction is the integral") {
    for (int dim : {1, 2}) {
      const StationaryPhaseReport r = validate_stationary_phase(constant_problem(dim), {50, 100, 200, 400});
      CHECK(r.at_floor);
      CHECK(r.pass);
      for (const auto& row : r.rows) CHECK(row.scaled_residual <= 1e-8);
    }
  }

  TEST_CASE("zero amplitude") {
    const StationaryPhaseReport r = validate_stationary_phase(zero_amplitude_problem(), {50, 100, 200, 400});
    CHECK(r.at_floor);
    CHECK(r.pass);
  }

  TEST_CASE("bilinear phase predicts 2 pi / (h sigma) a(0)") {
    const PhaseProblem p = bilinear_problem(1.5);
    const double h = 40.0;
    CHECK(std::abs(stationary_phase_prediction(p, h) - Complex(2 * pi / (h * 1.5), 0.0)) <= 1e-12);
    const Complex exact = p.exact(h);
    CHECK(std::abs(oscillatory_integral(p, h).value - exact) <= 1e-8 * std::abs(exact));
  }

  TEST_CASE("fixture validation rejects a wrong signature") {
    PhaseProblem p = cos_x_problem();
    p.critical.front().signature = -p.critical.front().signature;
    CHECK_THROWS_AS(validate(p), PreconditionError);
    CHECK_THROWS_AS(make_problem("cos_x", "one", 3), PreconditionError);
    CHECK_THROWS_AS(make_problem("nonsense", "one", 1), PreconditionError);
    CHECK_THROWS_AS(validate_stationary_phase(cos_x_problem(), {50, 100}), PreconditionError);
  }

  TEST_CASE("mollifier normalisation") {
    for (int dim : {1, 2}) {
      const MollifierConfig c = make_mollifier(dim, 10.0);
      CHECK(c.normalization > 0.0);
      CHECK(bump(c, 1.0) == 0.0);
      CHECK(bump(c, 1.5) == 0.0);
      CHECK(bump(c, 0.0) > 0.0);
    }
    CHECK_THROWS_AS(make_mollifier(1, 0.5), PreconditionError);
  }

  TEST_CASE("mollifying a constant gives the constant") {
    for (double h : {5.0, 20.0, 100.0}) {
      std::size_t m = 16;
      while (2 * pi / static_cast<double>(m) > 1.0 / (10.0 * h)) m *= 2;
      const std::vector<double> out = mollify(std::vector<double>(m, 1.0), 1, 2 * pi, h);
      for (double v : out) CHECK(std::abs(v - 1.0) <= 1e-8);
    }
    const std::vector<double> two(256 * 256, 1.0);
    for (double v : mollify(two, 2, 2 * pi, 4.0)) CHECK(std::abs(v - 1.0) <= 1e-8);
  }

  TEST_CASE("mollified sine") {
    const std::size_t m = 8192;
    const std::vector<double> s = sampled([](double x) { return std::sin(x); }, m);
    double previous = 1.0;
    for (double h : {10.0, 30.0, 100.0}) {
      const std::vector<double> out = mollify(s, 1, 2 * pi, h);
      double err = 0.0;
      for (std::size_t k = 0; k < m; ++k) err = std::max(err, std::abs(out[k] - s[k]));
      CHECK(err < previous);
      previous = err;
    }
    CHECK(previous <= 1e-4);
    CHECK(previous >= 1e-6);
    CHECK_THROWS_AS(mollify(sampled([](double x) { return std::sin(x); }, 64), 1, 2 * pi, 100.0), PreconditionError);
  }

  TEST_CASE("mollification error order") {
    const std::vector<double> hs{10, 20, 50, 100};
    const MollifyOrderReport sin1 = mollification_error_order([](double x) { return std::sin(x); }, hs);
    REQUIRE(sin1.slope.has_value());
    CHECK(*sin1.slope >= -2.3);
    CHECK(*sin1.slope <= -1.7);
    CHECK(sin1.pass);

    const MollifyOrderReport sin3 = mollification_error_order([](double x) { return std::sin(3 * x); }, hs);
    REQUIRE(sin3.slope.has_value());
    CHECK(sin3.pass);
    const double ratio = sin3.rows.back().sup_error / sin1.rows.back().sup_error;
    CHECK(ratio == doctest::Approx(9.0).epsilon(0.05));

    const MollifyOrderReport flat = mollification_error_order([](double) { return 2.0; }, hs);
    CHECK(flat.at_floor);
    CHECK_FALSE(flat.slope.has_value());

    CHECK_THROWS_AS(mollification_error_order([](double x) { return std::sin(x); }, {10, 20}), PreconditionError);
  }

  TEST_CASE("log-log slope of an exact power law") {
    CHECK(log_log_slope({1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625}) == doctest::Approx(-2.0));
  }
}
