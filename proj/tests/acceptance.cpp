// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Every tolerance and time limit is pinned below.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sunada/cover.hpp"
#include "sunada/flow.hpp"
#include "sunada/group.hpp"
#include "sunada/intertwiner.hpp"
#include "sunada/lseries.hpp"
#include "sunada/microlocal.hpp"
#include "sunada/orbits.hpp"
#include "sunada/trace.hpp"

using namespace sunada;

namespace {

constexpr double pi = std::numbers::pi;

namespace tol {
constexpr double intertwiner = 1e-10;
constexpr double intertwining = 1e-9;
constexpr double great_circle_closure = 1e-8;
constexpr double jacobi_rotation = 1e-6;
constexpr double equator_det_rel = 1e-6;
constexpr double schur_rel = 1e-8;
constexpr double oracle_rel = 1e-6;
constexpr double sphere_weight_rel = 1e-4;
constexpr double hand_sum = 1e-12;
constexpr double bessel = 1e-6;
constexpr double statphase_slope = -0.8;
constexpr double mollify_slope_lo = -2.3;
constexpr double mollify_slope_hi = -1.7;
constexpr double tie = 1e-4;
}  // namespace tol

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> body;
};

group::FiniteGroup g168() { return group::load_group_file(test::fixture("g168.grp")); }

group::Subgroup line_stabilizer(const group::FiniteGroup& g) {
  const std::vector<group::Point> line{0, 1, 3};
  return group::set_stabilizer(g, line);
}

geo::Vec vec2(double a, double b) {
  geo::Vec v(2);
  v << a, b;
  return v;
}

// 1
Outcome gassmann_certification() {
  const auto g = g168();
  const auto h1 = group::point_stabilizer(g, 0);
  const auto h2 = line_stabilizer(g);
  const auto cert = group::is_gassmann(g, h1, h2);
  const bool non_conjugate = !group::conjugating_element(h1, h2).has_value();
  const bool counts_equal = cert.counts_h1 == cert.counts_h2;
  return {g.order() == 168 && cert.verdict && counts_equal && non_conjugate,
          "|G| = " + std::to_string(g.order()) + ", " + std::to_string(cert.class_sizes.size()) +
              " classes, verdict " + (cert.verdict ? "true" : "false") + ", non-conjugate " +
              (non_conjugate ? "true" : "false")};
}

// 2
Outcome intertwiner() {
  const auto g = g168();
  const auto k = group::intertwiner_solve(g, group::point_stabilizer(g, 0), line_stabilizer(g), 1);
  const auto r = group::verify_intertwiner(k, tol::intertwiner);
  const double worst = std::max({r.unitarity, r.equivariance, r.constancy});
  return {r.passed && worst <= tol::intertwiner, "max residual " + num(worst)};
}

struct SeedSweep {
  cover::CoverDiagram diagram;
  std::vector<cover::SeedResult> results;
};

SeedSweep gassmann_sweep() {
  const auto g = g168();
  auto d = cover::build_cover(g, group::point_stabilizer(g, 0), line_stabilizer(g));
  const auto u = cover::lift_radon(group::intertwiner_solve(g, d.h1, d.h2, 1), d);
  auto results = cover::sweep_seeds(d, &u, 50, 1, 100);
  return {std::move(d), std::move(results)};
}

// 3
Outcome intertwining_dynamics() {
  const SeedSweep s = gassmann_sweep();
  double worst = 0.0;
  for (const auto& r : s.results) worst = std::max(worst, r.intertwining_residual);
  return {s.results.size() == 100 && worst <= tol::intertwining,
          std::to_string(s.results.size()) + " seeds, max ||U V1 - V2 U|| = " + num(worst)};
}

// 4
Outcome discrete_trace_equality() {
  const SeedSweep s = gassmann_sweep();
  std::size_t rows = 0;
  std::size_t equal = 0;
  for (const auto& r : s.results)
    for (const auto& row : r.report.rows) {
      ++rows;
      equal += row.trace1 == row.trace2;
    }

  const std::vector<std::string> s3_gens{"(0 1 2)", "(0 1)"};
  const auto s3 = group::parse_group(s3_gens, 3);
  const auto sub = [&](const char* c) {
    return group::Subgroup::generated_by(s3, std::vector<group::ElementId>{*s3.find(group::parse_cycles(c, 3))});
  };
  const auto control = cover::build_cover(s3, sub("(0 1)"), sub("(0 1 2)"));
  std::size_t unequal_control = 0;
  for (const auto& r : cover::sweep_seeds(control, nullptr, 50, 1, 100))
    for (const auto& row : r.report.rows) unequal_control += row.trace1 != row.trace2;

  return {rows == 5000 && equal == rows && unequal_control > 0,
          std::to_string(equal) + "/" + std::to_string(rows) + " rows equal; control has " +
              std::to_string(unequal_control) + " unequal rows"};
}

// 5
Outcome great_circle() {
  const geo::Manifold m = geo::RoundSphere{1.0};
  const geo::PhasePoint p0 = geo::from_velocity(m, vec2(1.1, 0.4), vec2(0.3, 0.8));
  const geo::FlowPath path = geo::integrate_flow(m, p0, 2 * pi);
  const double closure = geo::phase_distance(m, p0, path.points.back());
  double worst = 0.0;
  for (double t : {0.7, 2.0, pi, 2 * pi}) {
    const geo::FlowJet jet = geo::integrate_monodromy(m, p0, t);
    geo::FrameMat expected = geo::FrameMat::Identity(3, 3);
    expected(1, 1) = std::cos(t);
    expected(1, 2) = std::sin(t);
    expected(2, 1) = -std::sin(t);
    expected(2, 2) = std::cos(t);
    worst = std::max(worst, (jet.monodromy - expected).cwiseAbs().maxCoeff());
  }
  return {closure <= tol::great_circle_closure && worst <= tol::jacobi_rotation,
          "closure " + num(closure) + ", max Jacobi rotation deviation " + num(worst)};
}

// 6
Outcome poincare_schur() {
  const geo::Manifold m = geo::SurfaceOfRevolution{geo::torus_profile(2.0, 1.0)};
  const auto orbits = geo::find_closed_orbits(m, 7.0);
  const double oracle = 2 - 2 * std::cosh(2 * pi);
  for (const auto& o : orbits) {
    if (std::abs(o.length - 2 * pi) > 1e-6 || std::abs(o.start.x(0) - pi) > 1e-6) continue;
    const geo::DetReport d = geo::det_I_minus_P(o);
    const double rel = std::abs(d.direct - oracle) / std::abs(oracle);
    const bool schur_ok = d.schur && d.schur_gap <= tol::schur_rel;
    return {rel <= tol::equator_det_rel && schur_ok,
            "det(I - P) = " + num(d.direct) + " (oracle " + num(oracle) + ", rel " + num(rel) + "), Schur gap " +
                (d.schur ? num(d.schur_gap) : std::string("n/a"))};
  }
  return {false, "inner equator not found"};
}

// 7
Outcome torus_weights() {
  const zeta::TraceWeights tw = zeta::flat_trace_weights(geo::FlatTorus{geo::Mat::Identity(2, 2)}, 3.0);
  const zeta::LSeries oracle = zeta::oracle_flat_torus(geo::Mat::Identity(2, 2), 3.0);
  if (tw.series.entries.size() != oracle.entries.size())
    return {false, "computed " + std::to_string(tw.series.entries.size()) + " lengths, oracle " +
                       std::to_string(oracle.entries.size())};
  double worst = 0.0;
  for (std::size_t i = 0; i < oracle.entries.size(); ++i) {
    if (std::abs(tw.series.entries[i].tau - oracle.entries[i].tau) > 1e-8) return {false, "length mismatch"};
    worst = std::max(worst, std::abs(tw.series.entries[i].weight - oracle.entries[i].weight) / oracle.entries[i].weight);
  }
  return {worst <= tol::oracle_rel, std::to_string(oracle.entries.size()) + " lengths, w(1) = " +
                                         num(tw.series.entries[0].weight) + ", w(sqrt 2) = " +
                                         num(tw.series.entries[1].weight) + ", max rel error " + num(worst)};
}

// 8
Outcome sphere_component() {
  const geo::Manifold m = geo::RoundSphere{1.0};
  const zeta::TraceWeights tw = zeta::flat_trace_weights(m, 13.0);
  const double target = 8 * pi * pi;
  std::map<int, const zeta::FixedComponent*> at;  // iterate index -> component
  std::size_t count[3] = {0, 0, 0};
  for (const auto& z : tw.components) {
    const int k = static_cast<int>(std::lround(z.period / (2 * pi)));
    if (k >= 1 && k <= 2 && std::abs(z.period - 2 * pi * k) < 1e-6) {
      at[k] = &z;
      ++count[k];
    }
  }
  if (count[1] != 1 || count[2] != 1) return {false, "expected one component at each of 2 pi and 4 pi"};
  bool ok = true;
  std::string detail;
  for (int k : {1, 2}) {
    const auto& z = *at[k];
    const double rel = std::abs(z.weight - target) / target;
    ok = ok && z.clean && z.dimension == 3 && z.transverse_determinant == 1.0 && rel <= tol::sphere_weight_rel;
    detail += (k == 1 ? "tau = 2 pi: k = " : "; tau = 4 pi: k = ") + std::to_string(z.dimension) + ", weight " +
              num(z.weight);
  }
  return {ok, detail + " (8 pi^2 = " + num(target) + ")"};
}

// 9
Outcome l_function() {
  const geo::Manifold m = geo::FlatTorus{geo::Mat::Identity(2, 2)};
  const zeta::TraceWeights three = zeta::flat_trace_weights(m, 3.0);
  const zeta::TraceWeights five = zeta::flat_trace_weights(m, 5.0);
  const zeta::LValue v3 = zeta::l_function_eval(three.series, 2.0);
  const zeta::LValue v5 = zeta::l_function_eval(five.series, 2.0);
  std::complex<double> hand = 0.0;
  for (const auto& e : zeta::oracle_flat_torus(geo::Mat::Identity(2, 2), 3.0).entries)
    hand += e.weight * std::exp(-2.0 * e.tau);
  const double diff = std::abs(v3.partial_sum - hand);
  const double tail = std::abs(v5.partial_sum - v3.partial_sum);
  const bool bound_ok = v3.tail_bound && tail <= *v3.tail_bound;
  return {diff <= tol::hand_sum && bound_ok,
          "|L - hand sum| = " + num(diff) + ", L(5) - L(3) = " + num(tail) + " <= bound " +
              (v3.tail_bound ? num(*v3.tail_bound) : std::string("n/a"))};
}

// 10
Outcome stationary_phase() {
  const micro::PhaseProblem cosx = micro::cos_x_problem();
  const double bessel = std::abs(micro::oscillatory_integral(cosx, 50.0).value - 2 * pi * std::cyl_bessel_j(0.0, 50.0));
  const std::vector<double> hs{50, 100, 200, 400};
  const auto r1 = micro::validate_stationary_phase(cosx, hs, tol::statphase_slope);
  const auto r2 = micro::validate_stationary_phase(micro::cos_y_torus_problem(), hs, tol::statphase_slope);
  const bool ok = bessel <= tol::bessel && r1.slope && *r1.slope <= tol::statphase_slope && r2.slope &&
                  *r2.slope <= tol::statphase_slope;
  return {ok, "|I(50) - 2 pi J0(50)| = " + num(bessel) + ", slope cos x " + (r1.slope ? num(*r1.slope) : "n/a") +
                  ", slope T^2 circles " + (r2.slope ? num(*r2.slope) : "n/a")};
}

// 11
Outcome mollification() {
  const auto r = micro::mollification_error_order([](double x) { return std::sin(x); }, {10, 20, 50, 100});
  const bool ok = r.slope && *r.slope >= tol::mollify_slope_lo && *r.slope <= tol::mollify_slope_hi;
  return {ok, "slope " + (r.slope ? num(*r.slope) : std::string("n/a")) + " over h in [10, 100]"};
}

// 12
// Each flat-torus component at tau contributes vol(Z) times the leading
// stationary-phase term of the linearised phase -sigma theta s, whose
// normalised value (h / 2 pi) I(h) tends to 1 / sigma with an h^-2
// correction; one Richardson step removes it.
Outcome cross_module_tie() {
  const zeta::TraceWeights tw = zeta::flat_trace_weights(geo::FlatTorus{geo::Mat::Identity(2, 2)}, 1.5);
  double target = 0.0;
  for (const auto& e : tw.series.entries)
    if (std::abs(e.tau - 1.0) < 1e-8) target = e.weight;

  std::map<double, std::pair<double, double>> by_sigma;  // sigma -> (W(100), W(200)) per unit volume
  double w100 = 0.0;
  double w200 = 0.0;
  for (const auto& z : tw.components) {
    if (std::abs(z.period - 1.0) > 1e-8) continue;
    const double sigma = z.transverse_determinant;
    auto it = by_sigma.find(sigma);
    if (it == by_sigma.end()) {
      const micro::PhaseProblem p = micro::bilinear_problem(sigma);
      const auto normalised = [&](double h) { return (h / (2 * pi)) * micro::oscillatory_integral(p, h).value.real(); };
      it = by_sigma.emplace(sigma, std::pair{normalised(100.0), normalised(200.0)}).first;
    }
    w100 += z.canonical_volume * it->second.first;
    w200 += z.canonical_volume * it->second.second;
  }
  const double extrapolated = (4 * w200 - w100) / 3;
  const double err = std::abs(extrapolated - target);
  return {target > 0.0 && err <= tol::tie,
          "microlocal " + num(extrapolated) + " (W(100) = " + num(w100) + ", W(200) = " + num(w200) +
              ") vs trace-zeta weight " + num(target) + ", |diff| = " + num(err)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Gassmann certification", 5, gassmann_certification},
      {2, "Intertwiner residuals", 5, intertwiner},
      {3, "Intertwining of 100 seeded dynamics", 30, intertwining_dynamics},
      {4, "Discrete trace equality and control", 30, discrete_trace_equality},
      {5, "Great-circle closure and Jacobi rotation", 10, great_circle},
      {6, "Poincare determinant and Schur cross-check", 30, poincare_schur},
      {7, "Flat torus weights vs lattice oracle", 60, torus_weights},
      {8, "Sphere whole-bundle component", 60, sphere_component},
      {9, "L-function partial sums and tail bound", 10, l_function},
      {10, "Stationary phase residual decay", 60, stationary_phase},
      {11, "Mollification error order", 10, mollification},
      {12, "Microlocal vs trace-zeta torus weight", 60, cross_module_tie},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
