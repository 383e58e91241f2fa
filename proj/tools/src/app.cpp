#include "sunada_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "sunada/cover.hpp"
#include "sunada/errors.hpp"
#include "sunada/group.hpp"
#include "sunada/intertwiner.hpp"
#include "sunada/lseries.hpp"
#include "sunada/microlocal.hpp"
#include "sunada/orbits.hpp"
#include "sunada/trace.hpp"
#include "sunada_cli/inputs.hpp"
#include "sunada_cli/report.hpp"

namespace sunada::cli {

namespace {

// Every tolerance a user may override with --tol.<name>; all must be positive.
struct Tolerances {
  double intertwiner = defaults::intertwiner_tol;    // kernel unitarity / equivariance / constancy
  double intertwining = defaults::intertwining_tol;  // ||U V1 - V2 U|| and Radon unitarity
  double conjugation = defaults::trace_conjugation_tol;
  double closure = defaults::closure_tol;
  double merge = defaults::merge_tol;
  double rank = defaults::rank_tol;
  double oracle = 1e-6;  // relative weight agreement with the lattice oracle
  double schur = 1e-8;   // direct vs Schur-complement determinant
};

struct Common {
  std::string out = "-";
  std::string format;  // empty: subcommand default
  std::uint64_t seed = 1;
  Tolerances tol;
};

struct Outcome {
  std::string content;
  bool pass = true;
  Json failures = Json::array();
};

std::string format_of(const Common& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// Orbit lengths of a subgroup on the points {0 .. degree-1}, ascending.
std::vector<std::size_t> orbit_sizes(const group::Subgroup& h) {
  const group::FiniteGroup& g = h.parent();
  std::vector<std::size_t> parent(g.degree());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (group::ElementId e : h.members())
    for (group::Point x = 0; x < g.degree(); ++x) parent[find(x)] = find(g.apply(e, x));
  std::vector<std::size_t> count(g.degree(), 0);
  for (std::size_t x = 0; x < g.degree(); ++x) ++count[find(x)];
  std::vector<std::size_t> sizes;
  for (std::size_t c : count)
    if (c) sizes.push_back(c);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ---------------------------------------------------------------- gassmann

struct GassmannArgs {
  std::string group;
  std::string h1;
  std::string h2;
  std::optional<std::size_t> search;
};

Outcome gassmann_search_report(const group::FiniteGroup& g, std::size_t index, const Common& c) {
  const auto pairs = group::gassmann_search(g, index);
  Outcome o;
  if (format_of(c, "json") == "csv") {
    CsvTable t({"pair", "index", "h1_order", "h2_order", "h1_orbits", "h2_orbits"});
    for (std::size_t i = 0; i < pairs.size(); ++i)
      t.row().cell(i).cell(pairs[i].h1.index()).cell(pairs[i].h1.order()).cell(pairs[i].h2.order())
          .cell(join_sizes(orbit_sizes(pairs[i].h1))).cell(join_sizes(orbit_sizes(pairs[i].h2)));
    o.content = t.str();
    return o;
  }
  Json j;
  j["group_order"] = g.order();
  j["index_bound"] = index;
  j["pairs"] = Json::array();
  for (const auto& p : pairs)
    j["pairs"].push_back({{"index", p.h1.index()},
                          {"h1_order", p.h1.order()},
                          {"h2_order", p.h2.order()},
                          {"h1_orbits", orbit_sizes(p.h1)},
                          {"h2_orbits", orbit_sizes(p.h2)}});
  j["pass"] = true;
  o.content = to_text(j);
  return o;
}

Outcome gassmann(const GassmannArgs& a, const Common& c) {
  const group::FiniteGroup g = group::load_group_file(a.group);
  if (a.search) return gassmann_search_report(g, *a.search, c);
  if (a.h1.empty() || a.h2.empty()) throw ConfigError("--h1 and --h2 are required unless --search is given");
  const group::Subgroup h1 = parse_subgroup(g, a.h1);
  const group::Subgroup h2 = parse_subgroup(g, a.h2);

  const group::GassmannCertificate cert = group::is_gassmann(g, h1, h2);
  const auto conj = group::conjugating_element(h1, h2);
  Outcome o;
  if (!cert.verdict)
    o.failures.push_back({{"check", "gassmann"},
                          {"detail", cert.order_mismatch ? "subgroup orders differ" : "class intersection counts differ"}});

  std::optional<group::IntertwinerReport> iw;
  if (cert.verdict) {
    iw = group::verify_intertwiner(group::intertwiner_solve(g, h1, h2, c.seed), c.tol.intertwiner);
    if (!iw->passed)
      o.failures.push_back({{"check", "intertwiner"},
                            {"unitarity", iw->unitarity},
                            {"equivariance", iw->equivariance},
                            {"constancy", iw->constancy}});
  }
  o.pass = o.failures.empty();

  if (format_of(c, "json") == "csv") {
    CsvTable t({"class", "representative", "size", "count_h1", "count_h2"});
    for (std::size_t i = 0; i < cert.class_representatives.size(); ++i)
      t.row().cell(i).cell(group::format_cycles(g.element(cert.class_representatives[i])))
          .cell(cert.class_sizes[i]).cell(cert.counts_h1[i]).cell(cert.counts_h2[i]);
    o.content = t.str();
    return o;
  }
  Json j;
  j["group_order"] = g.order();
  j["h1_order"] = h1.order();
  j["h2_order"] = h2.order();
  j["classes"] = Json::array();
  for (std::size_t i = 0; i < cert.class_representatives.size(); ++i)
    j["classes"].push_back({{"representative", group::format_cycles(g.element(cert.class_representatives[i]))},
                            {"size", cert.class_sizes[i]},
                            {"count_h1", cert.counts_h1[i]},
                            {"count_h2", cert.counts_h2[i]}});
  j["counts_h1"] = cert.counts_h1;
  j["counts_h2"] = cert.counts_h2;
  j["verdict"] = cert.verdict;
  j["conjugate"] = conj.has_value();
  j["conjugating_element"] = conj ? Json(group::format_cycles(g.element(*conj))) : Json(nullptr);
  if (iw)
    j["intertwiner"] = {{"seed", c.seed},
                        {"unitarity", iw->unitarity},
                        {"equivariance", iw->equivariance},
                        {"constancy", iw->constancy},
                        {"tolerance", c.tol.intertwiner},
                        {"passed", iw->passed}};
  else
    j["intertwiner"] = nullptr;
  j["pass"] = o.pass;
  o.content = to_text(j);
  return o;
}

// ---------------------------------------------------------------- sunada

struct SunadaArgs {
  std::string diagram;
  unsigned t_max = defaults::t_max;
  std::size_t seeds = defaults::dynamics_seeds;
};

Outcome sunada(const SunadaArgs& a, const Common& c) {
  const DiagramSpec ds = load_diagram(a.diagram);
  const cover::CoverDiagram d = cover::build_cover(ds.group, ds.h1, ds.h2, ds.model, ds.fiber_size);
  const bool gassmann = group::is_gassmann(ds.group, ds.h1, ds.h2).verdict;

  Outcome o;
  std::optional<cover::RadonMatrix> radon;
  double unitarity = std::nan("");
  if (gassmann) {
    radon = cover::lift_radon(group::intertwiner_solve(ds.group, ds.h1, ds.h2, c.seed), d);
    unitarity = cover::unitarity_residual(*radon);
    if (!(unitarity <= c.tol.intertwining))
      o.failures.push_back({{"check", "radon_unitarity"}, {"residual", unitarity}});
  } else {
    o.failures.push_back({{"check", "gassmann"}, {"detail", "pair is not Gassmann; trace equality is not implied"}});
  }

  const auto results =
      cover::sweep_seeds(d, radon ? &*radon : nullptr, a.t_max, c.seed, a.seeds, c.tol.conjugation);

  std::size_t failing = 0;
  for (const auto& r : results) {
    const bool residual_ok = !gassmann || r.intertwining_residual <= c.tol.intertwining;
    const bool ok = r.report.verdict == cover::Verdict::pass && residual_ok;
    if (ok) continue;
    if (++failing > 10) continue;  // the summary lists the first ten
    Json f{{"check", "seed"}, {"seed", r.seed}, {"verdict", cover::to_string(r.report.verdict)}};
    if (gassmann) f["intertwining_residual"] = r.intertwining_residual;
    for (const auto& row : r.report.rows)
      if (!row.equal) {
        f["first_unequal"] = {{"t", row.t}, {"trace_level1", row.trace1}, {"trace_level2", row.trace2}};
        break;
      }
    o.failures.push_back(f);
  }
  if (failing > 10) o.failures.push_back({{"check", "seed"}, {"omitted", failing - 10}});
  o.pass = o.failures.empty();

  if (format_of(c, "csv") == "csv") {
    CsvTable t({"seed", "t", "trace_level1", "trace_level2", "equal"});
    for (const auto& r : results)
      for (const auto& row : r.report.rows)
        t.row().cell(std::to_string(r.seed)).cell(static_cast<std::size_t>(row.t)).cell(row.trace1)
            .cell(row.trace2).cell(row.equal);
    o.content = t.str();
    return o;
  }
  Json j;
  j["group_order"] = ds.group.order();
  j["h1_order"] = ds.h1.order();
  j["h2_order"] = ds.h2.order();
  j["model"] = ds.model == cover::Model::regular ? "regular" : "product";
  j["fiber_size"] = d.fiber_size;
  j["quotient_sizes"] = {d.quotient_size(1), d.quotient_size(2)};
  j["gassmann"] = gassmann;
  j["radon_unitarity"] = gassmann ? Json(unitarity) : Json(nullptr);
  j["t_max"] = a.t_max;
  j["seeds"] = Json::array();
  for (const auto& r : results) {
    Json s{{"seed", r.seed},
           {"intertwining_residual", gassmann ? Json(r.intertwining_residual) : Json(nullptr)},
           {"conjugation_residual", optional_number(r.report.conjugation_residual)},
           {"all_equal", r.report.all_equal},
           {"verdict", cover::to_string(r.report.verdict)}};
    if (!r.report.warning.empty()) s["warning"] = r.report.warning;
    j["seeds"].push_back(s);
  }
  j["pass"] = o.pass;
  o.content = to_text(j);
  return o;
}

// ---------------------------------------------------------------- flow

struct FlowArgs {
  std::string manifold;
  double l_max = 7.0;
};

geo::OrbitSearchOptions search_options(const Common& c) {
  geo::OrbitSearchOptions s;
  s.closure_tol = c.tol.closure;
  s.merge_tol = c.tol.merge;
  return s;
}

Outcome flow(const FlowArgs& a, const Common& c) {
  const geo::Manifold m = load_manifold(a.manifold);
  if (!(a.l_max > 0.0)) throw ConfigError("--lmax must be positive");
  geo::OrbitSearchStats stats;
  const auto orbits = geo::find_closed_orbits(m, a.l_max, search_options(c), &stats);
  const std::size_t n = geo::dimension(m);

  Outcome o;
  std::vector<geo::DetReport> dets;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    dets.push_back(geo::det_I_minus_P(orbits[i]));
    if (!(orbits[i].closure_error <= c.tol.closure))
      o.failures.push_back({{"check", "closure"}, {"orbit", i}, {"closure_error", orbits[i].closure_error}});
    if (dets.back().schur && !(dets.back().schur_gap <= c.tol.schur))
      o.failures.push_back({{"check", "schur"}, {"orbit", i}, {"gap", dets.back().schur_gap}});
  }
  o.pass = o.failures.empty();

  if (format_of(c, "csv") == "csv") {
    std::vector<std::string> header{"L", "L_prime", "det_I_minus_P", "det_schur", "degenerate_flag", "chart"};
    for (std::size_t k = 0; k < n; ++k) header.push_back("x" + std::to_string(k));
    for (std::size_t k = 0; k < n; ++k) header.push_back("xi" + std::to_string(k));
    header.insert(header.end(), {"closure_error", "source"});
    CsvTable t(header);
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      const auto& orb = orbits[i];
      t.row().cell(orb.length).cell(orb.prime_period).cell(dets[i].direct);
      if (dets[i].schur)
        t.cell(*dets[i].schur);
      else
        t.cell("");
      t.cell(dets[i].degenerate).cell(orb.start.chart);
      for (Eigen::Index k = 0; k < orb.start.x.size(); ++k) t.cell(orb.start.x(k));
      for (Eigen::Index k = 0; k < orb.start.xi.size(); ++k) t.cell(orb.start.xi(k));
      t.cell(orb.closure_error).cell(orb.source);
    }
    o.content = t.str();
    return o;
  }
  Json j;
  j["manifold"] = geo::kind_name(m);
  j["dimension"] = n;
  j["l_max"] = a.l_max;
  j["search"] = {{"seeds", stats.seeds}, {"converged", stats.converged}, {"dropped", stats.dropped}};
  j["orbits"] = Json::array();
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto& orb = orbits[i];
    std::vector<double> x(orb.start.x.data(), orb.start.x.data() + orb.start.x.size());
    std::vector<double> xi(orb.start.xi.data(), orb.start.xi.data() + orb.start.xi.size());
    Json e{{"L", orb.length},
           {"L_prime", orb.prime_period},
           {"det_I_minus_P", dets[i].direct},
           {"det_schur", optional_number(dets[i].schur)},
           {"degenerate", dets[i].degenerate},
           {"chart", orb.start.chart},
           {"x", x},
           {"xi", xi},
           {"closure_error", orb.closure_error},
           {"source", orb.source}};
    if (!dets[i].notice.empty()) e["notice"] = dets[i].notice;
    j["orbits"].push_back(e);
  }
  j["pass"] = o.pass;
  o.content = to_text(j);
  return o;
}

// ---------------------------------------------------------------- zeta

struct ZetaArgs {
  std::string manifold;
  double l_max = 3.0;
  std::string s = "2";
  bool include_oracle = false;
};

Outcome zeta_report(const ZetaArgs& a, const Common& c) {
  const geo::Manifold m = load_manifold(a.manifold);
  if (!(a.l_max > 0.0)) throw ConfigError("--lmax must be positive");
  const std::complex<double> s = parse_complex(a.s);

  zeta::ClassifyOptions co;
  co.rank_tol = c.tol.rank;
  co.closure_tol = c.tol.closure;
  co.seed = c.seed;
  const zeta::TraceWeights tw = zeta::flat_trace_weights(m, a.l_max, search_options(c), co);

  Outcome o;
  std::optional<zeta::LSeries> oracle;
  double max_rel = 0.0;
  if (const auto* torus = std::get_if<geo::FlatTorus>(&m)) {
    oracle = zeta::oracle_flat_torus(torus->lattice, a.l_max);
    const auto& got = tw.series.entries;
    const auto& want = oracle->entries;
    if (got.size() != want.size())
      o.failures.push_back({{"check", "oracle"}, {"detail", "length count differs"},
                            {"computed", got.size()}, {"oracle", want.size()}});
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
      if (std::abs(got[i].tau - want[i].tau) > defaults::length_coalesce_tol * std::max(1.0, want[i].tau)) {
        o.failures.push_back({{"check", "oracle"}, {"tau", got[i].tau}, {"oracle_tau", want[i].tau}});
        continue;
      }
      const double rel = std::abs(got[i].weight - want[i].weight) / std::abs(want[i].weight);
      max_rel = std::max(max_rel, rel);
      if (!(rel <= c.tol.oracle))
        o.failures.push_back({{"check", "oracle"}, {"tau", got[i].tau}, {"relative_error", rel}});
    }
  }

  std::optional<zeta::LValue> lv;
  if (!tw.series.entries.empty()) lv = zeta::l_function_eval(tw.series, s);
  o.pass = o.failures.empty();

  if (format_of(c, "csv") == "csv") {
    CsvTable t({"tau", "weight", "provenance"});
    for (const auto& e : tw.series.entries) t.row().cell(e.tau).cell(e.weight).cell(zeta::to_string(e.provenance));
    if (a.include_oracle && oracle)
      for (const auto& e : oracle->entries) t.row().cell(e.tau).cell(e.weight).cell(zeta::to_string(e.provenance));
    o.content = t.str();
    return o;
  }
  const auto series_json = [](const zeta::LSeries& series) {
    Json arr = Json::array();
    for (const auto& e : series.entries)
      arr.push_back({{"tau", e.tau}, {"weight", e.weight}, {"provenance", zeta::to_string(e.provenance)}});
    return arr;
  };
  Json j;
  j["manifold"] = geo::kind_name(m);
  j["l_max"] = a.l_max;
  j["orbit_count"] = tw.orbit_count;
  j["series"] = series_json(tw.series);
  j["components"] = Json::array();
  for (const auto& z : tw.components) {
    Json e{{"period", z.period},
           {"dimension", z.dimension},
           {"continuation_dimension", z.continuation_dimension},
           {"clean", z.clean},
           {"samples", z.samples.size()},
           {"transverse_determinant", z.transverse_determinant},
           {"canonical_volume", z.canonical_volume},
           {"volume_std_error", z.volume_std_error},
           {"weight", z.weight}};
    if (!z.notice.empty()) e["notice"] = z.notice;
    j["components"].push_back(e);
  }
  if (oracle)
    j["oracle"] = {{"series", series_json(*oracle)}, {"max_relative_error", max_rel}, {"tolerance", c.tol.oracle}};
  else
    j["oracle"] = nullptr;
  if (lv)
    j["l_function"] = {{"s_re", s.real()},
                       {"s_im", s.imag()},
                       {"partial_sum_re", lv->partial_sum.real()},
                       {"partial_sum_im", lv->partial_sum.imag()},
                       {"tail_bound", optional_number(lv->tail_bound)},
                       {"warning", lv->warning}};
  else
    j["l_function"] = nullptr;
  j["pass"] = o.pass;
  o.content = to_text(j);
  return o;
}

// ---------------------------------------------------------------- statphase

struct StatphaseArgs {
  std::string fixture;
  std::string problem;
  std::string mollify;
  std::string h_list;
};

Outcome statphase(const StatphaseArgs& a, const Common& c) {
  const int sources = !a.fixture.empty() + !a.problem.empty() + !a.mollify.empty();
  if (sources != 1) throw ConfigError("give exactly one of --fixture, --problem, --mollify");

  StatphaseFixture f;
  if (!a.fixture.empty()) {
    f = load_statphase(a.fixture);
  } else if (!a.problem.empty()) {
    try {
      f.problem = micro::builtin_problem(a.problem);
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
  } else {
    f.mollification = true;
    f.function_name = a.mollify;
    f.function = named_function(a.mollify);
  }
  if (!a.h_list.empty()) f.h_list = parse_list(a.h_list);
  if (f.h_list.empty())
    f.h_list = f.mollification ? std::vector<double>{10, 20, 50, 100} : std::vector<double>{50, 100, 200, 400};

  Outcome o;
  if (f.mollification) {
    const micro::MollifyOrderReport rep = micro::mollification_error_order(f.function, f.h_list);
    if (!rep.pass) o.failures.push_back({{"check", "mollification_slope"}, {"slope", optional_number(rep.slope)}});
    o.pass = o.failures.empty();
    if (format_of(c, "csv") == "csv") {
      CsvTable t({"h", "grid", "sup_error"});
      for (const auto& r : rep.rows) t.row().cell(r.h).cell(r.grid).cell(r.sup_error);
      o.content = t.str();
      return o;
    }
    Json j;
    j["kind"] = "mollification";
    j["function"] = f.function_name;
    j["rows"] = Json::array();
    for (const auto& r : rep.rows) j["rows"].push_back({{"h", r.h}, {"grid", r.grid}, {"sup_error", r.sup_error}});
    j["slope"] = optional_number(rep.slope);
    j["at_floor"] = rep.at_floor;
    j["pass"] = o.pass;
    o.content = to_text(j);
    return o;
  }

  const micro::StationaryPhaseReport rep = micro::validate_stationary_phase(f.problem, f.h_list);
  if (!rep.pass) o.failures.push_back({{"check", "stationary_phase_slope"}, {"slope", optional_number(rep.slope)}});
  o.pass = o.failures.empty();
  if (format_of(c, "csv") == "csv") {
    CsvTable t({"h", "integral_re", "integral_im", "prediction_re", "prediction_im", "scaled_residual"});
    for (const auto& r : rep.rows)
      t.row().cell(r.h).cell(r.integral.real()).cell(r.integral.imag()).cell(r.prediction.real())
          .cell(r.prediction.imag()).cell(r.scaled_residual);
    o.content = t.str();
    return o;
  }
  Json j;
  j["kind"] = "stationary_phase";
  j["problem"] = f.problem.name;
  j["dimension"] = f.problem.dim;
  j["rows"] = Json::array();
  for (const auto& r : rep.rows)
    j["rows"].push_back({{"h", r.h},
                         {"integral", complex_json(r.integral)},
                         {"prediction", complex_json(r.prediction)},
                         {"scaled_residual", r.scaled_residual},
                         {"exact_residual", optional_number(r.exact_residual)}});
  j["slope"] = optional_number(rep.slope);
  j["at_floor"] = rep.at_floor;
  j["pass"] = o.pass;
  o.content = to_text(j);
  return o;
}

// ---------------------------------------------------------------- dispatch

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output path, '-' for stdout")->capture_default_str();
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", c.seed, "Seed for every randomized step")->capture_default_str();
  const auto tol = [&](const char* name, double& v, const char* what) {
    sub->add_option(std::string("--tol.") + name, v, what)->check(CLI::PositiveNumber)->capture_default_str();
  };
  tol("intertwiner", c.tol.intertwiner, "Intertwiner kernel residual bound");
  tol("intertwining", c.tol.intertwining, "||U V1 - V2 U|| and Radon unitarity bound");
  tol("conjugation", c.tol.conjugation, "Trace conjugation residual bound");
  tol("closure", c.tol.closure, "Closed-orbit closure tolerance");
  tol("merge", c.tol.merge, "Orbit de-duplication tolerance");
  tol("rank", c.tol.rank, "SVD rank threshold for fixed sets");
  tol("oracle", c.tol.oracle, "Relative agreement with the lattice oracle");
  tol("schur", c.tol.schur, "Direct vs Schur determinant agreement");
}

std::string summary(int status, const std::string& subcommand, const std::string& message, const Json& failures) {
  Json j{{"status", status == exit_failure ? "failure" : "error"},
         {"exit_code", status},
         {"subcommand", subcommand},
         {"message", message},
         {"failures", failures}};
  return j.dump() + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sunada covers, geodesic flow traces and stationary-phase checks", "sunada"};
  app.require_subcommand(1);
  Common common;

  GassmannArgs ga;
  auto* g = app.add_subcommand("gassmann", "Gassmann certificate and intertwiner for a subgroup pair");
  g->add_option("--group", ga.group, "Group fixture file")->required()->check(CLI::ExistingFile);
  g->add_option("--h1", ga.h1, "Subgroup: point:i, set:i,j,k or cycles separated by ';'");
  g->add_option("--h2", ga.h2, "Second subgroup, same syntax");
  g->add_option("--search", ga.search, "List non-conjugate Gassmann pairs up to this index");

  SunadaArgs sa;
  auto* s = app.add_subcommand("sunada", "Trace equality for seeded equivariant dynamics on a cover diagram");
  s->add_option("--diagram", sa.diagram, "Diagram JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--tmax", sa.t_max, "Largest iterate")->capture_default_str()->check(CLI::Range(1u, 100000u));
  s->add_option("--seeds", sa.seeds, "Number of seeds")->capture_default_str()->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));

  FlowArgs fa;
  auto* f = app.add_subcommand("flow", "Closed geodesics with Poincare determinants");
  f->add_option("--manifold", fa.manifold, "Manifold JSON")->required()->check(CLI::ExistingFile);
  f->add_option("--lmax", fa.l_max, "Length cutoff")->capture_default_str();

  ZetaArgs za;
  auto* z = app.add_subcommand("zeta", "Clean fixed-set weights and L-function partial sums");
  z->add_option("--manifold", za.manifold, "Manifold JSON")->required()->check(CLI::ExistingFile);
  z->add_option("--lmax", za.l_max, "Length cutoff")->capture_default_str();
  z->add_option("--s", za.s, "Complex argument: 2, 2+0.5i or 2,0.5")->capture_default_str();
  z->add_flag("--include-oracle", za.include_oracle, "Append lattice-oracle rows to the CSV (flat tori)");

  StatphaseArgs pa;
  auto* p = app.add_subcommand("statphase", "Stationary-phase and mollification convergence studies");
  p->add_option("--fixture", pa.fixture, "Fixture JSON")->check(CLI::ExistingFile);
  p->add_option("--problem", pa.problem, "Builtin problem name");
  p->add_option("--mollify", pa.mollify, "Mollification study of a named function (sin, sin3, cos2, constant)");
  p->add_option("--hlist", pa.h_list, "Comma-separated h values");

  for (CLI::App* sub : {g, s, f, z, p}) add_common(sub, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return exit_ok;  // --help
    err << summary(exit_bad_config, "", e.what(), Json::array());
    return exit_bad_config;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Outcome o;
    if (name == "gassmann") o = gassmann(ga, common);
    else if (name == "sunada") o = sunada(sa, common);
    else if (name == "flow") o = flow(fa, common);
    else if (name == "zeta") o = zeta_report(za, common);
    else o = statphase(pa, common);
    write_output(common.out, o.content, out);
    if (o.pass) return exit_ok;
    err << summary(exit_failure, name, "verdict failed", o.failures);
    return exit_failure;
  } catch (const ConfigError& e) {
    err << summary(exit_bad_config, name, e.what(), Json::array());
    return exit_bad_config;
  } catch (const sunada::ParseError& e) {
    err << summary(exit_bad_config, name, e.what(), Json::array());
    return exit_bad_config;
  } catch (const PreconditionError& e) {
    err << summary(exit_bad_config, name, e.what(), Json::array());
    return exit_bad_config;
  } catch (const nlohmann::json::exception& e) {
    err << summary(exit_bad_config, name, std::string("malformed input: ") + e.what(), Json::array());
    return exit_bad_config;
  } catch (const std::exception& e) {
    err << summary(exit_failure, name, e.what(), Json::array());
    return exit_failure;
  }
}

}  // namespace sunada::cli
