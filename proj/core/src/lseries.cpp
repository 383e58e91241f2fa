#include "sunada/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sunada/errors.hpp"

namespace sunada::zeta {

std::string to_string(Provenance p) { return p == Provenance::oracle ? "oracle" : "computed"; }

LSeries make_series(std::vector<LSeriesEntry> entries, double l_max, double tol) {
  for (const LSeriesEntry& e : entries)
    if (!std::isfinite(e.tau) || !(e.tau > 0.0) || !std::isfinite(e.weight) || !(e.weight > 0.0))
      throw PreconditionError("series lengths and weights must be finite and positive");
  std::sort(entries.begin(), entries.end(),
            [](const LSeriesEntry& a, const LSeriesEntry& b) { return a.tau < b.tau; });

  LSeries out;
  out.l_max = l_max;
  for (const LSeriesEntry& e : entries) {
    if (!out.entries.empty() && e.tau - out.entries.back().tau <= tol * std::max(1.0, e.tau)) {
      LSeriesEntry& last = out.entries.back();
      last.weight += e.weight;
      if (e.provenance != last.provenance) last.provenance = Provenance::computed;
      continue;
    }
    out.entries.push_back(e);
  }
  return out;
}

LValue l_function_eval(const LSeries& series, std::complex<double> s) {
  if (series.entries.empty()) throw PreconditionError("L-series is empty");
  LValue out;
  double w_max = 0.0;
  double gap = series.entries.front().tau;
  for (std::size_t i = 0; i < series.entries.size(); ++i) {
    const LSeriesEntry& e = series.entries[i];
    out.partial_sum += e.weight * std::exp(-s * e.tau);
    w_max = std::max(w_max, e.weight);
    if (i > 0) gap = std::min(gap, e.tau - series.entries[i - 1].tau);
  }
  if (s.real() > 0.0) {
    out.tail_bound = w_max * std::exp(-s.real() * series.l_max) / -std::expm1(-s.real() * gap);
  } else {
    out.warning = "Re(s) <= 0: the series need not converge; tail bound omitted";
  }
  return out;
}

LSeries oracle_flat_torus(const geo::Mat& lattice, double l_max) {
  const auto n = lattice.rows();
  if (lattice.cols() != n || (n != 2 && n != 3)) throw PreconditionError("lattice must be 2x2 or 3x3");
  const double covolume = std::abs(lattice.determinant());
  if (!(covolume > 0.0)) throw PreconditionError("lattice basis is singular");

  std::vector<LSeriesEntry> entries;
  for (const geo::Vec& v : geo::lattice_vectors(lattice, l_max)) {
    const double tau = v.norm();
    entries.push_back({tau, covolume / std::pow(tau, static_cast<double>(n - 1)), Provenance::oracle});
  }
  return make_series(std::move(entries), l_max);
}

}  // namespace sunada::zeta
