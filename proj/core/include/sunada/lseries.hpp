#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sunada/defaults.hpp"
#include "sunada/manifold.hpp"

namespace sunada::zeta {

enum class Provenance { computed, oracle };
std::string to_string(Provenance p);

struct LSeriesEntry {
  double tau = 0.0;
  double weight = 0.0;
  Provenance provenance = Provenance::computed;
};

/// Weighted length spectrum sum_tau w(tau) delta(t - tau), complete up to l_max.
struct LSeries {
  std::vector<LSeriesEntry> entries;  ///< strictly increasing tau
  double l_max = 0.0;
};

/// Sorts by tau and merges entries whose lengths agree within tol * max(1, tau),
/// adding their weights. Throws PreconditionError for non-finite or
/// non-positive lengths and weights.
LSeries make_series(std::vector<LSeriesEntry> entries, double l_max,
                    double tol = defaults::length_coalesce_tol);

struct LValue {
  std::complex<double> partial_sum;
  /// w_max e^{-Re(s) l_max} / (1 - e^{-Re(s) gap}) with gap the smallest
  /// spacing among 0 and the series lengths; empty when Re(s) <= 0.
  std::optional<double> tail_bound;
  std::string warning;
};

/// sum_tau w(tau) e^{-s tau}. Throws PreconditionError on an empty series.
LValue l_function_eval(const LSeries& series, std::complex<double> s);

/// Lattice enumeration: one entry per distinct length tau <= l_max with
/// weight #{v : |v| = tau} covolume / tau^{n-1}.
LSeries oracle_flat_torus(const geo::Mat& lattice, double l_max);

}  // namespace sunada::zeta
