#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sunada/errors.hpp"
#include "sunada/microlocal.hpp"
#include "sunada/parallel.hpp"

namespace sunada::micro {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double raw_bump(double r) { return r < 1.0 ? std::exp(1.0 / (r * r - 1.0)) : 0.0; }

// Radial mass of the unnormalised bump: surface measure of the unit sphere
// in dimension N times int_0^1 r^{N-1} e^{1/(r^2-1)} dr.
template <class Rule>
double radial_mass(int dim, Rule&& integrate) {
  const auto f = [dim](double r) { return (dim == 2 ? r : 1.0) * raw_bump(r); };
  return (dim == 2 ? two_pi : 2.0) * integrate(f);
}

}  // namespace

MollifierConfig make_mollifier(int dim, double h) {
  if (dim != 1 && dim != 2) throw PreconditionError("mollifier dimension must be 1 or 2");
  if (!(h > 1.0)) throw PreconditionError("mollifier scale h must exceed 1");
  using boost::math::quadrature::gauss_kronrod;
  const double mass = radial_mass(dim, [](auto f) { return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-14); });
  MollifierConfig c{dim, 1.0 / mass, h};

  boost::math::quadrature::tanh_sinh<double> ts;
  const double check = radial_mass(dim, [&](auto f) { return ts.integrate(f, 0.0, 1.0); });
  if (std::abs(c.normalization * check - 1.0) > defaults::bump_mass_tol)
    throw NumericalError("bump normalisation disagrees between quadrature rules");
  return c;
}

double bump(const MollifierConfig& c, double radius) { return c.normalization * raw_bump(std::abs(radius)); }

std::vector<double> mollify(const std::vector<double>& samples, int dim, double period, double h) {
  if (dim != 1 && dim != 2) throw PreconditionError("samples must be one- or two-dimensional");
  if (!(h > 1.0)) throw PreconditionError("mollifier scale h must exceed 1");
  if (!(period > 0.0)) throw PreconditionError("period must be positive");
  std::size_t m = samples.size();
  if (dim == 2) {
    m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(samples.size()))));
    if (m * m != samples.size()) throw PreconditionError("two-dimensional samples must form a square grid");
  }
  if (m == 0) throw PreconditionError("no samples");
  const double dx = period / static_cast<double>(m);
  if (dx > 1.0 / (10.0 * h) * (1.0 + 1e-12))
    throw PreconditionError("grid too coarse for the mollifier scale: spacing must be <= 1 / (10 h)");

  const MollifierConfig c = make_mollifier(dim, h);
  // Stencil offsets with |j dx| < 1/h and their weights, normalised to unit discrete mass.
  const auto reach = static_cast<long>(std::floor(1.0 / (h * dx)));
  std::vector<std::pair<std::array<long, 2>, double>> stencil;
  double mass = 0.0;
  for (long j = -reach; j <= reach; ++j)
    for (long l = dim == 2 ? -reach : 0; l <= (dim == 2 ? reach : 0); ++l) {
      const double r = h * dx * std::hypot(static_cast<double>(j), static_cast<double>(l));
      const double w = bump(c, r);
      if (w <= 0.0) continue;
      stencil.push_back({{j, l}, w});
      mass += w;
    }
  for (auto& s : stencil) s.second /= mass;

  const auto ml = static_cast<long>(m);
  const auto wrap = [ml](long i) { return static_cast<std::size_t>(((i % ml) + ml) % ml); };
  std::vector<double> out(samples.size());
  const std::size_t rows = dim == 2 ? m : 1;
  parallel_for(rows, [&](std::size_t row) {
    for (std::size_t col = 0; col < m; ++col) {
      double acc = 0.0;
      for (const auto& [off, w] : stencil) {
        const std::size_t i = wrap(static_cast<long>(col) - off[0]);
        const std::size_t k = dim == 2 ? wrap(static_cast<long>(row) - off[1]) : 0;
        acc += w * samples[k * m + i];
      }
      out[row * m + col] = acc;
    }
  });
  return out;
}

MollifyOrderReport mollification_error_order(const std::function<double(double)>& f, const std::vector<double>& h_list,
                                             double floor) {
  if (h_list.size() < 2) throw PreconditionError("need at least two values of h");
  const auto [lo, hi] = std::minmax_element(h_list.begin(), h_list.end());
  if (*hi < 10.0 * *lo * (1.0 - 1e-12)) throw PreconditionError("h values must span at least one decade");

  MollifyOrderReport rep;
  for (double h : h_list) {
    std::size_t m = 16;
    while (two_pi / static_cast<double>(m) > 1.0 / (10.0 * h)) m *= 2;
    std::vector<double> samples(m);
    for (std::size_t i = 0; i < m; ++i) samples[i] = f(two_pi * static_cast<double>(i) / static_cast<double>(m));
    const std::vector<double> smooth = mollify(samples, 1, two_pi, h);
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) err = std::max(err, std::abs(smooth[i] - samples[i]));
    rep.rows.push_back({h, m, err});
  }

  std::vector<double> hs, es;
  for (const MollifyRow& r : rep.rows)
    if (r.sup_error > floor) {
      hs.push_back(r.h);
      es.push_back(r.sup_error);
    }
  if (hs.size() < 2) {
    rep.at_floor = true;
    rep.pass = true;
    return rep;
  }
  rep.slope = log_log_slope(hs, es);
  rep.pass = *rep.slope >= -2.3 && *rep.slope <= -1.7;
  return rep;
}

}  // namespace sunada::micro
