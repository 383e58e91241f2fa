#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sunada/defaults.hpp"
#include "sunada/lseries.hpp"
#include "sunada/orbits.hpp"

namespace sunada::zeta {

struct ClassifyOptions {
  double rank_tol = defaults::rank_tol;          ///< singular values below this count as zero
  double spectral_gap = defaults::spectral_gap;  ///< smallest kept / largest dropped
  double continuation_step = defaults::continuation_step;
  double closure_tol = defaults::closure_tol;
  int newton_max_iter = 12;
  double mc_rel_error = defaults::mc_rel_error;
  std::size_t mc_batch = 256;
  std::size_t mc_max_samples = 1 << 16;
  std::uint64_t seed = 1;
  geo::StepControl step;
};

/// Connected component Z of Fix(G^tau) on S*M.
struct FixedComponent {
  double period = 0.0;
  int dimension = 0;  ///< k = 2n - 1 - rank(I - monodromy)
  std::vector<geo::ClosedOrbit> samples;
  /// Product of the 2n - 1 - k nonzero singular values of I - monodromy at
  /// the first sample; 1 when the normal space is empty.
  double transverse_determinant = 0.0;
  double canonical_volume = 0.0;
  /// Integral of dVol_can / transverse determinant over Z. Equals
  /// canonical_volume / transverse_determinant when the latter is constant.
  double weight = 0.0;
  double volume_std_error = 0.0;  ///< Monte Carlo only; 0 for closed forms
  int continuation_dimension = 0;
  bool clean = false;
  std::string notice;
};

/// Singular values of I - M in the Sasaki frame with the rank decision.
struct RankReport {
  Eigen::VectorXd singular_values;  ///< descending
  int kernel_dimension = 0;
  double determinant = 1.0;  ///< product of the retained singular values
  bool gap_ok = true;        ///< smallest kept > spectral_gap * largest dropped
  Eigen::MatrixXd kernel;    ///< orthonormal kernel basis as columns
};

RankReport rank_report(const geo::FrameMat& monodromy, const ClassifyOptions& options = {});

/// Groups closed orbits of common length tau into connected components of the
/// fixed set. Orbits whose kernel has full dimension 2n - 1 fix an open and
/// closed set, hence all of S*M. Otherwise two orbits are joined when a
/// predictor-corrector chain with steps of length continuation_step, moving
/// inside ker(I - M) and Newton-corrected back onto Fix(G^tau), reaches one
/// from the other. Each component is then measured: k from the SVD, the
/// continuation dimension from tangent probes, and, for clean components,
/// the transverse determinant, canonical volume and weight.
std::vector<FixedComponent> classify_fixed_set(const geo::Manifold& m, double tau,
                                               const std::vector<geo::ClosedOrbit>& orbits,
                                               const ClassifyOptions& options = {});

/// Throws PreconditionError unless the component is clean.
double transverse_determinant(const FixedComponent& z, const ClassifyOptions& options = {});

struct VolumeEstimate {
  double volume = 0.0;
  double weight = 0.0;  ///< integral of dVol / transverse determinant
  double std_error = 0.0;
  bool monte_carlo = false;
};

/// Closed forms for whole-bundle components (base volume times fiber length),
/// flat-torus components (covolume) and isolated orbits (prime period).
/// Two-dimensional components on surfaces of revolution are swept by the
/// rotation group: Monte Carlo along the orbit with dVol = |R_perp| ds dalpha,
/// R the rotation generator. Throws PreconditionError for unclean
/// components, NumericalError when no parametrisation applies or the
/// standard error target is not met within mc_max_samples.
VolumeEstimate canonical_volume(const geo::Manifold& m, const FixedComponent& z,
                                const ClassifyOptions& options = {});

struct TraceWeights {
  LSeries series;
  std::vector<FixedComponent> components;
  std::size_t orbit_count = 0;
};

/// Closed-orbit search up to l_max, components per length, and the series of
/// total weights per length. Throws NumericalError if any component in range
/// is not clean.
TraceWeights flat_trace_weights(const geo::Manifold& m, double l_max, const geo::OrbitSearchOptions& search = {},
                                const ClassifyOptions& options = {});

/// Same from an existing orbit list (all lengths <= l_max).
TraceWeights weights_from_orbits(const geo::Manifold& m, double l_max, const std::vector<geo::ClosedOrbit>& orbits,
                                 const ClassifyOptions& options = {});

}  // namespace sunada::zeta
