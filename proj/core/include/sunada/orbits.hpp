#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sunada/defaults.hpp"
#include "sunada/flow.hpp"
#include "sunada/manifold.hpp"

namespace sunada::geo {

struct OrbitSearchOptions {
  bool use_symmetry = true;
  bool use_grid = true;
  std::size_t grid_points = 3;      ///< base grid points per coordinate
  std::size_t grid_directions = 4;  ///< unit directions per base point
  double period_step = 1.0;         ///< spacing of initial period guesses
  double closure_tol = defaults::closure_tol;
  double merge_tol = defaults::merge_tol;
  double min_length = defaults::min_length;
  int newton_max_iter = 25;
  StepControl step;
};

struct ClosedOrbit {
  PhasePoint start;
  double length = 0.0;
  double prime_period = 0.0;
  FrameMat monodromy;      ///< dG^L in the Sasaki frame at start
  double closure_error = 0.0;
  FrameMat poincare;       ///< transversal block, (2n-2) x (2n-2)
  double det_I_minus_P = 0.0;
  bool degenerate = false;
  std::string source;      ///< "symmetry" or "grid"
};

struct OrbitCandidate {
  PhasePoint start;
  double period = 0.0;
  std::string source;
};

/// Analytically known closed orbits: lattice vectors on tori, the equator
/// and its iterates on spheres, equators at critical points of the profile
/// and meridians of periodic profiles on surfaces of revolution.
/// Both orientations are included.
std::vector<OrbitCandidate> symmetry_candidates(const Manifold& m, double l_max);

/// Newton iteration on (zeta, T) for G^T zeta = zeta with minimum-norm steps
/// from the SVD of [M - I | e_X]. Returns nothing when the iteration does not
/// close within options.closure_tol.
std::optional<ClosedOrbit> refine_closed_orbit(const Manifold& m, const PhasePoint& guess, double period_guess,
                                               double l_max, const OrbitSearchOptions& options = {},
                                               const std::string& source = "grid");

/// Smallest L / k (k = 1 .. L / min_length) at which the trajectory closes.
double prime_period(const Manifold& m, const PhasePoint& start, double length,
                    const OrbitSearchOptions& options = {});

/// True when b lies on the closed orbit through a (lengths equal, some time
/// shift of a within tol of b).
bool same_orbit(const Manifold& m, const ClosedOrbit& a, const ClosedOrbit& b, double tol);

struct OrbitSearchStats {
  std::size_t seeds = 0;
  std::size_t converged = 0;
  std::size_t dropped = 0;  ///< Newton divergence or non-closure
};

/// Symmetry candidates plus grid seeds refined by Newton, merged up to time
/// shift, sorted by (length, start coordinates).
std::vector<ClosedOrbit> find_closed_orbits(const Manifold& m, double l_max, const OrbitSearchOptions& options = {},
                                            OrbitSearchStats* stats = nullptr);

/// P = monodromy restricted to the transversal (h, v) directions, with
/// n-1 square blocks [[A, B], [C, D]] in (h, v) order.
struct PoincareBlocks {
  FrameMat p;
  FrameMat a;
  FrameMat b;
  FrameMat c;
  FrameMat d;
};

PoincareBlocks poincare_map(const ClosedOrbit& orbit);

struct DetReport {
  double direct = 0.0;
  std::optional<double> schur;  ///< empty when I - D is singular
  double schur_gap = 0.0;       ///< |direct - schur| / max(1, |direct|)
  bool degenerate = false;      ///< |det(I - P)| <= 1e-8
  std::string notice;
};

/// det(I - P) directly and by det(I - D) det((I - A) - B (I - D)^-1 C).
DetReport det_I_minus_P(const ClosedOrbit& orbit);

}  // namespace sunada::geo
