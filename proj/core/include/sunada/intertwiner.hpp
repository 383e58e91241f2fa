#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sunada/defaults.hpp"
#include "sunada/group.hpp"

namespace sunada::group {

using Complex = std::complex<double>;

/// Left cosets G/H with the induced permutation action of G.
class CosetSpace {
 public:
  CosetSpace(const FiniteGroup& g, const Subgroup& h);

  std::size_t size() const { return reps_.size(); }
  std::size_t coset_of(ElementId x) const { return coset_of_[x]; }
  ElementId representative(std::size_t coset) const { return reps_[coset]; }
  /// Index of g·(x H).
  std::size_t act(ElementId g, std::size_t coset) const;

 private:
  FiniteGroup group_;
  std::vector<std::size_t> coset_of_;
  std::vector<ElementId> reps_;
};

/// Function A on H2\G/H1 together with the G-equivariant matrix it induces,
///   matrix(xH2, wH1) = A(x^-1 w),   L^2(G/H1) -> L^2(G/H2).
///
/// Characters on H1, H2 are trivial: A(b2 a b1) = A(a).
struct IntertwinerKernel {
  FiniteGroup group;
  Subgroup h1;
  Subgroup h2;
  Partition double_cosets;                ///< H2 a H1 blocks
  std::vector<std::size_t> block_of;      ///< element -> double coset index
  std::vector<Complex> values;            ///< one value per double coset
  Eigen::MatrixXcd matrix;                ///< |G/H2| x |G/H1|

  Complex value_at(ElementId a) const { return values[block_of[a]]; }
};

/// Kernel with prescribed double-coset values; the matrix is induced exactly.
IntertwinerKernel kernel_from_values(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                                     std::vector<Complex> values);

/// A = indicator of H, inducing the identity on L^2(G/H).
IntertwinerKernel identity_kernel(const FiniteGroup& g, const Subgroup& h);

/// For H2 = c H1 c^-1: A = indicator of H2 c, inducing the permutation wH1 -> w c^-1 H2.
IntertwinerKernel conjugation_kernel(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                                     ElementId c);

/// Unitary G-equivariant kernel for a Gassmann pair.
///
/// A seeded random matrix R is averaged over the group,
///   B = |G|^-1 sum_g rho2(g) R rho1(g)^-1,
/// and replaced by its polar factor. Singular averages are retried with a
/// fresh seed up to `retries` times.
IntertwinerKernel intertwiner_solve(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                                    std::uint64_t seed, int retries = defaults::intertwiner_retries);

struct IntertwinerReport {
  double unitarity = 0.0;     ///< ||A*A - I||_max
  double equivariance = 0.0;  ///< max over generators ||A rho1(g) - rho2(g) A||_max
  double constancy = 0.0;     ///< max |matrix(xH2, wH1) - A(x^-1 w)|
  bool passed = false;
};

IntertwinerReport verify_intertwiner(const IntertwinerKernel& kernel,
                                     double tol = defaults::intertwiner_tol);

}  // namespace sunada::group
