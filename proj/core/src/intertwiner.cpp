#include "sunada/intertwiner.hpp"

#include <algorithm>
#include <cmath>

#include "sunada/errors.hpp"
#include "sunada/rng.hpp"

namespace sunada::group {

CosetSpace::CosetSpace(const FiniteGroup& g, const Subgroup& h) : group_(g), coset_of_(g.order()) {
  auto blocks = cosets(g, h, Side::left);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    reps_.push_back(blocks[i].front());
    for (ElementId x : blocks[i]) coset_of_[x] = i;
  }
}

std::size_t CosetSpace::act(ElementId g, std::size_t coset) const {
  return coset_of_[group_.multiply(g, reps_[coset])];
}

namespace {

IntertwinerKernel make_shell(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  IntertwinerKernel k{g, h1, h2, double_cosets(g, h2, h1), std::vector<std::size_t>(g.order()), {}, {}};
  for (std::size_t b = 0; b < k.double_cosets.size(); ++b)
    for (ElementId x : k.double_cosets[b]) k.block_of[x] = b;
  return k;
}

void induce_matrix(IntertwinerKernel& k) {
  CosetSpace s1(k.group, k.h1);
  CosetSpace s2(k.group, k.h2);
  k.matrix.resize(static_cast<Eigen::Index>(s2.size()), static_cast<Eigen::Index>(s1.size()));
  for (std::size_t i = 0; i < s2.size(); ++i) {
    const ElementId xi = k.group.inverse(s2.representative(i));
    for (std::size_t j = 0; j < s1.size(); ++j)
      k.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          k.value_at(k.group.multiply(xi, s1.representative(j)));
  }
}

}  // namespace

IntertwinerKernel kernel_from_values(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                                     std::vector<Complex> values) {
  IntertwinerKernel k = make_shell(g, h1, h2);
  if (values.size() != k.double_cosets.size())
    throw PreconditionError("kernel needs one value per double coset");
  k.values = std::move(values);
  induce_matrix(k);
  return k;
}

IntertwinerKernel identity_kernel(const FiniteGroup& g, const Subgroup& h) {
  IntertwinerKernel k = make_shell(g, h, h);
  k.values.assign(k.double_cosets.size(), Complex{0.0});
  k.values[k.block_of[g.identity()]] = 1.0;
  induce_matrix(k);
  return k;
}

IntertwinerKernel conjugation_kernel(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                                     ElementId c) {
  if (!(conjugate(h1, c) == h2)) throw PreconditionError("H2 is not c H1 c^-1");
  IntertwinerKernel k = make_shell(g, h1, h2);
  k.values.assign(k.double_cosets.size(), Complex{0.0});
  k.values[k.block_of[c]] = 1.0;
  induce_matrix(k);
  return k;
}

IntertwinerKernel intertwiner_solve(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2,
                                    std::uint64_t seed, int retries) {
  if (!is_gassmann(g, h1, h2).verdict)
    throw PreconditionError("intertwiner_solve requires a Gassmann pair");

  CosetSpace s1(g, h1);
  CosetSpace s2(g, h2);
  const auto m = static_cast<Eigen::Index>(s1.size());

  // Coset permutations of every element, reused for each retry.
  std::vector<std::vector<std::size_t>> act1(g.order());
  std::vector<std::vector<std::size_t>> act2(g.order());
  for (ElementId x = 0; x < g.order(); ++x) {
    for (std::size_t c = 0; c < s1.size(); ++c) act1[x].push_back(s1.act(x, c));
    for (std::size_t c = 0; c < s2.size(); ++c) act2[x].push_back(s2.act(x, c));
  }

  Rng seeds(seed);
  for (int attempt = 0; attempt < std::max(retries, 1); ++attempt) {
    Rng rng(seeds.next());
    Eigen::MatrixXcd r(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) r(i, j) = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

    // (rho2(x) R rho1(x)^-1)(x.i, x.j) = R(i, j)
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);
    for (ElementId x = 0; x < g.order(); ++x)
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
          b(static_cast<Eigen::Index>(act2[x][static_cast<std::size_t>(i)]),
            static_cast<Eigen::Index>(act1[x][static_cast<std::size_t>(j)])) += r(i, j);
    b /= static_cast<double>(g.order());

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-8 * sv(0)) continue;

    IntertwinerKernel k = make_shell(g, h1, h2);
    k.matrix = svd.matrixU() * svd.matrixV().adjoint();

    // A(a) = matrix(H2, aH1), averaged over each double coset.
    const auto row = static_cast<Eigen::Index>(s2.coset_of(g.identity()));
    k.values.assign(k.double_cosets.size(), Complex{0.0});
    for (std::size_t blk = 0; blk < k.double_cosets.size(); ++blk) {
      for (ElementId a : k.double_cosets[blk])
        k.values[blk] += k.matrix(row, static_cast<Eigen::Index>(s1.coset_of(a)));
      k.values[blk] /= static_cast<double>(k.double_cosets[blk].size());
    }
    return k;
  }
  throw LimitError("intertwiner_solve: every group average was singular");
}

IntertwinerReport verify_intertwiner(const IntertwinerKernel& k, double tol) {
  const FiniteGroup& g = k.group;
  CosetSpace s1(g, k.h1);
  CosetSpace s2(g, k.h2);
  IntertwinerReport rep;

  if (k.matrix.rows() != static_cast<Eigen::Index>(s2.size()) ||
      k.matrix.cols() != static_cast<Eigen::Index>(s1.size()))
    throw PreconditionError("kernel matrix shape does not match the coset spaces");

  const Eigen::MatrixXcd gram = k.matrix.adjoint() * k.matrix;
  rep.unitarity = (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (k.matrix.rows() != k.matrix.cols()) rep.unitarity = std::max(rep.unitarity, 1.0);

  for (ElementId x : g.generators()) {
    for (std::size_t i = 0; i < s2.size(); ++i) {
      for (std::size_t j = 0; j < s1.size(); ++j) {
        const Complex lhs = k.matrix(static_cast<Eigen::Index>(s2.act(x, i)), static_cast<Eigen::Index>(s1.act(x, j)));
        const Complex rhs = k.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        rep.equivariance = std::max(rep.equivariance, std::abs(lhs - rhs));
      }
    }
  }

  for (ElementId x = 0; x < g.order(); ++x) {
    const auto i = static_cast<Eigen::Index>(s2.coset_of(x));
    const ElementId xi = g.inverse(x);
    for (std::size_t j = 0; j < s1.size(); ++j) {
      const ElementId w = s1.representative(j);
      rep.constancy = std::max(rep.constancy,
                               std::abs(k.matrix(i, static_cast<Eigen::Index>(j)) - k.value_at(g.multiply(xi, w))));
    }
  }

  rep.passed = rep.unitarity <= tol && rep.equivariance <= tol && rep.constancy <= tol;
  return rep;
}

}  // namespace sunada::group
