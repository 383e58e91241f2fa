#include <algorithm>
#include <set>

#include "sunada/errors.hpp"
#include "sunada/group.hpp"

namespace sunada::group {

namespace {

using Members = std::vector<ElementId>;

// Smallest member list over all conjugates; identifies the conjugacy class.
Members class_key(const FiniteGroup& g, std::span<const ElementId> members) {
  Members best;
  Members conj(members.size());
  for (ElementId c = 0; c < g.order(); ++c) {
    const ElementId ci = g.inverse(c);
    for (std::size_t i = 0; i < members.size(); ++i) conj[i] = g.multiply(g.multiply(c, members[i]), ci);
    std::sort(conj.begin(), conj.end());
    if (best.empty() || conj < best) best = conj;
  }
  return best;
}

struct Candidate {
  Members members;
  std::vector<ElementId> generators;
};

std::vector<Subgroup> stabilizer_candidates(const FiniteGroup& g) {
  std::vector<Subgroup> out;
  const std::size_t n = g.degree();
  for (Point x = 0; x < n; ++x) out.push_back(point_stabilizer(g, x));
  // Set stabilizers of 2- and 3-subsets, while the subset count stays small.
  std::vector<Point> pts;
  for (std::size_t k = 2; k <= std::min<std::size_t>(3, n - 1); ++k) {
    std::vector<bool> mask(n, false);
    std::fill(mask.end() - static_cast<std::ptrdiff_t>(k), mask.end(), true);
    std::size_t produced = 0;
    do {
      pts.clear();
      for (Point i = 0; i < n; ++i)
        if (mask[i]) pts.push_back(i);
      out.push_back(set_stabilizer(g, pts));
      if (++produced > 5000) break;
    } while (std::next_permutation(mask.begin(), mask.end()));
  }
  return out;
}

}  // namespace

std::vector<Subgroup> subgroup_class_representatives(const FiniteGroup& g) {
  if (g.order() > defaults::element_cap) throw LimitError("group exceeds element cap");

  std::set<Members> seen;
  std::vector<Candidate> all;
  auto add = [&](Subgroup s, std::vector<ElementId> gens) {
    Members m(s.members().begin(), s.members().end());
    if (seen.insert(m).second) all.push_back({std::move(m), std::move(gens)});
  };

  std::vector<ElementId> cyclic_gens;
  for (ElementId x = 0; x < g.order(); ++x) {
    const ElementId gen[] = {x};
    auto s = Subgroup::generated_by(g, gen);
    if (!seen.contains(Members(s.members().begin(), s.members().end()))) cyclic_gens.push_back(x);
    add(std::move(s), {x});
  }

  // Every subgroup is a join of cyclic subgroups; close the list under joins.
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (ElementId x : cyclic_gens) {
      if (std::binary_search(all[i].members.begin(), all[i].members.end(), x)) continue;
      std::vector<ElementId> gens = all[i].generators;
      gens.push_back(x);
      auto joined = Subgroup::generated_by(g, gens);
      add(std::move(joined), std::move(gens));
    }
  }

  std::set<Members> classes;
  for (const auto& c : all) classes.insert(class_key(g, c.members));

  std::vector<Subgroup> reps;
  for (const auto& key : classes) reps.push_back(Subgroup::from_members(g, key));
  std::sort(reps.begin(), reps.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return std::lexicographical_compare(a.members().begin(), a.members().end(), b.members().begin(),
                                        b.members().end());
  });
  return reps;
}

std::vector<GassmannPair> gassmann_search(const FiniteGroup& g, std::size_t index_bound) {
  if (g.order() > defaults::element_cap) throw LimitError("group exceeds element cap");

  std::vector<Subgroup> reps;
  if (g.order() <= defaults::exhaustive_search_order) {
    reps = subgroup_class_representatives(g);
  } else {
    for (auto& s : stabilizer_candidates(g)) {
      bool known = std::any_of(reps.begin(), reps.end(),
                               [&](const Subgroup& r) { return conjugating_element(r, s).has_value(); });
      if (!known) reps.push_back(std::move(s));
    }
  }
  std::erase_if(reps, [&](const Subgroup& s) { return s.index() > index_bound; });

  std::vector<GassmannPair> pairs;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      if (reps[i].order() != reps[j].order()) continue;
      if (!is_gassmann(g, reps[i], reps[j]).verdict) continue;
      if (conjugating_element(reps[i], reps[j])) continue;
      pairs.push_back({reps[i], reps[j]});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const GassmannPair& a, const GassmannPair& b) {
    Members a1(a.h1.members().begin(), a.h1.members().end());
    Members b1(b.h1.members().begin(), b.h1.members().end());
    if (a1 != b1) return a1 < b1;
    return Members(a.h2.members().begin(), a.h2.members().end()) <
           Members(b.h2.members().begin(), b.h2.members().end());
  });
  return pairs;
}

}  // namespace sunada::group
