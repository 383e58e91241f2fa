#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sunada/defaults.hpp"

namespace sunada::group {

using Point = std::uint32_t;
using ElementId = std::uint32_t;

/// Permutation of {0..degree-1}; p[i] is the image of i.
using Permutation = std::vector<Point>;

/// Parses cycle notation such as "(0 1 2)(3 4)" or "()" into a permutation.
Permutation parse_cycles(std::string_view text, std::size_t degree);

/// Cycle notation with fixed points omitted; the identity prints as "()".
std::string format_cycles(const Permutation& p);

/// a∘b, i.e. b is applied first.
Permutation compose(const Permutation& a, const Permutation& b);
Permutation invert(const Permutation& p);

/// Finite permutation group given by generators, with elements enumerated
/// breadth-first from the identity (index 0), generators in the given order.
///
/// Copies share the immutable element tables.
class FiniteGroup {
 public:
  static FiniteGroup from_generators(std::size_t degree, std::vector<Permutation> generators,
                                     std::size_t element_cap = defaults::element_cap);

  std::size_t degree() const;
  std::size_t order() const;
  ElementId identity() const { return 0; }

  const Permutation& element(ElementId id) const;
  std::span<const ElementId> generators() const;

  /// Product a∘b: b acts first, so (ab)·x = a·(b·x).
  ElementId multiply(ElementId a, ElementId b) const;
  ElementId inverse(ElementId a) const;
  Point apply(ElementId g, Point x) const;
  std::optional<ElementId> find(const Permutation& p) const;

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) { return a.data_ == b.data_; }

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// Closure of cycle-notation generator strings acting on `degree` points.
FiniteGroup parse_group(std::span<const std::string> generators, std::size_t degree,
                        std::size_t element_cap = defaults::element_cap);

/// Group fixture text: a `degree: N` line followed by one generator per line.
/// Blank lines and lines starting with '#' are ignored.
FiniteGroup parse_group_text(std::string_view text,
                             std::size_t element_cap = defaults::element_cap);
FiniteGroup load_group_file(const std::filesystem::path& path,
                            std::size_t element_cap = defaults::element_cap);

/// Subgroup of a FiniteGroup, stored as a sorted list of element indices.
class Subgroup {
 public:
  /// Closure of the given elements inside `parent`.
  static Subgroup generated_by(const FiniteGroup& parent, std::span<const ElementId> generators);
  /// Validates that `members` is a subgroup; throws PreconditionError otherwise.
  static Subgroup from_members(const FiniteGroup& parent, std::vector<ElementId> members);
  static Subgroup whole(const FiniteGroup& parent);
  static Subgroup trivial(const FiniteGroup& parent);

  const FiniteGroup& parent() const { return parent_; }
  std::span<const ElementId> members() const { return members_; }
  std::size_t order() const { return members_.size(); }
  std::size_t index() const { return parent_.order() / members_.size(); }
  bool contains(ElementId g) const { return mask_[g]; }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.parent_ == b.parent_ && a.members_ == b.members_;
  }

 private:
  Subgroup(FiniteGroup parent, std::vector<ElementId> members);

  FiniteGroup parent_;
  std::vector<ElementId> members_;
  std::vector<bool> mask_;
};

Subgroup point_stabilizer(const FiniteGroup& g, Point x);
/// Setwise stabilizer of `points`.
Subgroup set_stabilizer(const FiniteGroup& g, std::span<const Point> points);
/// g H g^-1.
Subgroup conjugate(const Subgroup& h, ElementId g);
/// Returns a conjugating element c with c H1 c^-1 = H2, if one exists.
std::optional<ElementId> conjugating_element(const Subgroup& h1, const Subgroup& h2);

/// Partition of element indices; each block sorted, blocks ordered by their
/// smallest element (the canonical representative).
using Partition = std::vector<std::vector<ElementId>>;

Partition conjugacy_classes(const FiniteGroup& g);

enum class Side { left, right };

/// Left cosets gH or right cosets Hg.
Partition cosets(const FiniteGroup& g, const Subgroup& h, Side side);

/// Double cosets H2 a H1.
Partition double_cosets(const FiniteGroup& g, const Subgroup& h2, const Subgroup& h1);

/// Number of left cosets gH fixed by a representative of each conjugacy
/// class, in conjugacy_classes() order.
std::vector<std::size_t> permutation_character(const FiniteGroup& g, const Subgroup& h);

struct GassmannCertificate {
  std::vector<ElementId> class_representatives;
  std::vector<std::size_t> class_sizes;
  std::vector<std::size_t> counts_h1;  ///< |C ∩ H1| per class
  std::vector<std::size_t> counts_h2;  ///< |C ∩ H2| per class
  bool order_mismatch = false;
  bool verdict = false;
};

/// Class-intersection test |C ∩ H1| = |C ∩ H2| for every conjugacy class C.
GassmannCertificate is_gassmann(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2);

struct GassmannPair {
  Subgroup h1;
  Subgroup h2;
};

/// Non-conjugate Gassmann pairs among subgroup classes of index <= index_bound.
/// Exhaustive over the subgroup lattice for |G| <= defaults::exhaustive_search_order,
/// otherwise restricted to point and set stabilizers.
std::vector<GassmannPair> gassmann_search(const FiniteGroup& g, std::size_t index_bound);

/// Conjugacy-class representatives of all subgroups (exhaustive; for small groups).
std::vector<Subgroup> subgroup_class_representatives(const FiniteGroup& g);

}  // namespace sunada::group
