#include "sunada/group.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sunada/errors.hpp"

namespace sunada::group {

namespace {

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Point x : p) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Dense Cayley tables above this order would not fit comfortably in memory.
constexpr std::size_t kDenseTableOrder = 2048;

bool is_space(char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (is_space(s.front()) || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (is_space(s.back()) || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

}  // namespace

Permutation parse_cycles(std::string_view text, std::size_t degree) {
  Permutation p(degree);
  std::iota(p.begin(), p.end(), Point{0});
  std::vector<bool> used(degree, false);

  std::string_view rest = trim(text);
  if (rest.empty()) throw ParseError("empty cycle string");
  while (!rest.empty()) {
    if (rest.front() != '(') throw ParseError("expected '(' in cycle string \"" + std::string(text) + "\"");
    const auto close = rest.find(')');
    if (close == std::string_view::npos)
      throw ParseError("unterminated cycle in \"" + std::string(text) + "\"");
    std::string_view body = rest.substr(1, close - 1);
    rest = trim(rest.substr(close + 1));

    std::vector<Point> cycle;
    while (true) {
      while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
      if (body.empty()) break;
      Point value = 0;
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
      if (ec != std::errc{} || ptr == body.data())
        throw ParseError("bad point in cycle string \"" + std::string(text) + "\"");
      if (value >= degree)
        throw ParseError("point " + std::to_string(value) + " out of range for degree " +
                         std::to_string(degree));
      if (used[value])
        throw ParseError("point " + std::to_string(value) + " repeated in \"" + std::string(text) + "\"");
      used[value] = true;
      cycle.push_back(value);
      body.remove_prefix(static_cast<std::size_t>(ptr - body.data()));
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) p[cycle[i]] = cycle[(i + 1) % cycle.size()];
  }
  return p;
}

std::string format_cycles(const Permutation& p) {
  std::string out;
  std::vector<bool> seen(p.size(), false);
  for (Point start = 0; start < p.size(); ++start) {
    if (seen[start] || p[start] == start) continue;
    out += '(';
    Point x = start;
    bool first = true;
    while (!seen[x]) {
      seen[x] = true;
      if (!first) out += ' ';
      out += std::to_string(x);
      first = false;
      x = p[x];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation r(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
  return r;
}

Permutation invert(const Permutation& p) {
  Permutation r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<Point>(i);
  return r;
}

// ---------------------------------------------------------------------------

struct FiniteGroup::Data {
  std::size_t degree = 0;
  std::vector<Permutation> elements;
  std::vector<ElementId> generators;
  std::unordered_map<Permutation, ElementId, PermutationHash> lookup;
  std::vector<ElementId> inverses;
  std::vector<ElementId> table;  // row-major a*order+b, empty when too large
};

FiniteGroup FiniteGroup::from_generators(std::size_t degree, std::vector<Permutation> generators,
                                         std::size_t element_cap) {
  if (degree == 0) throw PreconditionError("group degree must be positive");
  for (const auto& g : generators) {
    if (g.size() != degree) throw PreconditionError("generator degree mismatch");
    std::vector<bool> hit(degree, false);
    for (Point x : g) {
      if (x >= degree || hit[x]) throw PreconditionError("generator is not a permutation");
      hit[x] = true;
    }
  }

  auto data = std::make_shared<Data>();
  data->degree = degree;
  Permutation id(degree);
  std::iota(id.begin(), id.end(), Point{0});
  data->elements.push_back(id);
  data->lookup.emplace(id, 0);

  for (std::size_t i = 0; i < data->elements.size(); ++i) {
    for (const auto& g : generators) {
      Permutation next = compose(data->elements[i], g);
      if (data->lookup.contains(next)) continue;
      if (data->elements.size() >= element_cap)
        throw LimitError("group closure exceeds element cap " + std::to_string(element_cap));
      data->lookup.emplace(next, static_cast<ElementId>(data->elements.size()));
      data->elements.push_back(std::move(next));
    }
  }

  for (const auto& g : generators) data->generators.push_back(data->lookup.at(g));

  const std::size_t n = data->elements.size();
  data->inverses.resize(n);
  for (std::size_t i = 0; i < n; ++i) data->inverses[i] = data->lookup.at(invert(data->elements[i]));

  if (n <= kDenseTableOrder) {
    data->table.resize(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        data->table[a * n + b] = data->lookup.at(compose(data->elements[a], data->elements[b]));
  }

  FiniteGroup out;
  out.data_ = std::move(data);
  return out;
}

std::size_t FiniteGroup::degree() const { return data_->degree; }
std::size_t FiniteGroup::order() const { return data_->elements.size(); }
const Permutation& FiniteGroup::element(ElementId id) const { return data_->elements.at(id); }
std::span<const ElementId> FiniteGroup::generators() const { return data_->generators; }

ElementId FiniteGroup::multiply(ElementId a, ElementId b) const {
  if (!data_->table.empty()) return data_->table[static_cast<std::size_t>(a) * order() + b];
  return data_->lookup.at(compose(data_->elements[a], data_->elements[b]));
}

ElementId FiniteGroup::inverse(ElementId a) const { return data_->inverses[a]; }
Point FiniteGroup::apply(ElementId g, Point x) const { return data_->elements[g][x]; }

std::optional<ElementId> FiniteGroup::find(const Permutation& p) const {
  auto it = data_->lookup.find(p);
  if (it == data_->lookup.end()) return std::nullopt;
  return it->second;
}

FiniteGroup parse_group(std::span<const std::string> generators, std::size_t degree,
                        std::size_t element_cap) {
  std::vector<Permutation> perms;
  perms.reserve(generators.size());
  for (const auto& s : generators) perms.push_back(parse_cycles(s, degree));
  return FiniteGroup::from_generators(degree, std::move(perms), element_cap);
}

FiniteGroup parse_group_text(std::string_view text, std::size_t element_cap) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::size_t> degree;
  std::vector<std::string> gens;
  while (std::getline(in, line)) {
    std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    if (!degree) {
      constexpr std::string_view key = "degree:";
      if (l.substr(0, key.size()) != key) throw ParseError("group file must start with 'degree: N'");
      std::string_view num = trim(l.substr(key.size()));
      std::size_t value = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
      if (ec != std::errc{} || ptr != num.data() + num.size() || value == 0)
        throw ParseError("bad degree line '" + std::string(l) + "'");
      degree = value;
      continue;
    }
    gens.emplace_back(l);
  }
  if (!degree) throw ParseError("group file has no 'degree: N' line");
  if (gens.empty()) gens.emplace_back("()");
  return parse_group(gens, *degree, element_cap);
}

FiniteGroup load_group_file(const std::filesystem::path& path, std::size_t element_cap) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open group file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_group_text(buf.str(), element_cap);
}

// ---------------------------------------------------------------------------

Subgroup::Subgroup(FiniteGroup parent, std::vector<ElementId> members)
    : parent_(std::move(parent)), members_(std::move(members)), mask_(parent_.order(), false) {
  std::sort(members_.begin(), members_.end());
  for (ElementId m : members_) mask_[m] = true;
}

Subgroup Subgroup::generated_by(const FiniteGroup& parent, std::span<const ElementId> generators) {
  std::vector<bool> in(parent.order(), false);
  std::vector<ElementId> members{parent.identity()};
  in[parent.identity()] = true;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (ElementId g : generators) {
      ElementId next = parent.multiply(members[i], g);
      if (!in[next]) {
        in[next] = true;
        members.push_back(next);
      }
    }
  }
  return Subgroup(parent, std::move(members));
}

Subgroup Subgroup::from_members(const FiniteGroup& parent, std::vector<ElementId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::vector<bool> in(parent.order(), false);
  for (ElementId m : members) {
    if (m >= parent.order()) throw PreconditionError("subgroup member index out of range");
    in[m] = true;
  }
  if (members.empty() || !in[parent.identity()])
    throw PreconditionError("subgroup does not contain the identity");
  for (ElementId a : members) {
    if (!in[parent.inverse(a)]) throw PreconditionError("subgroup not closed under inverse");
    for (ElementId b : members)
      if (!in[parent.multiply(a, b)]) throw PreconditionError("subgroup not closed under composition");
  }
  return Subgroup(parent, std::move(members));
}

Subgroup Subgroup::whole(const FiniteGroup& parent) {
  std::vector<ElementId> all(parent.order());
  std::iota(all.begin(), all.end(), ElementId{0});
  return Subgroup(parent, std::move(all));
}

Subgroup Subgroup::trivial(const FiniteGroup& parent) { return Subgroup(parent, {parent.identity()}); }

Subgroup point_stabilizer(const FiniteGroup& g, Point x) {
  if (x >= g.degree()) throw PreconditionError("stabilized point out of range");
  std::vector<ElementId> members;
  for (ElementId e = 0; e < g.order(); ++e)
    if (g.apply(e, x) == x) members.push_back(e);
  return Subgroup::from_members(g, std::move(members));
}

Subgroup set_stabilizer(const FiniteGroup& g, std::span<const Point> points) {
  std::vector<bool> in_set(g.degree(), false);
  for (Point p : points) {
    if (p >= g.degree()) throw PreconditionError("stabilized point out of range");
    in_set[p] = true;
  }
  std::vector<ElementId> members;
  for (ElementId e = 0; e < g.order(); ++e) {
    bool keeps = std::all_of(points.begin(), points.end(), [&](Point p) { return in_set[g.apply(e, p)]; });
    if (keeps) members.push_back(e);
  }
  return Subgroup::from_members(g, std::move(members));
}

Subgroup conjugate(const Subgroup& h, ElementId c) {
  const FiniteGroup& g = h.parent();
  const ElementId ci = g.inverse(c);
  std::vector<ElementId> members;
  members.reserve(h.order());
  for (ElementId x : h.members()) members.push_back(g.multiply(g.multiply(c, x), ci));
  return Subgroup::from_members(g, std::move(members));
}

std::optional<ElementId> conjugating_element(const Subgroup& h1, const Subgroup& h2) {
  const FiniteGroup& g = h1.parent();
  if (!(g == h2.parent()) || h1.order() != h2.order()) return std::nullopt;
  for (ElementId c = 0; c < g.order(); ++c) {
    const ElementId ci = g.inverse(c);
    bool ok = true;
    for (ElementId x : h1.members()) {
      if (!h2.contains(g.multiply(g.multiply(c, x), ci))) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  return std::nullopt;
}

Partition conjugacy_classes(const FiniteGroup& g) {
  Partition classes;
  std::vector<bool> seen(g.order(), false);
  for (ElementId x = 0; x < g.order(); ++x) {
    if (seen[x]) continue;
    std::vector<ElementId> cls{x};
    seen[x] = true;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (ElementId s : g.generators()) {
        ElementId y = g.multiply(g.multiply(s, cls[i]), g.inverse(s));
        if (!seen[y]) {
          seen[y] = true;
          cls.push_back(y);
        }
      }
    }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

namespace {

void require_parent(const FiniteGroup& g, const Subgroup& h) {
  if (!(h.parent() == g)) throw PreconditionError("subgroup belongs to a different group");
}

}  // namespace

Partition cosets(const FiniteGroup& g, const Subgroup& h, Side side) {
  require_parent(g, h);
  Partition blocks;
  std::vector<bool> seen(g.order(), false);
  for (ElementId x = 0; x < g.order(); ++x) {
    if (seen[x]) continue;
    std::vector<ElementId> block;
    block.reserve(h.order());
    for (ElementId m : h.members()) {
      ElementId y = side == Side::left ? g.multiply(x, m) : g.multiply(m, x);
      seen[y] = true;
      block.push_back(y);
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

Partition double_cosets(const FiniteGroup& g, const Subgroup& h2, const Subgroup& h1) {
  require_parent(g, h1);
  require_parent(g, h2);
  Partition blocks;
  std::vector<bool> seen(g.order(), false);
  for (ElementId a = 0; a < g.order(); ++a) {
    if (seen[a]) continue;
    std::vector<ElementId> block;
    for (ElementId b2 : h2.members()) {
      ElementId left = g.multiply(b2, a);
      for (ElementId b1 : h1.members()) {
        ElementId y = g.multiply(left, b1);
        if (!seen[y]) {
          seen[y] = true;
          block.push_back(y);
        }
      }
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<std::size_t> permutation_character(const FiniteGroup& g, const Subgroup& h) {
  require_parent(g, h);
  std::vector<std::size_t> chi;
  for (const auto& cls : conjugacy_classes(g)) {
    const ElementId c = cls.front();
    std::size_t fixed = 0;
    for (ElementId x = 0; x < g.order(); ++x)
      if (h.contains(g.multiply(g.multiply(g.inverse(x), c), x))) ++fixed;
    chi.push_back(fixed / h.order());
  }
  return chi;
}

GassmannCertificate is_gassmann(const FiniteGroup& g, const Subgroup& h1, const Subgroup& h2) {
  require_parent(g, h1);
  require_parent(g, h2);
  GassmannCertificate cert;
  cert.order_mismatch = h1.order() != h2.order();
  bool equal = !cert.order_mismatch;
  for (const auto& cls : conjugacy_classes(g)) {
    std::size_t c1 = 0;
    std::size_t c2 = 0;
    for (ElementId x : cls) {
      c1 += h1.contains(x) ? 1 : 0;
      c2 += h2.contains(x) ? 1 : 0;
    }
    cert.class_representatives.push_back(cls.front());
    cert.class_sizes.push_back(cls.size());
    cert.counts_h1.push_back(c1);
    cert.counts_h2.push_back(c2);
    equal = equal && c1 == c2;
  }
  cert.verdict = equal;
  return cert;
}

}  // namespace sunada::group
