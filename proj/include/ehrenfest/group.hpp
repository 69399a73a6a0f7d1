#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ehrenfest/error.hpp"

namespace ehrenfest {

using Element = std::int32_t;

// Largest group order accepted anywhere (Cayley tables are stored densely).
inline constexpr std::size_t kMaxGroupOrder = 2048;

// A finite group given by its full multiplication table. Index 0 is the
// identity. Copies share the immutable table.
class FiniteGroup {
 public:
  // Row-major table: table[g * order + h] = g * h. Every axiom is checked;
  // a violation raises ValidationError naming the axiom.
  static FiniteGroup from_cayley_table(std::size_t order, std::vector<Element> table) {
    if (order == 0) throw ValidationError("group order must be positive");
    if (order > kMaxGroupOrder) {
      throw ValidationError("group order " + std::to_string(order) + " exceeds the limit of " +
                            std::to_string(kMaxGroupOrder));
    }
    if (table.size() != order * order) {
      throw ValidationError("non-square Cayley table: expected " + std::to_string(order * order) +
                            " entries, got " + std::to_string(table.size()));
    }
    const auto n = static_cast<Element>(order);
    for (Element v : table) {
      if (v < 0 || v >= n) throw ValidationError("closure: entry " + std::to_string(v) + " out of range");
    }
    std::vector<char> seen(order);
    for (std::size_t g = 0; g < order; ++g) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::size_t h = 0; h < order; ++h) {
        auto& flag = seen[static_cast<std::size_t>(table[g * order + h])];
        if (flag) throw ValidationError("latin square: row " + std::to_string(g) + " is not a bijection");
        flag = 1;
      }
    }
    for (std::size_t h = 0; h < order; ++h) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::size_t g = 0; g < order; ++g) {
        auto& flag = seen[static_cast<std::size_t>(table[g * order + h])];
        if (flag) throw ValidationError("latin square: column " + std::to_string(h) + " is not a bijection");
        flag = 1;
      }
    }
    for (std::size_t g = 0; g < order; ++g) {
      if (table[g] != static_cast<Element>(g) || table[g * order] != static_cast<Element>(g)) {
        throw ValidationError("identity: index 0 is not a two-sided identity (fails at " + std::to_string(g) +
                              ")");
      }
    }

    auto data = std::make_shared<Data>();
    data->order = order;
    data->table = std::move(table);
    data->inverse.assign(order, -1);
    for (std::size_t g = 0; g < order; ++g) {
      for (std::size_t h = 0; h < order; ++h) {
        if (data->table[g * order + h] == 0) {
          data->inverse[g] = static_cast<Element>(h);
          break;
        }
      }
    }

    FiniteGroup group(std::move(data));
    for (std::size_t g = 0; g < order; ++g) {
      const auto x = static_cast<Element>(g);
      if (group.mul(group.inv(x), x) != 0) {
        throw ValidationError("inverse: left and right inverses of " + std::to_string(g) + " differ");
      }
    }
    group.check_associativity();
    return group;
  }

  std::size_t order() const { return data_->order; }
  Element identity() const { return 0; }
  Element mul(Element a, Element b) const {
    return data_->table[static_cast<std::size_t>(a) * data_->order + static_cast<std::size_t>(b)];
  }
  Element inv(Element a) const { return data_->inverse[static_cast<std::size_t>(a)]; }
  bool contains(Element a) const { return a >= 0 && static_cast<std::size_t>(a) < data_->order; }

  bool is_abelian() const {
    for (Element a = 0; a < static_cast<Element>(order()); ++a)
      for (Element b = a + 1; b < static_cast<Element>(order()); ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  std::span<const Element> table() const { return data_->table; }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.data_ == b.data_ || a.data_->table == b.data_->table;
  }

 private:
  struct Data {
    std::size_t order = 0;
    std::vector<Element> table;
    std::vector<Element> inverse;
  };

  explicit FiniteGroup(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  void check_associativity() const {
    const auto n = static_cast<Element>(order());
    auto check = [&](Element a, Element b, Element c) {
      if (mul(mul(a, b), c) != mul(a, mul(b, c))) {
        throw ValidationError("associativity: fails for (" + std::to_string(a) + ", " + std::to_string(b) +
                              ", " + std::to_string(c) + ")");
      }
    };
    if (order() <= 256) {
      for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
          for (Element c = 0; c < n; ++c) check(a, b, c);
      return;
    }
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<Element> pick(0, n - 1);
    for (int trial = 0; trial < 10000; ++trial) check(pick(rng), pick(rng), pick(rng));
  }

  std::shared_ptr<const Data> data_;
};

// Cayley table text format: first line the order, then one row per element
// with the 0-based indices of g*h for h = 0..order-1.
inline FiniteGroup read_cayley_table(std::istream& in) {
  std::string line;
  std::size_t order = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream head(line);
    long long value = 0;
    if (!(head >> value) || value <= 0) throw ValidationError("Cayley table: first line must be a positive order");
    order = static_cast<std::size_t>(value);
    break;
  }
  if (order == 0) throw ValidationError("Cayley table: empty input");
  if (order > kMaxGroupOrder) {
    throw ValidationError("group order " + std::to_string(order) + " exceeds the limit of " +
                          std::to_string(kMaxGroupOrder));
  }
  std::vector<Element> table;
  table.reserve(order * order);
  std::size_t rows = 0;
  while (rows < order && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::size_t count = 0;
    long long v = 0;
    while (row >> v) {
      table.push_back(static_cast<Element>(v));
      ++count;
    }
    if (!row.eof()) throw ValidationError("Cayley table: non-integer token in row " + std::to_string(rows));
    if (count != order) {
      throw ValidationError("non-square Cayley table: row " + std::to_string(rows) + " has " +
                            std::to_string(count) + " entries, expected " + std::to_string(order));
    }
    ++rows;
  }
  if (rows != order) {
    throw ValidationError("non-square Cayley table: " + std::to_string(rows) + " rows, expected " +
                          std::to_string(order));
  }
  return FiniteGroup::from_cayley_table(order, std::move(table));
}

// ---------------------------------------------------------------------------
// Built-in families. Element 0 is always the identity.

// Permutations of {0..r-1} in lexicographic order; product is composition
// (x*y)(i) = x(y(i)).
inline std::vector<std::vector<int>> lexicographic_permutations(int r) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(r));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return perms;
}

inline Element permutation_rank(std::span<const int> perm) {
  const auto r = perm.size();
  std::int64_t rank = 0;
  for (std::size_t i = 0; i < r; ++i) {
    std::int64_t smaller = 0;
    for (std::size_t j = i + 1; j < r; ++j)
      if (perm[j] < perm[i]) ++smaller;
    std::int64_t fact = 1;
    for (std::size_t k = 2; k < r - i; ++k) fact *= static_cast<std::int64_t>(k);
    rank += smaller * fact;
  }
  return static_cast<Element>(rank);
}

inline FiniteGroup symmetric_group(int r) {
  if (r < 1) throw ValidationError("symmetric group degree must be >= 1");
  std::size_t order = 1;
  for (int k = 2; k <= r; ++k) order *= static_cast<std::size_t>(k);
  if (order > kMaxGroupOrder) throw ValidationError("symmetric(" + std::to_string(r) + ") is too large");
  const auto perms = lexicographic_permutations(r);
  std::vector<Element> table(order * order);
  std::vector<int> prod(static_cast<std::size_t>(r));
  for (std::size_t x = 0; x < order; ++x) {
    for (std::size_t y = 0; y < order; ++y) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(r); ++i)
        prod[i] = perms[x][static_cast<std::size_t>(perms[y][i])];
      table[x * order + y] = permutation_rank(prod);
    }
  }
  return FiniteGroup::from_cayley_table(order, std::move(table));
}

inline FiniteGroup cyclic_group(int r) {
  if (r < 1) throw ValidationError("cyclic group order must be >= 1");
  const auto order = static_cast<std::size_t>(r);
  if (order > kMaxGroupOrder) throw ValidationError("cyclic(" + std::to_string(r) + ") is too large");
  std::vector<Element> table(order * order);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) table[static_cast<std::size_t>(i * r + j)] = (i + j) % r;
  return FiniteGroup::from_cayley_table(order, std::move(table));
}

// Index k < r is a^k, index r + k is a^k b, with b a b = a^-1.
inline FiniteGroup dihedral_group(int r) {
  if (r < 1) throw ValidationError("dihedral group parameter must be >= 1");
  const auto order = static_cast<std::size_t>(2 * r);
  if (order > kMaxGroupOrder) throw ValidationError("dihedral(" + std::to_string(r) + ") is too large");
  std::vector<Element> table(order * order);
  for (int x = 0; x < 2 * r; ++x) {
    const int i = x % r, e = x / r;
    for (int y = 0; y < 2 * r; ++y) {
      const int j = y % r, f = y / r;
      const int rot = ((i + (e ? -j : j)) % r + r) % r;
      table[static_cast<std::size_t>(x) * order + static_cast<std::size_t>(y)] = ((e + f) % 2) * r + rot;
    }
  }
  return FiniteGroup::from_cayley_table(order, std::move(table));
}

// (g, h) has index g * |H| + h.
inline FiniteGroup direct_product(const FiniteGroup& left, const FiniteGroup& right) {
  const auto nl = left.order(), nr = right.order();
  const auto order = nl * nr;
  if (order > kMaxGroupOrder) throw ValidationError("direct product of order " + std::to_string(order) + " is too large");
  std::vector<Element> table(order * order);
  for (std::size_t x = 0; x < order; ++x) {
    for (std::size_t y = 0; y < order; ++y) {
      const auto g = left.mul(static_cast<Element>(x / nr), static_cast<Element>(y / nr));
      const auto h = right.mul(static_cast<Element>(x % nr), static_cast<Element>(y % nr));
      table[x * order + y] = static_cast<Element>(static_cast<std::size_t>(g) * nr + static_cast<std::size_t>(h));
    }
  }
  return FiniteGroup::from_cayley_table(order, std::move(table));
}

// ---------------------------------------------------------------------------

// A subgroup L of a parent group K, stored as sorted parent indices.
class Subgroup {
 public:
  Subgroup(FiniteGroup parent, std::vector<Element> members) : parent_(std::move(parent)), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    validate();
  }

  const FiniteGroup& parent() const { return parent_; }
  std::span<const Element> members() const { return members_; }
  std::size_t order() const { return members_.size(); }
  bool contains(Element g) const { return std::binary_search(members_.begin(), members_.end(), g); }

 private:
  void validate() const {
    if (members_.empty() || members_.front() != 0) throw ValidationError("subgroup must contain the identity");
    for (Element g : members_) {
      if (!parent_.contains(g)) throw ValidationError("subgroup member out of range");
      if (!contains(parent_.inv(g))) throw ValidationError("subgroup is not closed under inverses");
      for (Element h : members_)
        if (!contains(parent_.mul(g, h))) throw ValidationError("subgroup is not closed under multiplication");
    }
    if (parent_.order() % members_.size() != 0) throw ValidationError("subgroup order does not divide group order");
  }

  FiniteGroup parent_;
  std::vector<Element> members_;
};

// Least subgroup containing the generators.
inline Subgroup subgroup_closure(const FiniteGroup& parent, std::span<const Element> generators) {
  for (Element g : generators) {
    if (!parent.contains(g)) throw ValidationError("generator index " + std::to_string(g) + " out of range");
  }
  std::vector<char> in(parent.order(), 0);
  std::vector<Element> members{parent.identity()};
  in[0] = 1;
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (Element gen : generators) {
      const Element next = parent.mul(members[head], gen);
      if (!in[static_cast<std::size_t>(next)]) {
        in[static_cast<std::size_t>(next)] = 1;
        members.push_back(next);
      }
    }
  }
  return Subgroup(parent, std::move(members));
}

// Left cosets xL. Coset 0 is L; every coset is represented by its minimal
// element index and cosets are numbered by ascending representative.
struct CosetSpace {
  std::size_t r = 0;
  std::vector<Element> reps;
  std::vector<int> coset_of;
};

inline CosetSpace coset_space(const FiniteGroup& group, const Subgroup& sub) {
  CosetSpace space;
  space.coset_of.assign(group.order(), -1);
  for (Element x = 0; x < static_cast<Element>(group.order()); ++x) {
    if (space.coset_of[static_cast<std::size_t>(x)] >= 0) continue;
    const int id = static_cast<int>(space.reps.size());
    space.reps.push_back(x);
    for (Element h : sub.members()) space.coset_of[static_cast<std::size_t>(group.mul(x, h))] = id;
  }
  space.r = space.reps.size();
  return space;
}

// L-orbits on K/L, i.e. the double cosets L x L. Class 0 is L itself; the
// others are numbered by their minimal coset index. The class of x0 is the
// generator class (the double coset driving the urn moves).
struct DoubleCosetTable {
  std::size_t s = 0;
  std::vector<int> class_of_coset;
  std::vector<std::vector<int>> members;
  std::vector<int> valencies;
  int generator_class = -1;

  int m() const { return valencies[static_cast<std::size_t>(generator_class)]; }
};

inline DoubleCosetTable double_cosets(const FiniteGroup& group, const Subgroup& sub, const CosetSpace& space,
                                      Element x0) {
  if (!group.contains(x0)) throw ValidationError("generator index out of range");
  if (sub.contains(x0)) throw ValidationError("generator must lie outside L");
  DoubleCosetTable table;
  table.class_of_coset.assign(space.r, -1);
  for (std::size_t c = 0; c < space.r; ++c) {
    if (table.class_of_coset[c] >= 0) continue;
    const int id = static_cast<int>(table.members.size());
    std::vector<int> orbit;
    for (Element h : sub.members()) {
      const int d = space.coset_of[static_cast<std::size_t>(group.mul(h, space.reps[c]))];
      if (table.class_of_coset[static_cast<std::size_t>(d)] < 0) {
        table.class_of_coset[static_cast<std::size_t>(d)] = id;
        orbit.push_back(d);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    table.valencies.push_back(static_cast<int>(orbit.size()));
    table.members.push_back(std::move(orbit));
  }
  table.s = table.members.size();
  table.generator_class = table.class_of_coset[static_cast<std::size_t>(space.coset_of[static_cast<std::size_t>(x0)])];
  return table;
}

// K/L together with its double-coset classes and the relation table
// relation(x, y) = class of rep(x)^-1 rep(y). This is the geometry every
// later stage consumes.
class HomogeneousSpace {
 public:
  HomogeneousSpace(FiniteGroup group, Subgroup sub, Element x0)
      : group_(std::move(group)), sub_(std::move(sub)), x0_(x0) {
    if (!(sub_.parent() == group_)) throw ValidationError("subgroup does not belong to the group");
    cosets_ = coset_space(group_, sub_);
    classes_ = double_cosets(group_, sub_, cosets_, x0_);
    const auto r = cosets_.r;
    relation_.resize(r * r);
    for (std::size_t x = 0; x < r; ++x) {
      const Element xinv = group_.inv(cosets_.reps[x]);
      for (std::size_t y = 0; y < r; ++y) {
        const Element q = group_.mul(xinv, cosets_.reps[y]);
        relation_[x * r + y] =
            classes_.class_of_coset[static_cast<std::size_t>(cosets_.coset_of[static_cast<std::size_t>(q)])];
      }
    }
    neighbors_.resize(r);
    for (std::size_t x = 0; x < r; ++x)
      for (std::size_t y = 0; y < r; ++y)
        if (relation_[x * r + y] == classes_.generator_class) neighbors_[x].push_back(static_cast<int>(y));
  }

  const FiniteGroup& group() const { return group_; }
  const Subgroup& subgroup() const { return sub_; }
  Element x0() const { return x0_; }
  const CosetSpace& cosets() const { return cosets_; }
  const DoubleCosetTable& classes() const { return classes_; }

  std::size_t r() const { return cosets_.r; }
  std::size_t s() const { return classes_.s; }
  int m() const { return classes_.m(); }
  int generator_class() const { return classes_.generator_class; }

  int relation(int x, int y) const { return relation_[static_cast<std::size_t>(x) * r() + static_cast<std::size_t>(y)]; }
  // Class of coset x seen from the base coset L.
  int class_of(int x) const { return classes_.class_of_coset[static_cast<std::size_t>(x)]; }
  // Cosets y with rep(x)^-1 rep(y) in the generator double coset; always m of them.
  std::span<const int> neighbors(int x) const { return neighbors_[static_cast<std::size_t>(x)]; }

 private:
  FiniteGroup group_;
  Subgroup sub_;
  Element x0_;
  CosetSpace cosets_;
  DoubleCosetTable classes_;
  std::vector<int> relation_;
  std::vector<std::vector<int>> neighbors_;
};

}  // namespace ehrenfest
