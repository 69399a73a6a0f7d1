#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehrenfest/group.hpp"

namespace ehrenfest {

// Group-family descriptor. Text form:
//   symmetric:R | cyclic:R | dihedral:R | cayley:PATH | product(SPEC,SPEC)
struct GroupSpec {
  enum class Family { symmetric, cyclic, dihedral, product, cayley };

  Family family = Family::cyclic;
  int degree = 0;
  std::string path;
  std::vector<GroupSpec> factors;

  static GroupSpec symmetric(int r) { return {Family::symmetric, r, {}, {}}; }
  static GroupSpec cyclic(int r) { return {Family::cyclic, r, {}, {}}; }
  static GroupSpec dihedral(int r) { return {Family::dihedral, r, {}, {}}; }
  static GroupSpec cayley(std::string file) { return {Family::cayley, 0, std::move(file), {}}; }
  static GroupSpec product(GroupSpec a, GroupSpec b) { return {Family::product, 0, {}, {std::move(a), std::move(b)}}; }

  static GroupSpec parse(std::string_view text) {
    auto trim = [](std::string_view v) {
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
      return v;
    };
    text = trim(text);
    if (text.starts_with("product(") && text.ends_with(")")) {
      auto inner = text.substr(8, text.size() - 9);
      int depth = 0;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        if (inner[i] == '(') ++depth;
        else if (inner[i] == ')') --depth;
        else if (inner[i] == ',' && depth == 0) return product(parse(inner.substr(0, i)), parse(inner.substr(i + 1)));
      }
      throw ValidationError("product spec needs two comma-separated factors: " + std::string(text));
    }
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ValidationError("unrecognized group family: " + std::string(text));
    const auto name = text.substr(0, colon);
    const auto arg = trim(text.substr(colon + 1));
    if (name == "cayley") return cayley(std::string(arg));
    int value = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw ValidationError("group family parameter must be an integer: " + std::string(text));
    }
    if (name == "symmetric") return symmetric(value);
    if (name == "cyclic") return cyclic(value);
    if (name == "dihedral") return dihedral(value);
    throw ValidationError("unrecognized group family: " + std::string(name));
  }

  std::string to_string() const {
    switch (family) {
      case Family::symmetric: return "symmetric:" + std::to_string(degree);
      case Family::cyclic: return "cyclic:" + std::to_string(degree);
      case Family::dihedral: return "dihedral:" + std::to_string(degree);
      case Family::cayley: return "cayley:" + path;
      case Family::product: return "product(" + factors[0].to_string() + "," + factors[1].to_string() + ")";
    }
    return {};
  }

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

namespace detail {

inline std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

inline std::string_view trim(std::string_view v) {
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  return v;
}

// Splits at separators outside parentheses.
inline std::vector<std::string_view> split_top_level(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    else if (text[i] == ')') --depth;
    else if (text[i] == sep && depth == 0) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(text.substr(start)));
  return parts;
}

// "a", "a3" -> exponent; "e" -> 0.
inline std::optional<int> parse_power_of_a(std::string_view text) {
  if (text == "e") return 0;
  if (!text.starts_with('a')) return std::nullopt;
  if (text.size() == 1) return 1;
  return parse_int(text.substr(1));
}

}  // namespace detail

// A group together with the family it was built from, so elements can be
// named and parsed in family syntax:
//   any family  integer index, e.g. "5"
//   symmetric   cycle notation on 0..r-1, e.g. "(0 1)(2 3)"; "e" or "()"
//   cyclic      "e", "a", "aK"
//   dihedral    "e", "a", "aK", "b", "ab", "aKb"
//   product     "LEFT|RIGHT"
class NamedGroup {
 public:
  static NamedGroup build(const GroupSpec& spec) {
    NamedGroup named;
    named.spec_ = spec;
    switch (spec.family) {
      case GroupSpec::Family::symmetric:
        named.group_ = symmetric_group(spec.degree);
        named.perms_ = lexicographic_permutations(spec.degree);
        break;
      case GroupSpec::Family::cyclic: named.group_ = cyclic_group(spec.degree); break;
      case GroupSpec::Family::dihedral: named.group_ = dihedral_group(spec.degree); break;
      case GroupSpec::Family::cayley: {
        std::ifstream in(spec.path);
        if (!in) throw ValidationError("cannot open Cayley table file: " + spec.path);
        named.group_ = read_cayley_table(in);
        break;
      }
      case GroupSpec::Family::product:
        if (spec.factors.size() != 2) throw ValidationError("product needs exactly two factors");
        named.factors_.push_back(build(spec.factors[0]));
        named.factors_.push_back(build(spec.factors[1]));
        named.group_ = direct_product(named.factors_[0].group(), named.factors_[1].group());
        break;
    }
    return named;
  }

  const GroupSpec& spec() const { return spec_; }
  const FiniteGroup& group() const { return *group_; }

  Element parse_element(std::string_view text) const {
    text = detail::trim(text);
    if (auto index = detail::parse_int(text)) {
      if (!group().contains(*index)) throw ValidationError("element index out of range: " + std::string(text));
      return *index;
    }
    const int r = spec_.degree;
    switch (spec_.family) {
      case GroupSpec::Family::symmetric: return parse_cycles(text);
      case GroupSpec::Family::cyclic:
        if (auto k = detail::parse_power_of_a(text)) return ((*k % r) + r) % r;
        break;
      case GroupSpec::Family::dihedral: {
        bool reflect = false;
        std::string_view rot = text;
        if (text == "b") return r;
        if (text.ends_with('b')) {
          reflect = true;
          rot = text.substr(0, text.size() - 1);
        }
        if (auto k = detail::parse_power_of_a(rot)) return (reflect ? r : 0) + ((*k % r) + r) % r;
        break;
      }
      case GroupSpec::Family::product: {
        const auto bar = text.find('|');
        if (bar == std::string_view::npos) break;
        const Element g = factors_[0].parse_element(text.substr(0, bar));
        const Element h = factors_[1].parse_element(text.substr(bar + 1));
        return static_cast<Element>(static_cast<std::size_t>(g) * factors_[1].group().order() +
                                    static_cast<std::size_t>(h));
      }
      case GroupSpec::Family::cayley: break;
    }
    throw ValidationError("cannot parse element '" + std::string(text) + "' in " + spec_.to_string());
  }

  std::string element_name(Element g) const {
    const int r = spec_.degree;
    switch (spec_.family) {
      case GroupSpec::Family::symmetric: return cycle_notation(perms_[static_cast<std::size_t>(g)]);
      case GroupSpec::Family::cyclic: return power_name(g);
      case GroupSpec::Family::dihedral: return g < r ? power_name(g) : (g == r ? "b" : power_name(g - r) + "b");
      case GroupSpec::Family::product: {
        const auto nr = factors_[1].group().order();
        return factors_[0].element_name(static_cast<Element>(static_cast<std::size_t>(g) / nr)) + "|" +
               factors_[1].element_name(static_cast<Element>(static_cast<std::size_t>(g) % nr));
      }
      case GroupSpec::Family::cayley: break;
    }
    return std::to_string(g);
  }

  // Subgroup text: "trivial", "diagonal" (product of two equal factors),
  // "stabilizer" (symmetric: permutations fixing r-1), or a comma-separated
  // generator list.
  Subgroup parse_subgroup(std::string_view text) const {
    text = detail::trim(text);
    if (text.empty() || text == "trivial") return subgroup_closure(group(), {});
    if (text == "diagonal") {
      if (spec_.family != GroupSpec::Family::product || !(spec_.factors[0] == spec_.factors[1])) {
        throw ValidationError("diagonal subgroup needs a product of two equal factors");
      }
      const auto n = factors_[0].group().order();
      std::vector<Element> members;
      for (std::size_t g = 0; g < n; ++g) members.push_back(static_cast<Element>(g * n + g));
      return Subgroup(group(), std::move(members));
    }
    if (text == "stabilizer") {
      if (spec_.family != GroupSpec::Family::symmetric) throw ValidationError("stabilizer subgroup needs a symmetric group");
      std::vector<Element> members;
      for (std::size_t g = 0; g < perms_.size(); ++g)
        if (perms_[g].back() == spec_.degree - 1) members.push_back(static_cast<Element>(g));
      return Subgroup(group(), std::move(members));
    }
    std::vector<Element> generators;
    for (auto part : detail::split_top_level(text, ',')) generators.push_back(parse_element(part));
    return subgroup_closure(group(), generators);
  }

 private:
  NamedGroup() = default;

  Element parse_cycles(std::string_view text) const {
    const int r = spec_.degree;
    std::vector<int> perm(static_cast<std::size_t>(r));
    std::iota(perm.begin(), perm.end(), 0);
    if (text == "e") return 0;
    std::size_t pos = 0;
    // Cycles compose right to left, matching the group product.
    std::vector<std::vector<int>> cycles;
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
        continue;
      }
      if (text[pos] != '(') throw ValidationError("bad cycle notation: " + std::string(text));
      const auto close = text.find(')', pos);
      if (close == std::string_view::npos) throw ValidationError("unbalanced cycle notation: " + std::string(text));
      std::vector<int> cycle;
      std::istringstream body{std::string(text.substr(pos + 1, close - pos - 1))};
      int point = 0;
      while (body >> point) {
        if (point < 0 || point >= r) throw ValidationError("cycle point out of range: " + std::string(text));
        if (std::find(cycle.begin(), cycle.end(), point) != cycle.end())
          throw ValidationError("repeated point in cycle: " + std::string(text));
        cycle.push_back(point);
      }
      if (!body.eof()) throw ValidationError("bad cycle notation: " + std::string(text));
      cycles.push_back(std::move(cycle));
      pos = close + 1;
    }
    for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
      const auto& c = *it;
      std::vector<int> step(static_cast<std::size_t>(r));
      std::iota(step.begin(), step.end(), 0);
      for (std::size_t i = 0; i < c.size(); ++i) step[static_cast<std::size_t>(c[i])] = c[(i + 1) % c.size()];
      // perm := step o perm
      for (auto& v : perm) v = step[static_cast<std::size_t>(v)];
    }
    return permutation_rank(perm);
  }

  static std::string cycle_notation(const std::vector<int>& perm) {
    std::string out;
    std::vector<char> seen(perm.size(), 0);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (seen[i] || perm[i] == static_cast<int>(i)) continue;
      out += '(';
      std::size_t j = i;
      bool first = true;
      while (!seen[j]) {
        seen[j] = 1;
        if (!first) out += ' ';
        out += std::to_string(j);
        first = false;
        j = static_cast<std::size_t>(perm[j]);
      }
      out += ')';
    }
    return out.empty() ? "e" : out;
  }

  static std::string power_name(Element k) {
    if (k == 0) return "e";
    if (k == 1) return "a";
    return "a" + std::to_string(k);
  }

  GroupSpec spec_;
  std::optional<FiniteGroup> group_;
  std::vector<std::vector<int>> perms_;
  std::vector<NamedGroup> factors_;
};

// A named (K, L, x0) triple in text form, as accepted by the CLI.
struct PairSpec {
  std::string family;
  std::string subgroup;
  std::string x0;

  HomogeneousSpace build() const {
    const auto named = NamedGroup::build(GroupSpec::parse(family));
    auto sub = named.parse_subgroup(subgroup);
    Element gen = -1;
    if (x0.empty()) {
      for (Element g = 0; g < static_cast<Element>(named.group().order()); ++g)
        if (!sub.contains(g)) {
          gen = g;
          break;
        }
      if (gen < 0) throw ValidationError("L = K leaves no generator outside L");
    } else {
      gen = named.parse_element(x0);
    }
    return HomogeneousSpace(named.group(), std::move(sub), gen);
  }

  std::string label() const { return family + " / " + subgroup + " / " + x0; }
};

// Example families with their standard subgroup and generator:
// (S_r, S_{r-1}), (Z_r, {e}), (D_r, <b>), (K x K, diag K).
inline PairSpec symmetric_pair(int r) { return {"symmetric:" + std::to_string(r), "stabilizer", "(0 " + std::to_string(r - 1) + ")"}; }
inline PairSpec cyclic_pair(int r) { return {"cyclic:" + std::to_string(r), "trivial", "a"}; }
inline PairSpec dihedral_pair(int r) { return {"dihedral:" + std::to_string(r), "b", "a"}; }
inline PairSpec diagonal_pair(const std::string& factor, const std::string& x0_left) {
  return {"product(" + factor + "," + factor + ")", "diagonal", x0_left + "|e"};
}

// Every built-in Gelfand pair with |K| <= 1296.
inline std::vector<PairSpec> builtin_pairs() {
  std::vector<PairSpec> pairs;
  for (int r = 2; r <= 6; ++r) pairs.push_back(symmetric_pair(r));
  for (int r = 2; r <= 12; ++r) pairs.push_back(cyclic_pair(r));
  for (int r = 3; r <= 12; ++r) pairs.push_back(dihedral_pair(r));
  pairs.push_back(diagonal_pair("symmetric:3", "(0 1)"));
  pairs.push_back(diagonal_pair("symmetric:4", "(0 1)"));
  pairs.push_back(diagonal_pair("dihedral:4", "a"));
  pairs.push_back(diagonal_pair("dihedral:5", "b"));
  pairs.push_back(diagonal_pair("cyclic:5", "a"));
  return pairs;
}

}  // namespace ehrenfest
