#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ehrenfest/error.hpp"

namespace ehrenfest {

inline constexpr std::uint64_t kMaxCompositions = 10'000'000;

// A vector k in X(s, n): s nonnegative parts summing to n.
struct Composition {
  std::vector<int> parts;

  int total() const {
    int sum = 0;
    for (int k : parts) sum += k;
    return sum;
  }
  std::size_t size() const { return parts.size(); }
  int operator[](std::size_t i) const { return parts[i]; }

  // "k0|k1|..."
  std::string label() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += '|';
      out += std::to_string(parts[i]);
    }
    return out;
  }

  friend auto operator<=>(const Composition&, const Composition&) = default;
};

inline std::string composition_label(std::span<const int> parts) {
  return Composition{{parts.begin(), parts.end()}}.label();
}

// Number of compositions of n into s parts, saturating at kMaxCompositions + 1.
inline std::uint64_t composition_count(int s, int n) {
  if (s <= 0) return n == 0 ? 1 : 0;
  // C(n + s - 1, s - 1)
  const std::uint64_t k = static_cast<std::uint64_t>(s - 1);
  const std::uint64_t top = static_cast<std::uint64_t>(n) + k;
  long double value = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) {
    value = value * static_cast<long double>(top - k + i) / static_cast<long double>(i);
    if (value > static_cast<long double>(kMaxCompositions) + 1.0L) return kMaxCompositions + 1;
  }
  return static_cast<std::uint64_t>(value + 0.5L);
}

// X(s, n) in reverse-lexicographic order starting at (n, 0, ..., 0). The
// position in this list is the canonical type index everywhere.
class CompositionSet {
 public:
  CompositionSet(int s, int n) : s_(s), n_(n) {
    if (s < 1) throw ParameterError("composition length must be >= 1");
    if (n < 0) throw ParameterError("composition total must be >= 0");
    const auto count = composition_count(s, n);
    if (count > kMaxCompositions) {
      throw GuardExceeded("|X(" + std::to_string(s) + ", " + std::to_string(n) + ")| exceeds " +
                          std::to_string(kMaxCompositions));
    }
    size_ = static_cast<std::size_t>(count);
    counts_.assign(static_cast<std::size_t>(s + 1), std::vector<std::uint64_t>(static_cast<std::size_t>(n + 1), 0));
    for (int len = 0; len <= s; ++len)
      for (int tot = 0; tot <= n; ++tot)
        counts_[static_cast<std::size_t>(len)][static_cast<std::size_t>(tot)] = composition_count(len, tot);
    data_.reserve(size_ * static_cast<std::size_t>(s));
    std::vector<int> cur(static_cast<std::size_t>(s), 0);
    generate(0, n, cur);
  }

  int s() const { return s_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }

  std::span<const int> operator[](std::size_t idx) const {
    return {data_.data() + idx * static_cast<std::size_t>(s_), static_cast<std::size_t>(s_)};
  }
  Composition at(std::size_t idx) const {
    const auto v = (*this)[idx];
    return Composition{{v.begin(), v.end()}};
  }

  std::size_t rank(std::span<const int> k) const {
    if (k.size() != static_cast<std::size_t>(s_)) throw ParameterError("composition has the wrong length");
    std::uint64_t rank = 0;
    int remaining = n_;
    for (int p = 0; p + 1 < s_; ++p) {
      const int kp = k[static_cast<std::size_t>(p)];
      if (kp < 0 || kp > remaining) throw ParameterError("not a composition of n");
      for (int a = kp + 1; a <= remaining; ++a)
        rank += counts_[static_cast<std::size_t>(s_ - p - 1)][static_cast<std::size_t>(remaining - a)];
      remaining -= kp;
    }
    if (k[static_cast<std::size_t>(s_ - 1)] != remaining) throw ParameterError("not a composition of n");
    return static_cast<std::size_t>(rank);
  }
  std::size_t rank(const Composition& k) const { return rank(std::span<const int>(k.parts)); }

  // Index of (n, 0, ..., 0).
  static constexpr std::size_t identity_index() { return 0; }

  std::string label(std::size_t idx) const { return composition_label((*this)[idx]); }

 private:
  void generate(int pos, int remaining, std::vector<int>& cur) {
    if (pos == s_ - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      data_.insert(data_.end(), cur.begin(), cur.end());
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      cur[static_cast<std::size_t>(pos)] = a;
      generate(pos + 1, remaining - a, cur);
    }
  }

  int s_, n_;
  std::size_t size_ = 0;
  std::vector<int> data_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

inline std::vector<Composition> compositions(int s, int n) {
  const CompositionSet set(s, n);
  std::vector<Composition> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.at(i));
  return out;
}

}  // namespace ehrenfest
