#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace rbacscan {

using RoleId = std::uint32_t;

// Bitset over interned role ids. Trailing zero words are always trimmed, so
// two sets with the same members compare and hash equal. The first two words
// live inline; factories with more than 128 roles spill to the heap.
class RoleSet {
 public:
  RoleSet() = default;
  RoleSet(std::initializer_list<RoleId> ids) {
    for (RoleId id : ids) insert(id);
  }

  bool contains(RoleId id) const {
    const std::size_t w = id / 64;
    return w < n_ && ((word(w) >> (id % 64)) & 1U);
  }

  void insert(RoleId id) {
    const std::size_t w = id / 64;
    if (w >= n_) grow(w + 1);
    word(w) |= std::uint64_t{1} << (id % 64);
  }

  void erase(RoleId id) {
    const std::size_t w = id / 64;
    if (w >= n_) return;
    word(w) &= ~(std::uint64_t{1} << (id % 64));
    trim();
  }

  bool empty() const { return n_ == 0; }

  std::size_t size() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < n_; ++i) n += static_cast<std::size_t>(std::popcount(word(i)));
    return n;
  }

  RoleSet& operator|=(const RoleSet& other) {
    if (other.n_ > n_) grow(other.n_);
    for (std::size_t i = 0; i < other.n_; ++i) word(i) |= other.word(i);
    return *this;
  }

  RoleSet& operator&=(const RoleSet& other) {
    if (n_ > other.n_) n_ = other.n_;
    for (std::size_t i = 0; i < n_; ++i) word(i) &= other.word(i);
    trim();
    return *this;
  }

  // Set difference.
  RoleSet& operator-=(const RoleSet& other) {
    const std::size_t n = std::min(n_, other.n_);
    for (std::size_t i = 0; i < n; ++i) word(i) &= ~other.word(i);
    trim();
    return *this;
  }

  friend RoleSet operator|(RoleSet a, const RoleSet& b) { return a |= b; }
  friend RoleSet operator&(RoleSet a, const RoleSet& b) { return a &= b; }
  friend RoleSet operator-(RoleSet a, const RoleSet& b) { return a -= b; }

  bool is_subset_of(const RoleSet& other) const {
    if (n_ > other.n_) return false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (word(i) & ~other.word(i)) return false;
    }
    return true;
  }

  bool intersects(const RoleSet& other) const {
    const std::size_t n = std::min(n_, other.n_);
    for (std::size_t i = 0; i < n; ++i) {
      if (word(i) & other.word(i)) return true;
    }
    return false;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint64_t w = word(i);
      while (w != 0) {
        const int bit = std::countr_zero(w);
        f(static_cast<RoleId>(i * 64 + static_cast<std::size_t>(bit)));
        w &= w - 1;
      }
    }
  }

  std::vector<RoleId> ids() const {
    std::vector<RoleId> out;
    for_each([&](RoleId id) { out.push_back(id); });
    return out;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (std::size_t i = 0; i < n_; ++i) h = (h ^ std::hash<std::uint64_t>{}(word(i))) * 0x100000001b3ULL;
    return h;
  }

  bool operator==(const RoleSet& other) const {
    if (n_ != other.n_) return false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (word(i) != other.word(i)) return false;
    }
    return true;
  }

  // Lexicographic over words, lowest word first.
  std::strong_ordering operator<=>(const RoleSet& other) const {
    const std::size_t n = std::min(n_, other.n_);
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = word(i) <=> other.word(i); c != 0) return c;
    }
    return n_ <=> other.n_;
  }

 private:
  static constexpr std::size_t kInline = 2;

  std::uint64_t& word(std::size_t i) { return i < kInline ? inline_[i] : spill_[i - kInline]; }
  std::uint64_t word(std::size_t i) const { return i < kInline ? inline_[i] : spill_[i - kInline]; }

  void grow(std::size_t n) {
    for (std::size_t i = n_; i < std::min(n, kInline); ++i) inline_[i] = 0;
    if (n > kInline) spill_.resize(n - kInline, 0);
    n_ = n;
  }

  void trim() {
    while (n_ > 0 && word(n_ - 1) == 0) --n_;
    if (n_ <= kInline) spill_.clear();
    else spill_.resize(n_ - kInline);
  }

  std::size_t n_ = 0;
  std::uint64_t inline_[kInline] = {0, 0};
  std::vector<std::uint64_t> spill_;
};

}  // namespace rbacscan

template <>
struct std::hash<rbacscan::RoleSet> {
  std::size_t operator()(const rbacscan::RoleSet& s) const noexcept { return s.hash(); }
};
