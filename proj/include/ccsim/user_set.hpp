#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ccsim {

/// Fixed-width bit set over user indices [0, max_users).
///
/// Cache configurations and delivery schemes spend most of their time on
/// set-equality and membership tests, so the representation is a flat array
/// of words with no heap allocation.
class UserSet {
 public:
  static constexpr int max_users = 256;
  static constexpr int word_count = max_users / 64;

  constexpr UserSet() = default;

  static UserSet single(int user) {
    UserSet s;
    s.set(user);
    return s;
  }

  /// Users 0..n-1.
  static UserSet first_n(int n) {
    UserSet s;
    for (int u = 0; u < n; ++u) s.set(u);
    return s;
  }

  /// Users taken from the low 64 bits of a mask (bit u <-> user u).
  static UserSet from_low_mask(std::uint64_t mask) {
    UserSet s;
    s.words_[0] = mask;
    return s;
  }

  bool test(int u) const {
    return (words_[static_cast<unsigned>(u) >> 6] >> (u & 63)) & 1u;
  }

  UserSet& set(int u) {
    words_[static_cast<unsigned>(u) >> 6] |= std::uint64_t{1} << (u & 63);
    return *this;
  }

  UserSet& reset(int u) {
    words_[static_cast<unsigned>(u) >> 6] &= ~(std::uint64_t{1} << (u & 63));
    return *this;
  }

  UserSet with(int u) const {
    UserSet s = *this;
    s.set(u);
    return s;
  }

  UserSet without(int u) const {
    UserSet s = *this;
    s.reset(u);
    return s;
  }

  int count() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  bool subset_of(const UserSet& o) const {
    for (int i = 0; i < word_count; ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  /// Smallest member >= from, or -1 when there is none.
  int next(int from = 0) const {
    if (from >= max_users) return -1;
    int wi = from >> 6;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (w) return wi * 64 + __builtin_ctzll(w);
      if (++wi == word_count) return -1;
      w = words_[wi];
    }
  }

  UserSet operator|(const UserSet& o) const {
    UserSet s;
    for (int i = 0; i < word_count; ++i) s.words_[i] = words_[i] | o.words_[i];
    return s;
  }

  UserSet operator&(const UserSet& o) const {
    UserSet s;
    for (int i = 0; i < word_count; ++i) s.words_[i] = words_[i] & o.words_[i];
    return s;
  }

  bool operator==(const UserSet& o) const { return words_ == o.words_; }
  bool operator!=(const UserSet& o) const { return words_ != o.words_; }

  std::uint64_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= h >> 29;
    }
    return h;
  }

  /// Minimal lowercase hex, bit u <-> user index u (so "0x1" means user 0).
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    bool leading = true;
    for (int i = word_count - 1; i >= 0; --i) {
      for (int nib = 15; nib >= 0; --nib) {
        int d = static_cast<int>((words_[i] >> (nib * 4)) & 0xf);
        if (d == 0 && leading) continue;
        leading = false;
        out.push_back(digits[d]);
      }
    }
    if (out.empty()) out = "0";
    return "0x" + out;
  }

  static UserSet from_hex(const std::string& text) {
    std::string body = text;
    if (body.rfind("0x", 0) == 0 || body.rfind("0X", 0) == 0) body = body.substr(2);
    if (body.empty()) throw std::invalid_argument("empty hex user set");
    UserSet s;
    int bit = 0;
    for (auto it = body.rbegin(); it != body.rend(); ++it, bit += 4) {
      char c = *it;
      int d;
      if (c >= '0' && c <= '9')
        d = c - '0';
      else if (c >= 'a' && c <= 'f')
        d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F')
        d = c - 'A' + 10;
      else
        throw std::invalid_argument("bad hex digit in user set");
      if (d != 0 && bit + 3 >= max_users) throw std::invalid_argument("user set wider than max_users");
      if (d) s.words_[bit >> 6] |= static_cast<std::uint64_t>(d) << (bit & 63);
    }
    return s;
  }

 private:
  std::array<std::uint64_t, word_count> words_{};
};

struct UserSetHash {
  std::size_t operator()(const UserSet& s) const { return static_cast<std::size_t>(s.hash()); }
};

}  // namespace ccsim
