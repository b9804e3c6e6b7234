#pragma once

// Core engine for the Grigorchuk group: canonical words over the generators
// {a,b,c,d}, the action on finite binary words, sections (wreath recursion),
// a contraction-based word-problem decider, torsion orders, and a
// deterministic element enumeration.

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace grig {

enum class Gen : std::uint8_t { a = 0, b = 1, c = 2, d = 3 };

inline char gen_char(Gen g) { return static_cast<char>('a' + static_cast<int>(g)); }

inline std::optional<Gen> gen_from_char(char c) {
  if (c < 'a' || c > 'd') return std::nullopt;
  return static_cast<Gen>(c - 'a');
}

// b,c,d generate a Klein 4-group; with the encoding b=1,c=2,d=3 the product
// of two distinct non-a generators is their XOR.
inline Gen klein_product(Gen x, Gen y) {
  return static_cast<Gen>(static_cast<int>(x) ^ static_cast<int>(y));
}

struct ContractionViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct OrderExceedsCap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A group element held as its canonical reduced word: no two adjacent equal
// letters, no two adjacent letters from {b,c,d}. The empty word is the unity.
class GroupElement {
 public:
  GroupElement() = default;

  static GroupElement from_raw(const std::vector<Gen>& raw) {
    GroupElement g;
    g.word_ = reduce_word(raw);
    return g;
  }

  // Accepts any string over {a,b,c,d}; "e", "1" and "" denote the unity.
  // Whitespace is ignored. The result is reduced.
  static GroupElement parse(std::string_view s) {
    std::vector<Gen> raw;
    for (char c : s) {
      if (c == ' ' || c == '\t') continue;
      if (c == 'e' || c == '1') continue;
      auto g = gen_from_char(c);
      if (!g) throw std::invalid_argument("bad generator letter: " + std::string(1, c));
      raw.push_back(*g);
    }
    return from_raw(raw);
  }

  static GroupElement generator(Gen g) {
    GroupElement e;
    e.word_.push_back(g);
    return e;
  }

  const std::vector<Gen>& word() const { return word_; }
  std::size_t length() const { return word_.size(); }
  bool is_identity() const { return word_.empty(); }

  // Every generator is an involution, so the inverse is the reversed word.
  GroupElement inverse() const {
    GroupElement g;
    g.word_.assign(word_.rbegin(), word_.rend());
    return g;
  }

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    std::vector<Gen> raw = x.word_;
    raw.insert(raw.end(), y.word_.begin(), y.word_.end());
    return from_raw(raw);
  }

  bool operator==(const GroupElement& o) const = default;

  // (length, lexicographic with a<b<c<d); the order used for enumeration.
  bool operator<(const GroupElement& o) const {
    if (word_.size() != o.word_.size()) return word_.size() < o.word_.size();
    return word_ < o.word_;
  }

  std::string str() const {
    if (word_.empty()) return "e";
    std::string s;
    s.reserve(word_.size());
    for (Gen g : word_) s.push_back(gen_char(g));
    return s;
  }

  // Compact byte key for memo tables.
  std::string key() const {
    std::string s(word_.size(), '\0');
    for (std::size_t i = 0; i < word_.size(); ++i) s[i] = static_cast<char>(word_[i]);
    return s;
  }

  unsigned a_parity() const {
    unsigned n = 0;
    for (Gen g : word_)
      if (g == Gen::a) ++n;
    return n & 1u;
  }

 private:
  // Stack-based rewriting to the fixed point of ss -> 1 and the six Klein
  // collapses xy -> z for {x,y,z} = {b,c,d}. Linear time; the stack content
  // is reduced at every step.
  static std::vector<Gen> reduce_word(const std::vector<Gen>& raw) {
    std::vector<Gen> st;
    st.reserve(raw.size());
    for (Gen t : raw) {
      Gen cur = t;
      bool consumed = false;
      while (!st.empty()) {
        Gen top = st.back();
        if (top == cur) {
          st.pop_back();
          consumed = true;
          break;
        }
        if (top != Gen::a && cur != Gen::a) {
          st.pop_back();
          cur = klein_product(top, cur);
          continue;
        }
        break;
      }
      if (!consumed) st.push_back(cur);
    }
    return st;
  }

  std::vector<Gen> word_;
};

inline GroupElement reduce(const std::vector<Gen>& raw) { return GroupElement::from_raw(raw); }

namespace detail {
// Wreath recursion of the generators: a = (01)(e,e), b = (a,c), c = (a,d),
// d = (e,b). -1 marks a trivial section.
inline constexpr std::int8_t kSectionTable[4][2] = {
    /* a */ {-1, -1},
    /* b */ {0, 2},
    /* c */ {0, 3},
    /* d */ {-1, 1},
};
}  // namespace detail

// Image of the single letter x under the root permutation of g together with
// the section g|_x, both exact. The section law (fh)|_u = f|_{h(u)} h|_u is
// applied letter by letter from the right (the rightmost factor acts first).
inline std::pair<char, GroupElement> step(const GroupElement& g, char x) {
  if (x != '0' && x != '1') throw std::invalid_argument("binary letter expected");
  int cur = x - '0';
  std::vector<Gen> collected;  // rightmost factor first, reversed below
  const auto& w = g.word();
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    Gen s = *it;
    if (s == Gen::a) {
      cur ^= 1;
    } else {
      std::int8_t sec = detail::kSectionTable[static_cast<int>(s)][cur];
      if (sec >= 0) collected.push_back(static_cast<Gen>(sec));
    }
  }
  std::vector<Gen> raw(collected.rbegin(), collected.rend());
  return {static_cast<char>('0' + cur), GroupElement::from_raw(raw)};
}

// Reduced section g|_u for a finite binary word u.
inline GroupElement section(const GroupElement& g, std::string_view u) {
  GroupElement h = g;
  for (char x : u) h = step(h, x).second;
  return h;
}

// An automorphism as root permutation plus the two first-level sections:
// a = (01)(e,e), b = (a,c), c = (a,d), d = (e,b).
struct WreathRecursion {
  bool root_swap = false;
  GroupElement section0;
  GroupElement section1;

  bool operator==(const WreathRecursion&) const = default;
};

inline WreathRecursion wreath_recursion(const GroupElement& g) {
  return {g.a_parity() == 1, step(g, '0').second, step(g, '1').second};
}

inline WreathRecursion wreath_recursion(Gen s) {
  return wreath_recursion(GroupElement::generator(s));
}

// The action of g on a finite binary word, computed letter by letter through
// the wreath recursion. Preserves length.
inline std::string apply_word(const GroupElement& g, std::string_view w) {
  std::string out(w);
  const auto& letters = g.word();
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    Gen s = *it;
    std::size_t i = 0;
    int cur = static_cast<int>(s);  // current generator acting at depth i
    bool active = true;
    while (active && i < out.size()) {
      if (cur == static_cast<int>(Gen::a)) {
        out[i] ^= 1;  // '0' <-> '1'
        active = false;
      } else {
        std::int8_t nxt = detail::kSectionTable[cur][out[i] - '0'];
        if (nxt < 0)
          active = false;
        else
          cur = nxt;
      }
      ++i;
    }
  }
  return out;
}

// 1-based position of the first zero, or 0 when there is none.
inline std::size_t first_zero(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] == '0') return i + 1;
  return 0;
}

// Whether the generator s in {b,c,d} fixes every word whose first zero sits
// at position k (1-based): b when k = 0, c when k = 2, d when k = 1 (mod 3).
inline bool fixes_at_first_zero(Gen s, std::size_t k) {
  switch (s) {
    case Gen::b: return k % 3 == 0;
    case Gen::c: return k % 3 == 2;
    case Gen::d: return k % 3 == 1;
    default: throw std::invalid_argument("first-zero rule applies to b, c, d only");
  }
}

// The first-zero shortcut for the generators b, c, d: a word with no zero, or
// whose only zero is the last letter, is fixed; otherwise either the word is
// fixed (residue rule above) or the letter right after the first zero flips.
inline std::string apply_fast(Gen s, std::string_view w) {
  if (s == Gen::a) throw std::invalid_argument("apply_fast expects b, c or d");
  std::string out(w);
  std::size_t k = first_zero(w);
  if (k == 0 || k == w.size()) return out;
  if (fixes_at_first_zero(s, k)) return out;
  out[k] ^= 1;
  return out;
}

namespace detail {

struct TrivialCache {
  std::shared_mutex mutex;
  std::unordered_map<std::string, bool> map;
  std::atomic<std::size_t> limit{0};  // 0 = unbounded

  std::optional<bool> lookup(const std::string& k) {
    std::shared_lock lock(mutex);
    auto it = map.find(k);
    if (it == map.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& k, bool v) {
    std::unique_lock lock(mutex);
    std::size_t cap = limit.load(std::memory_order_relaxed);
    if (cap != 0 && map.size() >= cap) return;
    map.emplace(k, v);
  }
};

inline TrivialCache& trivial_cache() {
  static TrivialCache cache;
  return cache;
}

}  // namespace detail

// Optional size cap for the word-problem memo table (0 = unbounded).
inline void set_trivial_cache_limit(std::size_t n) {
  detail::trivial_cache().limit.store(n);
}

inline void clear_trivial_cache() {
  auto& c = detail::trivial_cache();
  std::unique_lock lock(c.mutex);
  c.map.clear();
}

// Word-problem decider. g acts trivially on the tree iff its a-count is even
// and both sections act trivially; words of length <= 1 are trivial iff
// empty. The recursion terminates because reduced sections of a word of
// length n >= 2 have length at most (n+1)/2, which is checked on every
// descent.
inline bool is_trivial(const GroupElement& g) {
  const std::size_t n = g.length();
  if (n == 0) return true;
  if (n == 1) return false;
  auto& cache = detail::trivial_cache();
  const std::string k = g.key();
  if (auto hit = cache.lookup(k)) return *hit;
  bool result;
  if (g.a_parity() != 0) {
    result = false;
  } else {
    GroupElement s0 = step(g, '0').second;
    GroupElement s1 = step(g, '1').second;
    if (2 * s0.length() > n + 1 || 2 * s1.length() > n + 1)
      throw ContractionViolation("section longer than (n+1)/2 for " + g.str());
    result = is_trivial(s0) && is_trivial(s1);
  }
  cache.store(k, result);
  return result;
}

inline bool equal_in_group(const GroupElement& x, const GroupElement& y) {
  if (x == y) return true;
  return is_trivial(x * y.inverse());
}

inline GroupElement power(const GroupElement& g, std::uint64_t n) {
  GroupElement acc;
  GroupElement base = g;
  while (n > 0) {
    if (n & 1u) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

// Smallest n >= 1 with g^n = 1. Repeated squaring finds some trivial power
// 2^k <= cap, then every divisor of that power is searched in increasing
// order. Throws OrderExceedsCap when no power <= cap is found trivial.
inline std::uint64_t element_order(const GroupElement& g, std::uint64_t cap = 1u << 16) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (is_trivial(g)) return 1;
  GroupElement p = g;
  std::uint64_t pw = 1;
  while (true) {
    if (pw > cap / 2) throw OrderExceedsCap("no trivial power of " + g.str() + " up to cap");
    p = p * p;
    pw *= 2;
    if (is_trivial(p)) break;
  }
  for (std::uint64_t d = 1; d <= pw; d *= 2)
    if (is_trivial(power(g, d))) return d;
  return pw;  // unreachable: d = pw is trivial
}

// Visits every reduced word of length <= max_len in (length, lex) order,
// a < b < c < d. Reduced words strictly alternate between a and {b,c,d}.
template <typename Fn>
inline void for_each_reduced_word(int max_len, Fn&& fn) {
  std::vector<Gen> cur;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      fn(cur);
      return;
    }
    if (cur.empty() || cur.back() != Gen::a) {
      // after a letter of {b,c,d} (or at the start) only `a`... at the very
      // start all four letters are allowed.
      if (cur.empty()) {
        for (int i = 0; i < 4; ++i) {
          cur.push_back(static_cast<Gen>(i));
          self(self, remaining - 1);
          cur.pop_back();
        }
        return;
      }
      cur.push_back(Gen::a);
      self(self, remaining - 1);
      cur.pop_back();
      return;
    }
    for (int i = 1; i < 4; ++i) {
      cur.push_back(static_cast<Gen>(i));
      self(self, remaining - 1);
      cur.pop_back();
    }
  };
  for (int len = 0; len <= max_len; ++len) rec(rec, len);
}

inline std::vector<GroupElement> reduced_words_up_to(int max_len) {
  std::vector<GroupElement> out;
  for_each_reduced_word(max_len, [&](const std::vector<Gen>& w) {
    GroupElement g;
    g = GroupElement::from_raw(w);
    // generation already yields reduced words, from_raw is a no-op rewrite
    out.push_back(std::move(g));
  });
  return out;
}

// All distinct group elements with a reduced representative of length
// <= max_len, in (length, lex) order, deduplicated by the word problem.
inline std::vector<GroupElement> enumerate_elements(int max_len) {
  std::vector<GroupElement> out;
  for (const GroupElement& g : reduced_words_up_to(max_len)) {
    bool dup = false;
    for (const GroupElement& h : out) {
      if (is_trivial(g * h.inverse())) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(g);
  }
  return out;
}

// Element fixing the first level whose section at the letter x is g (the
// other section is not controlled). Realized through the self-replication
// table b=(a,c), c=(a,d), d=(e,b), aba=(c,a), aca=(d,a), ada=(b,e).
inline GroupElement lift_one(const GroupElement& g, char x) {
  static const GroupElement aba = GroupElement::parse("aba");
  static const GroupElement aca = GroupElement::parse("aca");
  static const GroupElement ada = GroupElement::parse("ada");
  std::vector<Gen> raw;
  auto append = [&raw](const GroupElement& e) {
    for (Gen t : e.word()) raw.push_back(t);
  };
  for (Gen s : g.word()) {
    if (x == '0') {
      switch (s) {
        case Gen::a: raw.push_back(Gen::b); break;
        case Gen::b: append(ada); break;
        case Gen::c: append(aba); break;
        case Gen::d: append(aca); break;
      }
    } else {
      switch (s) {
        case Gen::a: append(aba); break;
        case Gen::b: raw.push_back(Gen::d); break;
        case Gen::c: raw.push_back(Gen::b); break;
        case Gen::d: raw.push_back(Gen::c); break;
      }
    }
  }
  return GroupElement::from_raw(raw);
}

// Element h with h(prefix w) = prefix w and h|_prefix = g.
inline GroupElement lift_along(const GroupElement& g, std::string_view prefix) {
  GroupElement res = g;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) res = lift_one(res, *it);
  return res;
}

// Some word mapping `from` to `to` under the tree action (both of the same
// length), found by breadth-first search over the level; the group acts
// level-transitively so a word always exists.
inline GroupElement transporter(std::string_view from, std::string_view to) {
  if (from.size() != to.size()) throw std::invalid_argument("transporter needs equal lengths");
  if (from == to) return GroupElement();
  std::unordered_map<std::string, std::pair<std::string, Gen>> parent;  // word -> (pred, letter)
  std::vector<std::string> frontier{std::string(from)};
  parent.emplace(std::string(from), std::make_pair(std::string(), Gen::a));
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& w : frontier) {
      for (int i = 0; i < 4; ++i) {
        Gen s = static_cast<Gen>(i);
        std::string img = apply_word(GroupElement::generator(s), w);
        if (parent.contains(img)) continue;
        parent.emplace(img, std::make_pair(w, s));
        if (img == to) {
          // letters applied first sit rightmost in the product
          std::vector<Gen> raw;
          std::string cur = img;
          while (cur != from) {
            auto& [pred, letter] = parent.at(cur);
            raw.push_back(letter);
            cur = pred;
          }
          return GroupElement::from_raw(raw);
        }
        next.push_back(std::move(img));
      }
    }
    frontier = std::move(next);
  }
  throw std::logic_error("transporter: target unreachable");  // cannot happen
}

}  // namespace grig
