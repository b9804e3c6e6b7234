#pragma once

// Eventually periodic points of the boundary of the binary rooted tree, the
// induced action of the group on them, orbit relations, and stabilizer /
// neighborhood-stabilizer membership.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grig/group.hpp"

namespace grig {

// An infinite binary word of the form pre . per^infinity, kept canonical:
// the period is primitive and the preperiod is shortest possible (its last
// letter differs from the period's last letter). Two values represent the
// same infinite word iff their canonical forms coincide.
class BoundaryWord {
 public:
  BoundaryWord() : per_("1") {}  // 1^infinity

  BoundaryWord(std::string pre, std::string per) : pre_(std::move(pre)), per_(std::move(per)) {
    if (per_.empty()) throw std::invalid_argument("period must be nonempty");
    for (char c : pre_)
      if (c != '0' && c != '1') throw std::invalid_argument("binary preperiod expected");
    for (char c : per_)
      if (c != '0' && c != '1') throw std::invalid_argument("binary period expected");
    canonicalize();
  }

  // Notation PRE(PER)^w, e.g. "1110(1)^w" or "(01)^w".
  static BoundaryWord parse(std::string_view s) {
    auto open = s.find('(');
    auto close = s.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
        s.substr(close + 1) != "^w")
      throw std::invalid_argument("expected PRE(PER)^w notation: " + std::string(s));
    return BoundaryWord(std::string(s.substr(0, open)),
                        std::string(s.substr(open + 1, close - open - 1)));
  }

  std::string str() const { return pre_ + "(" + per_ + ")^w"; }

  const std::string& preperiod() const { return pre_; }
  const std::string& period() const { return per_; }

  char letter(std::size_t i) const {  // 0-based
    if (i < pre_.size()) return pre_[i];
    return per_[(i - pre_.size()) % per_.size()];
  }

  std::string prefix(std::size_t n) const {
    std::string out(n, '0');
    for (std::size_t i = 0; i < n; ++i) out[i] = letter(i);
    return out;
  }

  // 1-based position of the first zero; 0 when the word is 1^infinity.
  std::size_t first_zero() const {
    for (std::size_t i = 0; i < pre_.size() + per_.size(); ++i)
      if (letter(i) == '0') return i + 1;
    return 0;
  }

  bool operator==(const BoundaryWord& o) const = default;
  bool operator<(const BoundaryWord& o) const {
    return std::tie(pre_, per_) < std::tie(o.pre_, o.per_);
  }

  // The word with the given (1-based) positions toggled, canonical again.
  BoundaryWord toggled(const std::vector<std::uint32_t>& positions) const {
    if (positions.empty()) return *this;
    std::uint32_t maxpos = *std::max_element(positions.begin(), positions.end());
    std::size_t head = std::max<std::size_t>(pre_.size(), maxpos);
    std::string newpre = prefix(head);
    std::string newper = per_;
    // align the period phase after the extended preperiod
    std::size_t shift = (head - pre_.size()) % per_.size();
    std::rotate(newper.begin(), newper.begin() + static_cast<std::ptrdiff_t>(shift), newper.end());
    for (std::uint32_t p : positions) newpre[p - 1] ^= 1;
    return BoundaryWord(std::move(newpre), std::move(newper));
  }

 private:
  void canonicalize() {
    // primitive period: the shortest divisor-length block repeating to per_
    for (std::size_t p = 1; p < per_.size(); ++p) {
      if (per_.size() % p != 0) continue;
      bool rep = true;
      for (std::size_t i = p; i < per_.size() && rep; ++i) rep = per_[i] == per_[i - p];
      if (rep) {
        per_.resize(p);
        break;
      }
    }
    // shortest preperiod: absorb trailing letters equal to the period's last
    while (!pre_.empty() && pre_.back() == per_.back()) {
      pre_.pop_back();
      std::rotate(per_.begin(), per_.end() - 1, per_.end());
    }
  }

  std::string pre_;
  std::string per_;
};

inline const BoundaryWord& xi0() {  // 1^infinity, the exceptional point
  static const BoundaryWord w("", "1");
  return w;
}

// g(xi), computed by peeling letters: the output letter is the root image of
// the current section, the state is (reduced section, phase inside the
// period). Sections of a fixed g form a finite set, so a state repeats and
// the repeat closes the output period.
inline BoundaryWord act_beta(const GroupElement& g, const BoundaryWord& xi) {
  GroupElement h = g;
  std::string out;
  std::map<std::pair<std::string, std::size_t>, std::size_t> seen;
  const std::size_t pre_len = xi.preperiod().size();
  const std::size_t per_len = xi.period().size();
  std::size_t pos = 0;
  for (;;) {
    if (pos >= pre_len) {
      std::size_t phase = (pos - pre_len) % per_len;
      auto [it, fresh] = seen.try_emplace({h.key(), phase}, out.size());
      if (!fresh) {
        std::size_t j = it->second;
        return BoundaryWord(out.substr(0, j), out.substr(j));
      }
    }
    auto [img, sec] = step(h, xi.letter(pos));
    out.push_back(img);
    h = sec;
    ++pos;
  }
}

// Two boundary points lie in the same orbit iff they differ in finitely many
// letters, i.e. iff their tails agree; beyond the longer preperiod both words
// are periodic, so one common-period window decides.
inline bool same_orbit(const BoundaryWord& xi, const BoundaryWord& eta) {
  std::size_t start = std::max(xi.preperiod().size(), eta.preperiod().size());
  std::size_t window = std::lcm(xi.period().size(), eta.period().size());
  for (std::size_t i = start; i < start + window; ++i)
    if (xi.letter(i) != eta.letter(i)) return false;
  return true;
}

inline bool in_stabilizer(const GroupElement& g, const BoundaryWord& xi) {
  return act_beta(g, xi) == xi;
}

// g fixes an open neighborhood of xi iff it fixes xi and some section along
// a beginning of xi is trivial. The sections along xi are eventually cyclic
// (same state machine as act_beta), so every distinct section gets tested
// before the cycle closes.
inline bool in_neighborhood_stabilizer(const GroupElement& g, const BoundaryWord& xi) {
  if (!in_stabilizer(g, xi)) return false;
  GroupElement h = g;
  std::map<std::pair<std::string, std::size_t>, bool> seen;
  const std::size_t pre_len = xi.preperiod().size();
  const std::size_t per_len = xi.period().size();
  std::size_t pos = 0;
  for (;;) {
    if (is_trivial(h)) return true;
    if (pos >= pre_len) {
      std::size_t phase = (pos - pre_len) % per_len;
      auto [it, fresh] = seen.try_emplace({h.key(), phase}, true);
      if (!fresh) return false;
    }
    h = step(h, xi.letter(pos)).second;
    ++pos;
  }
}

// For g in the stabilizer of 1^infinity: the unique coset representative
// h in {e, b, c, d} with g h in the neighborhood stabilizer. nullopt when g
// does not stabilize 1^infinity at all.
inline std::optional<GroupElement> klein_coset(const GroupElement& g) {
  const BoundaryWord& x0 = xi0();
  if (!in_stabilizer(g, x0)) return std::nullopt;
  static const std::array<GroupElement, 4> candidates = {
      GroupElement(), GroupElement::generator(Gen::b), GroupElement::generator(Gen::c),
      GroupElement::generator(Gen::d)};
  for (const GroupElement& h : candidates)
    if (in_neighborhood_stabilizer(g * h, x0)) return h;
  throw std::logic_error("stabilizer element outside every Klein coset: " + g.str());
}

// A point of the orbit of a fixed base word: the base with finitely many
// positions (1-based, sorted) toggled.
struct OrbitPoint {
  std::vector<std::uint32_t> flips;

  bool operator==(const OrbitPoint& o) const = default;
  bool operator<(const OrbitPoint& o) const { return flips < o.flips; }

  bool has(std::uint32_t pos) const {
    return std::binary_search(flips.begin(), flips.end(), pos);
  }

  OrbitPoint with_toggled(std::uint32_t pos) const {
    OrbitPoint out = *this;
    auto it = std::lower_bound(out.flips.begin(), out.flips.end(), pos);
    if (it != out.flips.end() && *it == pos)
      out.flips.erase(it);
    else
      out.flips.insert(it, pos);
    return out;
  }
};

struct OrbitPointHash {
  std::size_t operator()(const OrbitPoint& p) const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint32_t v : p.flips) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return h;
  }
};

inline char orbit_letter(const BoundaryWord& base, const OrbitPoint& p, std::size_t pos1) {
  char c = base.letter(pos1 - 1);
  return p.has(static_cast<std::uint32_t>(pos1)) ? static_cast<char>(c ^ 1) : c;
}

// 1-based first zero of the represented word; 0 if the word is 1^infinity.
// Beyond max(flips, preperiod) the word follows the base period, so one
// period window bounds the scan.
inline std::size_t orbit_first_zero(const BoundaryWord& base, const OrbitPoint& p) {
  std::size_t head = std::max<std::size_t>(base.preperiod().size(),
                                           p.flips.empty() ? 0 : p.flips.back());
  std::size_t bound = head + base.period().size();
  for (std::size_t i = 1; i <= bound; ++i)
    if (orbit_letter(base, p, i) == '0') return i;
  return 0;
}

// Generator action on an orbit point: a toggles position 1; b, c, d follow
// the first-zero rule and toggle at most the letter after the first zero.
inline OrbitPoint orbit_apply(Gen s, const BoundaryWord& base, const OrbitPoint& p) {
  if (s == Gen::a) return p.with_toggled(1);
  std::size_t k = orbit_first_zero(base, p);
  if (k == 0) return p;
  if (fixes_at_first_zero(s, k)) return p;
  return p.with_toggled(static_cast<std::uint32_t>(k + 1));
}

inline BoundaryWord materialize(const BoundaryWord& base, const OrbitPoint& p) {
  return base.toggled(p.flips);
}

// Constructive separation witness: for distinct xi, eta, an element fixing
// a neighborhood of xi while moving eta. With w0 the longest common prefix,
// a conjugate of d is built that fixes the cylinder of w0 . xi[|w0|] while
// moving the three letters of eta after w0, and is lifted along w0 by
// self-replication.
inline GroupElement separation_witness(const BoundaryWord& xi, const BoundaryWord& eta) {
  if (xi == eta) throw std::invalid_argument("separation needs distinct points");
  std::size_t n = 0;
  while (xi.letter(n) == eta.letter(n)) ++n;
  std::string u2 = eta.prefix(n + 3).substr(n);
  GroupElement h = transporter(u2, "100");
  GroupElement g0 = h.inverse() * GroupElement::generator(Gen::d) * h;
  return lift_along(g0, xi.prefix(n));
}

}  // namespace grig
