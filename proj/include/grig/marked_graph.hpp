#pragma once

// Finite marked graphs with edges labeled by the generators, undirected
// (all generators are involutions). Closed balls, label- and mark-preserving
// isomorphism, the dyadic ball metric, Schreier-condition verification,
// automorphism groups and quotients.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "grig/group.hpp"

namespace grig {

using VertexId = std::uint32_t;

struct EdgeSpec {
  std::string u;
  std::string v;
  Gen label;
};

struct IllFormedPartition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MarkedGraph {
 public:
  struct Edge {
    VertexId u;  // u <= v
    VertexId v;
    Gen label;
    auto tied() const { return std::tie(u, v, label); }
    bool operator<(const Edge& o) const { return tied() < o.tied(); }
    bool operator==(const Edge& o) const = default;
  };

  struct Slot {
    std::int64_t nbr = -1;  // other endpoint when count == 1 (== self for a loop)
    std::uint8_t count = 0;
  };

  MarkedGraph(std::vector<std::string> vertices, const std::vector<EdgeSpec>& edges,
              const std::string& marked) {
    std::sort(vertices.begin(), vertices.end());
    if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
      throw std::invalid_argument("duplicate vertex id");
    names_ = std::move(vertices);
    if (names_.empty()) throw std::invalid_argument("graph needs at least one vertex");
    auto idx = [&](const std::string& name) -> VertexId {
      auto it = std::lower_bound(names_.begin(), names_.end(), name);
      if (it == names_.end() || *it != name)
        throw std::invalid_argument("unknown vertex id: " + name);
      return static_cast<VertexId>(it - names_.begin());
    };
    marked_ = idx(marked);
    edges_.reserve(edges.size());
    for (const auto& e : edges) {
      VertexId a = idx(e.u), b = idx(e.v);
      if (a > b) std::swap(a, b);
      edges_.push_back({a, b, e.label});
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw std::invalid_argument("duplicate edge with identical endpoints and label");
    build_slots();
  }

  std::size_t vertex_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(VertexId v) const { return names_[v]; }
  const std::vector<Edge>& edges() const { return edges_; }
  VertexId marked() const { return marked_; }
  const std::string& marked_name() const { return names_[marked_]; }

  std::optional<VertexId> find(const std::string& name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<VertexId>(it - names_.begin());
  }

  const Slot& slot(VertexId v, Gen s) const { return slots_[v][static_cast<int>(s)]; }

  // One incident edge per (vertex, label) at most; loops count once.
  bool deterministic() const { return deterministic_; }

  std::vector<Gen> loops_at(VertexId v) const {
    std::vector<Gen> out;
    for (int s = 0; s < 4; ++s) {
      const Slot& sl = slots_[v][s];
      if (sl.count == 1 && sl.nbr == static_cast<std::int64_t>(v))
        out.push_back(static_cast<Gen>(s));
    }
    return out;
  }

  std::array<std::size_t, 4> label_histogram() const {
    std::array<std::size_t, 4> h{};
    for (const Edge& e : edges_) ++h[static_cast<int>(e.label)];
    return h;
  }

  std::vector<int> distances_from(VertexId src) const {
    std::vector<int> dist(names_.size(), -1);
    std::vector<std::vector<VertexId>> adj(names_.size());
    for (const Edge& e : edges_) {
      if (e.u == e.v) continue;
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::deque<VertexId> q{src};
    dist[src] = 0;
    while (!q.empty()) {
      VertexId v = q.front();
      q.pop_front();
      for (VertexId w : adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push_back(w);
        }
    }
    return dist;
  }

  bool connected_from_mark() const {
    auto d = distances_from(marked_);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
  }

  std::size_t edge_multiplicity(VertexId a, VertexId b, Gen s) const {
    Edge probe{std::min(a, b), std::max(a, b), s};
    return std::binary_search(edges_.begin(), edges_.end(), probe) ? 1 : 0;
  }

 private:
  void build_slots() {
    slots_.assign(names_.size(), {});
    deterministic_ = true;
    for (const Edge& e : edges_) {
      auto bump = [&](VertexId at, VertexId other) {
        Slot& sl = slots_[at][static_cast<int>(e.label)];
        ++sl.count;
        sl.nbr = other;
        if (sl.count > 1) deterministic_ = false;
      };
      bump(e.u, e.v);
      if (e.u != e.v) bump(e.v, e.u);
    }
  }

  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::array<Slot, 4>> slots_;
  VertexId marked_ = 0;
  bool deterministic_ = true;
};

// Subgraph on the vertices at distance <= radius from center, keeping
// exactly the edges with both endpoints inside, marked at the center.
inline MarkedGraph closed_ball(const MarkedGraph& g, VertexId center, int radius) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  auto dist = g.distances_from(center);
  std::vector<bool> keep(g.vertex_count(), false);
  std::vector<std::string> names;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (dist[v] >= 0 && dist[v] <= radius) {
      keep[v] = true;
      names.push_back(g.name(static_cast<VertexId>(v)));
    }
  std::vector<EdgeSpec> edges;
  for (const auto& e : g.edges())
    if (keep[e.u] && keep[e.v]) edges.push_back({g.name(e.u), g.name(e.v), e.label});
  return MarkedGraph(std::move(names), edges, g.name(center));
}

inline MarkedGraph closed_ball(const MarkedGraph& g, int radius) {
  return closed_ball(g, g.marked(), radius);
}

namespace detail {

// Forced parallel traversal for graphs with at most one incident edge per
// (vertex, label): the image of one vertex determines the whole map.
inline std::optional<std::vector<std::int64_t>> forced_map(const MarkedGraph& g1,
                                                           const MarkedGraph& g2, VertexId src,
                                                           VertexId dst) {
  std::vector<std::int64_t> map(g1.vertex_count(), -1);
  std::vector<std::int64_t> inv(g2.vertex_count(), -1);
  map[src] = dst;
  inv[dst] = src;
  std::deque<VertexId> q{src};
  std::size_t mapped = 1;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    VertexId w = static_cast<VertexId>(map[v]);
    for (int s = 0; s < 4; ++s) {
      const auto& sl1 = g1.slot(v, static_cast<Gen>(s));
      const auto& sl2 = g2.slot(w, static_cast<Gen>(s));
      if (sl1.count != sl2.count) return std::nullopt;
      if (sl1.count != 1) continue;
      bool loop1 = sl1.nbr == static_cast<std::int64_t>(v);
      bool loop2 = sl2.nbr == static_cast<std::int64_t>(w);
      if (loop1 != loop2) return std::nullopt;
      if (loop1) continue;
      VertexId n1 = static_cast<VertexId>(sl1.nbr);
      VertexId n2 = static_cast<VertexId>(sl2.nbr);
      if (map[n1] >= 0) {
        if (map[n1] != static_cast<std::int64_t>(n2)) return std::nullopt;
      } else {
        if (inv[n2] >= 0) return std::nullopt;
        map[n1] = n2;
        inv[n2] = n1;
        ++mapped;
        q.push_back(n1);
      }
    }
  }
  if (mapped != g1.vertex_count()) return std::nullopt;  // g1 not connected from src
  return map;
}

inline std::array<std::array<std::uint8_t, 2>, 4> signature(const MarkedGraph& g, VertexId v) {
  std::array<std::array<std::uint8_t, 2>, 4> sig{};
  for (int s = 0; s < 4; ++s) {
    const auto& sl = g.slot(v, static_cast<Gen>(s));
    sig[s][0] = sl.count;
    sig[s][1] = (sl.count == 1 && sl.nbr == static_cast<std::int64_t>(v)) ? 1 : 0;
  }
  return sig;
}

// Backtracking fallback for non-deterministic or disconnected graphs; only
// small instances are expected here.
inline bool backtrack_iso(const MarkedGraph& g1, const MarkedGraph& g2) {
  const std::size_t n = g1.vertex_count();
  std::vector<VertexId> order;
  {
    std::vector<bool> seen(n, false);
    std::deque<VertexId> q{g1.marked()};
    seen[g1.marked()] = true;
    while (!q.empty()) {
      VertexId v = q.front();
      q.pop_front();
      order.push_back(v);
      for (const auto& e : g1.edges()) {
        VertexId o = std::numeric_limits<VertexId>::max();
        if (e.u == v) o = e.v;
        if (e.v == v) o = e.u;
        if (o == std::numeric_limits<VertexId>::max() || seen[o]) continue;
        seen[o] = true;
        q.push_back(o);
      }
    }
    for (VertexId v = 0; v < n; ++v)
      if (!seen[v]) order.push_back(v);
  }
  std::vector<std::int64_t> map(n, -1), inv(n, -1);
  auto consistent = [&](VertexId v, VertexId w) {
    if (signature(g1, v) != signature(g2, w)) return false;
    for (VertexId u = 0; u < n; ++u) {
      if (map[u] < 0 || u == v) continue;
      for (int s = 0; s < 4; ++s)
        if (g1.edge_multiplicity(v, u, static_cast<Gen>(s)) !=
            g2.edge_multiplicity(w, static_cast<VertexId>(map[u]), static_cast<Gen>(s)))
          return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (i == n) return true;
    VertexId v = order[i];
    if (i == 0) {
      VertexId w = g2.marked();
      if (!consistent(v, w)) return false;
      map[v] = w;
      inv[w] = v;
      if (self(self, 1)) return true;
      map[v] = inv[w] = -1;
      return false;
    }
    for (VertexId w = 0; w < n; ++w) {
      if (inv[w] >= 0 || !consistent(v, w)) continue;
      map[v] = w;
      inv[w] = v;
      if (self(self, i + 1)) return true;
      map[v] = inv[w] = -1;
    }
    return false;
  };
  return rec(rec, 0);
}

}  // namespace detail

// Label- and mark-preserving isomorphism. Deterministic connected graphs are
// matched by a forced traversal from the marked vertices; everything else
// falls back to backtracking with label-degree pruning.
inline bool isomorphic(const MarkedGraph& g1, const MarkedGraph& g2) {
  if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return false;
  if (g1.label_histogram() != g2.label_histogram()) return false;
  if (g1.deterministic() && g2.deterministic() && g1.connected_from_mark() &&
      g2.connected_from_mark())
    return detail::forced_map(g1, g2, g1.marked(), g2.marked()).has_value();
  return detail::backtrack_iso(g1, g2);
}

// All automorphisms (vertex bijections) of a deterministic connected graph.
// Each automorphism is determined by the image of the marked vertex, so the
// candidates are enumerated and verified by the forced traversal. With
// as_unmarked == false the mark must be fixed, which pins the identity.
inline std::vector<std::vector<VertexId>> automorphism_group(const MarkedGraph& g,
                                                             bool as_unmarked) {
  if (!g.deterministic() || !g.connected_from_mark())
    throw std::invalid_argument("automorphism_group expects a deterministic connected graph");
  std::vector<std::vector<VertexId>> out;
  const VertexId base = g.marked();
  std::vector<VertexId> candidates;
  if (as_unmarked) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) candidates.push_back(v);
  } else {
    candidates.push_back(base);
  }
  for (VertexId v : candidates) {
    auto m = detail::forced_map(g, g, base, v);
    if (!m) continue;
    std::vector<VertexId> perm(m->size());
    for (std::size_t i = 0; i < m->size(); ++i) perm[i] = static_cast<VertexId>((*m)[i]);
    out.push_back(std::move(perm));
  }
  return out;
}

struct QuotientResult {
  MarkedGraph graph;
  std::vector<std::size_t> class_sizes;

  bool k_fold_check(std::size_t k) const {
    return std::all_of(class_sizes.begin(), class_sizes.end(),
                       [k](std::size_t s) { return s == k; });
  }
};

// Quotient along an explicit vertex partition. The induced edge map must be
// well defined: per class and label all member edges must aim at one class.
inline QuotientResult quotient(const MarkedGraph& g,
                               const std::vector<std::vector<VertexId>>& partition) {
  const std::size_t n = g.vertex_count();
  std::vector<std::int64_t> cls(n, -1);
  for (std::size_t c = 0; c < partition.size(); ++c) {
    if (partition[c].empty()) throw IllFormedPartition("empty class");
    for (VertexId v : partition[c]) {
      if (v >= n || cls[v] >= 0) throw IllFormedPartition("partition does not cover vertices exactly once");
      cls[v] = static_cast<std::int64_t>(c);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (cls[v] < 0) throw IllFormedPartition("partition does not cover vertices exactly once");

  // each class is named after its lexicographically least member; classes are
  // disjoint so the names are distinct
  std::vector<std::string> per_class(partition.size());
  for (std::size_t c = 0; c < partition.size(); ++c) {
    std::string best = g.name(partition[c][0]);
    for (VertexId v : partition[c]) best = std::min(best, g.name(v));
    per_class[c] = best;
  }

  // well-definedness: for each class and label, one target class at most
  for (std::size_t c = 0; c < partition.size(); ++c) {
    for (int s = 0; s < 4; ++s) {
      std::int64_t target = -2;
      for (VertexId v : partition[c]) {
        const auto& sl = g.slot(v, static_cast<Gen>(s));
        if (sl.count == 0) continue;
        if (sl.count > 1) throw IllFormedPartition("source graph not deterministic");
        std::int64_t t = cls[static_cast<VertexId>(sl.nbr)];
        if (target == -2)
          target = t;
        else if (target != t)
          throw IllFormedPartition("label " + std::string(1, gen_char(static_cast<Gen>(s))) +
                                   " maps class of " + g.name(partition[c][0]) +
                                   " to two distinct classes");
      }
    }
  }

  std::set<std::tuple<std::string, std::string, Gen>> eset;
  for (const auto& e : g.edges()) {
    std::string cu = per_class[static_cast<std::size_t>(cls[e.u])];
    std::string cv = per_class[static_cast<std::size_t>(cls[e.v])];
    if (cv < cu) std::swap(cu, cv);
    eset.emplace(cu, cv, e.label);
  }
  std::vector<EdgeSpec> edges;
  for (const auto& [u, v, s] : eset) edges.push_back({u, v, s});
  std::vector<std::string> names = per_class;
  std::sort(names.begin(), names.end());
  MarkedGraph q(std::move(names), edges, per_class[static_cast<std::size_t>(cls[g.marked()])]);
  std::vector<std::size_t> sizes;
  for (const auto& c : partition) sizes.push_back(c.size());
  return QuotientResult{std::move(q), std::move(sizes)};
}

// Joint orbits of a set of vertex bijections, as a partition.
inline std::vector<std::vector<VertexId>> orbit_partition(
    std::size_t n, const std::vector<std::vector<VertexId>>& perms) {
  std::vector<VertexId> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<VertexId>(i);
  std::function<VertexId(VertexId)> find = [&](VertexId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& p : perms)
    for (std::size_t i = 0; i < n; ++i) {
      VertexId a = find(static_cast<VertexId>(i)), b = find(p[i]);
      if (a != b) parent[a] = b;
    }
  std::map<VertexId, std::vector<VertexId>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(static_cast<VertexId>(i))].push_back(static_cast<VertexId>(i));
  std::vector<std::vector<VertexId>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

struct SchreierVerdict {
  bool pass = true;
  int condition = 0;  // 2 or 3 when failed
  std::string witness_vertex;
  std::string witness_word;

  std::string describe() const {
    if (pass) return "pass";
    std::string s = "fail(" + std::to_string(condition) + ") at vertex " + witness_vertex;
    if (!witness_word.empty()) s += " word " + witness_word;
    return s;
  }
};

// Schreier-graph recognition at finite relator resolution: (i) labels lie in
// the generating set (guaranteed by the label type), (ii) one edge per
// vertex and label, (iii) every path traced by a trivial reduced word of
// length <= cap is closed. Vertices listed in `boundary` are exempt from the
// completeness half of (ii) (truncated balls); traces that run through a
// missing edge are skipped.
inline SchreierVerdict verify_schreier(const MarkedGraph& g, int relator_cap = 12,
                                       const std::unordered_set<VertexId>& boundary = {}) {
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (int s = 0; s < 4; ++s) {
      const auto& sl = g.slot(v, static_cast<Gen>(s));
      if (sl.count > 1 || (sl.count == 0 && !boundary.contains(v)))
        return {false, 2, g.name(v), std::string(1, gen_char(static_cast<Gen>(s)))};
    }
  }
  std::vector<GroupElement> relators;
  for_each_reduced_word(relator_cap, [&](const std::vector<Gen>& w) {
    if (w.empty()) return;
    GroupElement e = GroupElement::from_raw(w);
    if (is_trivial(e)) relators.push_back(std::move(e));
  });
  for (const GroupElement& r : relators) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      std::int64_t cur = v;
      bool complete = true;
      const auto& w = r.word();
      for (auto it = w.rbegin(); it != w.rend(); ++it) {
        const auto& sl = g.slot(static_cast<VertexId>(cur), *it);
        if (sl.count != 1) {
          complete = false;
          break;
        }
        cur = sl.nbr;
      }
      if (complete && cur != static_cast<std::int64_t>(v))
        return {false, 3, g.name(v), r.str()};
    }
  }
  return {};
}

// The value of the ball metric: Exact(n) certifies distance 2^-n (balls of
// radius n-1 isomorphic, radius n not), Bound(R) certifies distance
// <= 2^-(R+1), Zero is reserved for isomorphic finite graphs.
struct DyadicDistance {
  enum class Kind { zero, exact, bound };
  Kind kind = Kind::zero;
  int n = 0;

  static DyadicDistance Zero() { return {Kind::zero, 0}; }
  static DyadicDistance Exact(int n) { return {Kind::exact, n}; }
  static DyadicDistance Bound(int r) { return {Kind::bound, r}; }

  bool is_zero() const { return kind == Kind::zero; }
  bool is_exact() const { return kind == Kind::exact; }
  bool is_bound() const { return kind == Kind::bound; }

  // distance <= 2^-upper_exponent(); INT_MAX stands for "<= 0".
  int upper_exponent() const {
    switch (kind) {
      case Kind::zero: return std::numeric_limits<int>::max();
      case Kind::exact: return n;
      case Kind::bound: return n + 1;
    }
    return 0;
  }

  // distance >= 2^-lower_exponent(); INT_MAX stands for ">= 0" (vacuous).
  int lower_exponent() const {
    return kind == Kind::exact ? n : std::numeric_limits<int>::max();
  }

  std::string str() const {
    switch (kind) {
      case Kind::zero: return "zero";
      case Kind::exact: return "exact n=" + std::to_string(n) + " delta=2^-" + std::to_string(n);
      case Kind::bound:
        return "bound R=" + std::to_string(n) + " delta<=2^-" + std::to_string(n + 1);
    }
    return {};
  }

  bool operator==(const DyadicDistance& o) const = default;
};

// Anything that can produce closed balls around its marked vertex.
class BallSource {
 public:
  virtual ~BallSource() = default;
  virtual MarkedGraph ball(int radius) const = 0;
  // The whole graph when finite, nullptr for infinite graphs.
  virtual std::optional<MarkedGraph> finite_graph() const { return std::nullopt; }
};

class FiniteSource final : public BallSource {
 public:
  explicit FiniteSource(MarkedGraph g) : g_(std::move(g)) {}
  MarkedGraph ball(int radius) const override { return closed_ball(g_, radius); }
  std::optional<MarkedGraph> finite_graph() const override { return g_; }
  const MarkedGraph& graph() const { return g_; }

 private:
  MarkedGraph g_;
};

// The marked-graph ultrametric at resolution max_radius: the smallest radius
// with non-isomorphic balls when it is <= max_radius, otherwise a certified
// bound. Zero only for isomorphic finite graphs.
inline DyadicDistance delta(const BallSource& a, const BallSource& b, int max_radius) {
  if (max_radius < 0) throw std::invalid_argument("max_radius must be >= 0");
  auto fa = a.finite_graph();
  auto fb = b.finite_graph();
  if (fa && fb && isomorphic(*fa, *fb)) return DyadicDistance::Zero();
  for (int n = 0; n <= max_radius; ++n)
    if (!isomorphic(a.ball(n), b.ball(n))) return DyadicDistance::Exact(n);
  return DyadicDistance::Bound(max_radius);
}

// Canonical encoding of a deterministic connected marked graph: vertices are
// renumbered by a label-ordered breadth-first traversal from the mark, which
// is a complete isomorphism invariant for this class.
inline std::string canon_string(const MarkedGraph& g) {
  if (!g.deterministic() || !g.connected_from_mark())
    throw std::invalid_argument("canon_string expects a deterministic connected graph");
  std::vector<std::int64_t> id(g.vertex_count(), -1);
  std::vector<VertexId> order;
  id[g.marked()] = 0;
  order.push_back(g.marked());
  for (std::size_t i = 0; i < order.size(); ++i) {
    VertexId v = order[i];
    for (int s = 0; s < 4; ++s) {
      const auto& sl = g.slot(v, static_cast<Gen>(s));
      if (sl.count != 1) continue;
      VertexId w = static_cast<VertexId>(sl.nbr);
      if (id[w] < 0) {
        id[w] = static_cast<std::int64_t>(order.size());
        order.push_back(w);
      }
    }
  }
  std::string out;
  for (VertexId v : order) {
    for (int s = 0; s < 4; ++s) {
      const auto& sl = g.slot(v, static_cast<Gen>(s));
      if (sl.count == 0)
        out += ".";
      else
        out += std::to_string(id[static_cast<VertexId>(sl.nbr)]);
      out += ",";
    }
    out += ";";
  }
  return out;
}

}  // namespace grig
