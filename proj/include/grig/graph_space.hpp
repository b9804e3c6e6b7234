#pragma once

// Lazily evaluated infinite Schreier graphs: orbit graphs F(xi), the limit
// graphs Delta_0/1/2 on two sheets, the 4-sheeted Klein cover Delta, the
// marked-vertex action, and coset-graph balls built from subgroup oracles.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "grig/boundary.hpp"
#include "grig/group.hpp"
#include "grig/marked_graph.hpp"

namespace grig {

struct SpaceVertex {
  OrbitPoint point;
  std::uint8_t sheet = 0;  // Klein element index; limit graphs use 0/1, orbits 0

  bool operator==(const SpaceVertex& o) const = default;
};

struct SpaceVertexHash {
  std::size_t operator()(const SpaceVertex& v) const {
    return OrbitPointHash{}(v.point) * 31 + v.sheet;
  }
};

inline const char* klein_suffix(std::uint8_t sheet) {
  static const char* tags[4] = {"#e", "#b", "#c", "#d"};
  return tags[sheet];
}

// An infinite labeled graph given by a vertex universe (orbit points of a
// base word, possibly crossed with sheet tags) and an involutive neighbor
// rule, one image per (vertex, label).
class ImplicitGraph final : public BallSource {
 public:
  enum class Kind { orbit, limit, cover };

  static ImplicitGraph orbit(BoundaryWord xi) {
    ImplicitGraph g;
    g.kind_ = Kind::orbit;
    g.base_ = std::move(xi);
    return g;
  }

  // Delta_i: two sheets of the xi0 line; the retained loop is b for i = 0,
  // d for i = 1, c for i = 2, and the two removed loops become cross edges
  // at the fiber. Marked at (xi0, 0).
  static ImplicitGraph limit(int i) {
    if (i < 0 || i > 2) throw std::invalid_argument("limit index in {0,1,2}");
    ImplicitGraph g;
    g.kind_ = Kind::limit;
    g.limit_index_ = i;
    g.base_ = xi0();
    return g;
  }

  // Delta: four Klein-tagged sheets of the xi0 line; at the fiber the labels
  // b, c, d act on the tags by Klein multiplication. Marked at (xi0, e).
  static ImplicitGraph cover() {
    ImplicitGraph g;
    g.kind_ = Kind::cover;
    g.base_ = xi0();
    return g;
  }

  Kind kind() const { return kind_; }
  int limit_index() const { return limit_index_; }
  const BoundaryWord& base() const { return base_; }
  const SpaceVertex& marked() const { return marked_; }

  ImplicitGraph with_marked(SpaceVertex v) const {
    ImplicitGraph g = *this;
    g.marked_ = std::move(v);
    return g;
  }

  Gen retained_loop() const {
    static constexpr Gen table[3] = {Gen::b, Gen::d, Gen::c};
    return table[limit_index_];
  }

  bool on_fiber(const SpaceVertex& v) const {
    return kind_ != Kind::orbit && v.point.flips.empty();
  }

  SpaceVertex neighbor(const SpaceVertex& v, Gen s) const {
    if (s == Gen::a || kind_ == Kind::orbit || !on_fiber(v))
      return {orbit_apply(s, base_, v.point), v.sheet};
    if (kind_ == Kind::limit) {
      if (s == retained_loop()) return v;
      return {v.point, static_cast<std::uint8_t>(v.sheet ^ 1)};
    }
    // cover: tags multiply in the Klein group (xor on the index)
    return {v.point, static_cast<std::uint8_t>(v.sheet ^ static_cast<std::uint8_t>(s))};
  }

  BoundaryWord point_word(const SpaceVertex& v) const { return materialize(base_, v.point); }

  std::string vertex_name(const SpaceVertex& v) const {
    std::string name = point_word(v).str();
    if (kind_ == Kind::limit) name += (v.sheet ? "#1" : "#0");
    if (kind_ == Kind::cover) name += klein_suffix(v.sheet);
    return name;
  }

  // The special fiber: the mark alone for orbit graphs, both copies of xi0
  // for limit graphs, all four for the cover. Balls around this set are the
  // symmetric balls used for automorphism and quotient checks.
  std::vector<SpaceVertex> fiber() const {
    switch (kind_) {
      case Kind::orbit: return {marked_};
      case Kind::limit: return {{OrbitPoint{}, 0}, {OrbitPoint{}, 1}};
      case Kind::cover:
        return {{OrbitPoint{}, 0}, {OrbitPoint{}, 1}, {OrbitPoint{}, 2}, {OrbitPoint{}, 3}};
    }
    return {};
  }

  // A vertex budget guards ball materialization: the corpus graphs grow
  // linearly, so hitting it signals a misconfigured radius.
  static constexpr std::size_t kBallVertexCap = 1u << 20;

  MarkedGraph ball_around(const std::vector<SpaceVertex>& centers, const SpaceVertex& mark,
                          int radius) const {
    if (radius < 0) throw std::invalid_argument("radius must be >= 0");
    std::unordered_map<SpaceVertex, int, SpaceVertexHash> dist;
    std::deque<SpaceVertex> q;
    for (const auto& c : centers) {
      if (dist.emplace(c, 0).second) q.push_back(c);
    }
    while (!q.empty()) {
      SpaceVertex v = q.front();
      q.pop_front();
      int d = dist.at(v);
      if (d == radius) continue;
      for (int s = 0; s < 4; ++s) {
        SpaceVertex w = neighbor(v, static_cast<Gen>(s));
        if (dist.emplace(w, d + 1).second) {
          if (dist.size() > kBallVertexCap)
            throw std::runtime_error("ball vertex budget exceeded; radius misconfigured");
          q.push_back(w);
        }
      }
    }
    std::vector<std::string> names;
    names.reserve(dist.size());
    for (const auto& [v, d] : dist) names.push_back(vertex_name(v));
    std::set<std::tuple<std::string, std::string, Gen>> eset;
    for (const auto& [v, d] : dist) {
      std::string vn = vertex_name(v);
      for (int s = 0; s < 4; ++s) {
        SpaceVertex w = neighbor(v, static_cast<Gen>(s));
        auto it = dist.find(w);
        if (it == dist.end()) continue;
        std::string wn = vertex_name(w);
        if (wn < vn)
          eset.emplace(wn, vn, static_cast<Gen>(s));
        else
          eset.emplace(vn, wn, static_cast<Gen>(s));
      }
    }
    std::vector<EdgeSpec> edges;
    for (const auto& [u, v, s] : eset) edges.push_back({u, v, s});
    return MarkedGraph(std::move(names), edges, vertex_name(mark));
  }

  MarkedGraph ball_at(const SpaceVertex& center, int radius) const {
    return ball_around({center}, center, radius);
  }

  MarkedGraph ball(int radius) const override { return ball_at(marked_, radius); }

  MarkedGraph symmetric_ball(int radius) const {
    auto f = fiber();
    return ball_around(f, f.front(), radius);
  }

 private:
  ImplicitGraph() = default;

  Kind kind_ = Kind::orbit;
  int limit_index_ = 0;
  BoundaryWord base_;
  SpaceVertex marked_;
};

// The natural action on marked Schreier graphs: the same graph with the
// marked vertex moved along the path traced by the reversed word (the
// rightmost letter acts first).
inline ImplicitGraph act_A(const GroupElement& g, const ImplicitGraph& graph) {
  SpaceVertex v = graph.marked();
  const auto& w = g.word();
  for (auto it = w.rbegin(); it != w.rend(); ++it) v = graph.neighbor(v, *it);
  return graph.with_marked(v);
}

using MembershipOracle = std::function<bool(const GroupElement&)>;

struct CapTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ball of radius `radius` around the coset H in the Schreier coset graph of
// a subgroup given by a membership oracle. Vertices are minimal-length coset
// representatives found by breadth-first search, edges act by left
// multiplication with the generators.
inline MarkedGraph coset_graph_ball(const MembershipOracle& oracle, int radius,
                                    std::size_t element_length_cap = 256) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  std::vector<GroupElement> reps{GroupElement()};
  std::vector<int> dist{0};
  std::deque<std::size_t> q{0};
  std::set<std::tuple<std::string, std::string, Gen>> eset;
  auto find_rep = [&](const GroupElement& cand) -> std::int64_t {
    for (std::size_t j = 0; j < reps.size(); ++j) {
      if (reps[j].length() + cand.length() > element_length_cap)
        throw CapTooSmall("coset comparison beyond element length cap");
      if (oracle(reps[j].inverse() * cand)) return static_cast<std::int64_t>(j);
    }
    return -1;
  };
  auto add_edge = [&](std::size_t i, std::size_t j, Gen s) {
    std::string a = reps[i].str(), b = reps[j].str();
    if (b < a) std::swap(a, b);
    eset.emplace(a, b, s);
  };
  while (!q.empty()) {
    std::size_t i = q.front();
    q.pop_front();
    for (int si = 0; si < 4; ++si) {
      Gen s = static_cast<Gen>(si);
      GroupElement cand = GroupElement::generator(s) * reps[i];
      std::int64_t j = find_rep(cand);
      if (j >= 0) {
        add_edge(i, static_cast<std::size_t>(j), s);
        continue;
      }
      if (dist[i] == radius) continue;  // outside the ball
      reps.push_back(cand);
      dist.push_back(dist[i] + 1);
      add_edge(i, reps.size() - 1, s);
      q.push_back(reps.size() - 1);
    }
  }
  std::vector<std::string> names;
  for (const auto& r : reps) names.push_back(r.str());
  std::vector<EdgeSpec> edges;
  for (const auto& [u, v, s] : eset) edges.push_back({u, v, s});
  return MarkedGraph(std::move(names), edges, "e");
}

inline MembershipOracle stabilizer_oracle(BoundaryWord xi) {
  return [xi = std::move(xi)](const GroupElement& g) { return in_stabilizer(g, xi); };
}

inline MembershipOracle neighborhood_stabilizer_oracle(BoundaryWord xi) {
  return [xi = std::move(xi)](const GroupElement& g) {
    return in_neighborhood_stabilizer(g, xi);
  };
}

inline MembershipOracle whole_group_oracle() {
  return [](const GroupElement&) { return true; };
}

}  // namespace grig
