#pragma once

// Finite-resolution experiments on the invariant set: convergence of orbit
// graphs to the limit graphs with the dyadic rate, the isolated-point check,
// minimality probes over the re-marking action, ergodic cylinder averages,
// and the metric on subgroups through membership oracles.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "grig/boundary.hpp"
#include "grig/graph_space.hpp"
#include "grig/group.hpp"
#include "grig/marked_graph.hpp"

namespace grig {

namespace detail {

// Deterministic parallel map over [0, n): results land by index, so the
// output is independent of the number of workers.
template <typename Fn>
inline void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  int workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// eta_z = 1^{z-1} 0 1^infinity, the standard sequence converging to xi0.
inline BoundaryWord eta_with_first_zero(int z) {
  if (z < 1) throw std::invalid_argument("first zero position must be >= 1");
  return BoundaryWord(std::string(static_cast<std::size_t>(z - 1), '1') + "0", "1");
}

struct ConvergenceTerm {
  int z = 0;
  int target = 0;            // z mod 3
  int required_radius = 0;   // 2^(z-2)
  int checked_radius = 0;    // min(required, budget)
  DyadicDistance dist;       // measured at checked_radius
  bool bound_ok = false;     // balls agree up to required_radius
  bool budget_exhausted = false;
};

struct ConvergenceReport {
  int radius_budget = 0;
  std::vector<ConvergenceTerm> terms;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["radius_budget"] = radius_budget;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms) {
      j["terms"].push_back({{"z", t.z},
                            {"target", t.target},
                            {"required_radius", t.required_radius},
                            {"checked_radius", t.checked_radius},
                            {"distance", t.dist.str()},
                            {"bound_ok", t.bound_ok},
                            {"budget_exhausted", t.budget_exhausted}});
    }
    return j;
  }

  std::string table() const {
    std::ostringstream out;
    out << "z  target  required  checked  distance                 bound_ok\n";
    for (const auto& t : terms) {
      out << t.z << "  D*_" << t.target << "    " << t.required_radius << "\t     " << t.checked_radius
          << "\t  " << t.dist.str() << "   " << (t.bound_ok ? "yes" : "no")
          << (t.budget_exhausted ? " (budget exhausted)" : "") << "\n";
    }
    return out.str();
  }
};

// For each z: distance between F(1^{z-1} 0 1^inf) and Delta*_{z mod 3},
// measured up to min(budget, 2^(z-2)); the bound check records whether the
// balls agree up to radius 2^(z-2).
inline ConvergenceReport convergence_experiment(const std::vector<int>& z_list, int radius_budget,
                                                int jobs = 1) {
  for (int z : z_list)
    if (z < 3) throw std::invalid_argument("convergence terms need z >= 3");
  ConvergenceReport report;
  report.radius_budget = radius_budget;
  report.terms.resize(z_list.size());
  detail::parallel_for(z_list.size(), jobs, [&](std::size_t i) {
    int z = z_list[i];
    ConvergenceTerm t;
    t.z = z;
    t.target = z % 3;
    t.required_radius = 1 << (z - 2);
    t.checked_radius = std::min(radius_budget, t.required_radius);
    t.budget_exhausted = radius_budget < t.required_radius;
    ImplicitGraph fz = ImplicitGraph::orbit(eta_with_first_zero(z));
    ImplicitGraph target = ImplicitGraph::limit(t.target);
    t.dist = delta(fz, target, t.checked_radius);
    t.bound_ok = t.dist.is_bound() && t.dist.n >= t.required_radius;
    report.terms[i] = t;
  });
  return report;
}

struct IsolatedPointReport {
  bool pass = false;
  // (graph description, vertex name) of every vertex carrying the three
  // loops b, c, d within the scanned balls.
  std::vector<std::pair<std::string, std::string>> occurrences;
};

inline const std::vector<Gen> kTripleLoop = {Gen::b, Gen::c, Gen::d};

// Scans corpus balls for vertices carrying the three loops b, c, d. Such a
// vertex can only be the point 1^infinity inside an orbit graph (never a
// limit-graph or cover vertex), and it sits at the mark exactly for F(xi0)
// itself: a marked graph matching the triple loop at radius 0 is F(xi0).
inline IsolatedPointReport isolated_point_scan(
    const std::vector<std::pair<std::string, MarkedGraph>>& corpus_balls) {
  IsolatedPointReport rep;
  bool seen_f_xi0 = false;
  bool violation = false;
  for (const auto& [desc, ball] : corpus_balls) {
    bool orbit_graph = desc.rfind("orbit:", 0) == 0;
    for (VertexId v = 0; v < ball.vertex_count(); ++v) {
      if (ball.loops_at(v) != kTripleLoop) continue;
      rep.occurrences.emplace_back(desc, ball.name(v));
      if (!orbit_graph || ball.name(v) != "(1)^w") violation = true;
      if (ball.name(v) == ball.marked_name()) {
        if (desc == "orbit:(1)^w")
          seen_f_xi0 = true;
        else
          violation = true;
      }
    }
  }
  rep.pass = seen_f_xi0 && !violation;
  return rep;
}

inline std::vector<std::pair<std::string, MarkedGraph>> standard_corpus_balls(int radius) {
  std::vector<std::pair<std::string, ImplicitGraph>> corpus;
  corpus.emplace_back("orbit:(1)^w", ImplicitGraph::orbit(xi0()));
  corpus.emplace_back("orbit:(0)^w", ImplicitGraph::orbit(BoundaryWord("", "0")));
  corpus.emplace_back("orbit:(01)^w", ImplicitGraph::orbit(BoundaryWord("", "01")));
  corpus.emplace_back("orbit:0(1)^w", ImplicitGraph::orbit(BoundaryWord("0", "1")));
  corpus.emplace_back("orbit:11110(1)^w", ImplicitGraph::orbit(eta_with_first_zero(5)));
  for (int i = 0; i < 3; ++i)
    corpus.emplace_back("limit:" + std::to_string(i), ImplicitGraph::limit(i));
  corpus.emplace_back("cover", ImplicitGraph::cover());
  std::vector<std::pair<std::string, MarkedGraph>> balls;
  for (const auto& [desc, g] : corpus) balls.emplace_back(desc, g.symmetric_ball(radius));
  return balls;
}

inline IsolatedPointReport isolated_point_check(int radius) {
  return isolated_point_scan(standard_corpus_balls(radius));
}

struct MinimalityResult {
  bool found = false;
  GroupElement witness;
  std::size_t explored = 0;
};

// Breadth-first search over the re-marking action from `start`, generator
// order a, b, c, d, looking for a mark whose radius-r ball matches the
// target ball. Ball canonical forms are hashed so each marked-graph state is
// compared once; the walk itself is deduplicated on exact vertices.
inline MinimalityResult minimality_probe(const ImplicitGraph& start, const MarkedGraph& target,
                                         int target_radius, std::size_t step_budget) {
  MinimalityResult res;
  const std::string want = canon_string(closed_ball(target, target_radius));
  std::unordered_set<std::string> ball_seen;
  std::unordered_map<SpaceVertex, std::size_t, SpaceVertexHash> index;
  std::vector<SpaceVertex> vertices{start.marked()};
  std::vector<std::int64_t> parent{-1};
  std::vector<Gen> via{Gen::a};
  index.emplace(start.marked(), 0);
  for (std::size_t i = 0; i < vertices.size() && i < step_budget; ++i) {
    SpaceVertex v = vertices[i];
    std::string canon = canon_string(start.ball_at(v, target_radius));
    ++res.explored;
    if (ball_seen.insert(canon).second && canon == want) {
      std::vector<Gen> raw;
      for (std::int64_t cur = static_cast<std::int64_t>(i); cur > 0; cur = parent[cur])
        raw.push_back(via[cur]);
      res.found = true;
      res.witness = GroupElement::from_raw(raw);
      return res;
    }
    for (int s = 0; s < 4; ++s) {
      SpaceVertex w = start.neighbor(v, static_cast<Gen>(s));
      if (index.contains(w)) continue;
      index.emplace(w, vertices.size());
      vertices.push_back(w);
      parent.push_back(static_cast<std::int64_t>(i));
      via.push_back(static_cast<Gen>(s));
    }
  }
  return res;
}

struct MinimalityReport {
  struct Entry {
    std::string start;
    std::string target;
    MinimalityResult result;
  };
  std::vector<Entry> entries;

  bool all_found() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const Entry& e) { return e.result.found; });
  }

  std::string table() const {
    std::ostringstream out;
    for (const auto& e : entries) {
      out << e.start << " -> " << e.target << ": ";
      if (e.result.found)
        out << "witness " << e.result.witness.str();
      else
        out << "exhausted";
      out << " (" << e.result.explored << " marks)\n";
    }
    return out.str();
  }
};

inline MinimalityReport minimality_report(
    const std::vector<std::pair<std::string, ImplicitGraph>>& starts,
    const std::vector<std::pair<std::string, MarkedGraph>>& targets, int target_radius,
    std::size_t step_budget) {
  MinimalityReport rep;
  for (const auto& [sname, start] : starts)
    for (const auto& [tname, target] : targets)
      rep.entries.push_back(
          {sname, tname, minimality_probe(start, target, target_radius, step_budget)});
  return rep;
}

struct ErgodicAverage {
  std::string cylinder;
  double frequency = 0;
  double expected = 0;
  std::size_t points = 0;
};

// Frequency of the cylinder w over the orbit ball: all reduced words of
// length <= word_length applied to xi, with the resulting points
// deduplicated. Unique ergodicity makes this approach 2^-|w|.
inline ErgodicAverage ergodic_average(const BoundaryWord& xi, const std::string& cylinder,
                                      int word_length) {
  for (char c : cylinder)
    if (c != '0' && c != '1') throw std::invalid_argument("binary cylinder expected");
  std::set<BoundaryWord> points;
  for (const GroupElement& g : reduced_words_up_to(word_length)) points.insert(act_beta(g, xi));
  std::size_t hit = 0;
  for (const auto& p : points)
    if (p.prefix(cylinder.size()) == cylinder) ++hit;
  ErgodicAverage avg;
  avg.cylinder = cylinder;
  avg.points = points.size();
  avg.frequency = static_cast<double>(hit) / static_cast<double>(points.size());
  avg.expected = std::pow(2.0, -static_cast<double>(cylinder.size()));
  return avg;
}

// Metric on subgroups through a fixed enumeration: 2^-n with n the first
// (1-based) enumeration index where the memberships disagree; a bound at the
// enumeration size otherwise.
inline DyadicDistance subgroup_distance(const MembershipOracle& h1, const MembershipOracle& h2,
                                        int enum_cap) {
  std::vector<GroupElement> list = enumerate_elements(enum_cap);
  for (std::size_t i = 0; i < list.size(); ++i)
    if (h1(list[i]) != h2(list[i])) return DyadicDistance::Exact(static_cast<int>(i + 1));
  return DyadicDistance::Bound(static_cast<int>(list.size()));
}

struct SubgroupMetricTable {
  int enum_cap = 0;
  std::vector<std::string> names;
  std::vector<std::vector<DyadicDistance>> dist;  // symmetric

  // ultrametric inequality over the triples where all three values are exact
  bool ultrametric_on_exact() const {
    for (std::size_t x = 0; x < names.size(); ++x)
      for (std::size_t y = 0; y < names.size(); ++y)
        for (std::size_t z = 0; z < names.size(); ++z) {
          const auto &xz = dist[x][z], &xy = dist[x][y], &yz = dist[y][z];
          if (xz.is_exact() && xy.is_exact() && yz.is_exact() &&
              xz.n < std::min(xy.n, yz.n))
            return false;
        }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["enum_cap"] = enum_cap;
    j["names"] = names;
    j["distances"] = nlohmann::json::array();
    for (std::size_t x = 0; x < names.size(); ++x)
      for (std::size_t y = x + 1; y < names.size(); ++y)
        j["distances"].push_back({{"h1", names[x]}, {"h2", names[y]}, {"d", dist[x][y].str()}});
    return j;
  }

  std::string table() const {
    std::ostringstream out;
    for (std::size_t x = 0; x < names.size(); ++x)
      for (std::size_t y = x + 1; y < names.size(); ++y)
        out << "d(" << names[x] << ", " << names[y] << ") = " << dist[x][y].str() << "\n";
    return out.str();
  }
};

inline SubgroupMetricTable subgroup_metric_table(
    const std::vector<std::pair<std::string, MembershipOracle>>& subs, int enum_cap) {
  SubgroupMetricTable t;
  t.enum_cap = enum_cap;
  for (const auto& [name, oracle] : subs) t.names.push_back(name);
  t.dist.assign(subs.size(), std::vector<DyadicDistance>(subs.size(), DyadicDistance::Zero()));
  for (std::size_t x = 0; x < subs.size(); ++x)
    for (std::size_t y = x; y < subs.size(); ++y) {
      DyadicDistance d = subgroup_distance(subs[x].second, subs[y].second, enum_cap);
      t.dist[x][y] = d;
      t.dist[y][x] = d;
    }
  return t;
}

// Oracle for g H g^-1: x belongs iff g^-1 x g belongs to H.
inline MembershipOracle stabilizer_conjugation(const GroupElement& g, MembershipOracle h) {
  return [g, h = std::move(h)](const GroupElement& x) { return h(g.inverse() * x * g); };
}

// Plain-text key=value experiment configs ('#' starts a comment).
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = val;
  }
  return out;
}

}  // namespace grig
