#include "grig/graph_space.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <deque>
#include <random>
#include <unordered_set>
#include <vector>

#include "grig/boundary.hpp"
#include "grig/marked_graph.hpp"

using namespace grig;

namespace {

GroupElement random_reduced(std::mt19937& rng, int len) {
  std::vector<Gen> w;
  bool a_next = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
  for (int i = 0; i < len; ++i) {
    w.push_back(a_next ? Gen::a
                       : static_cast<Gen>(std::uniform_int_distribution<int>(1, 3)(rng)));
    a_next = !a_next;
  }
  return GroupElement::from_raw(w);
}

std::unordered_set<VertexId> shell(const MarkedGraph& ball, int radius) {
  std::unordered_set<VertexId> out;
  auto dist = ball.distances_from(ball.marked());
  for (VertexId v = 0; v < ball.vertex_count(); ++v)
    if (dist[v] >= radius) out.insert(v);
  return out;
}

}  // namespace

TEST_CASE("orbit graph neighbors and balls") {
  ImplicitGraph f0 = ImplicitGraph::orbit(xi0());
  SpaceVertex mark = f0.marked();
  CHECK(f0.neighbor(mark, Gen::b) == mark);
  CHECK(f0.neighbor(mark, Gen::c) == mark);
  CHECK(f0.neighbor(mark, Gen::d) == mark);
  CHECK(f0.neighbor(mark, Gen::a) != mark);
  CHECK(f0.vertex_name(f0.neighbor(mark, Gen::a)) == "0(1)^w");

  MarkedGraph b0 = f0.ball(0);
  CHECK(b0.vertex_count() == 1);
  CHECK(b0.loops_at(b0.marked()) == std::vector<Gen>({Gen::b, Gen::c, Gen::d}));

  ImplicitGraph generic = ImplicitGraph::orbit(BoundaryWord("", "0"));
  MarkedGraph b1 = generic.ball(1);
  CHECK(b1.vertex_count() == 3);
  CHECK(b1.edge_count() == 6);  // a-edge, double edge, three loops

  // neighbor rule is involutive per label
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    GroupElement g = random_reduced(rng, std::uniform_int_distribution<int>(0, 10)(rng));
    ImplicitGraph moved = act_A(g, generic);
    SpaceVertex v = moved.marked();
    for (int s = 0; s < 4; ++s) {
      Gen gen = static_cast<Gen>(s);
      CHECK(generic.neighbor(generic.neighbor(v, gen), gen) == v);
    }
  }
}

TEST_CASE("limit graphs: retained loop, cross edges, sheet locality") {
  ImplicitGraph d0 = ImplicitGraph::limit(0);
  SpaceVertex fib0 = d0.marked();
  REQUIRE(d0.on_fiber(fib0));
  CHECK(d0.neighbor(fib0, Gen::b) == fib0);                       // retained loop
  CHECK(d0.neighbor(fib0, Gen::c) == SpaceVertex{fib0.point, 1});  // cross
  CHECK(d0.neighbor(fib0, Gen::d) == SpaceVertex{fib0.point, 1});  // cross
  CHECK(d0.neighbor(fib0, Gen::a).sheet == 0);

  ImplicitGraph d1 = ImplicitGraph::limit(1);
  CHECK(d1.retained_loop() == Gen::d);
  ImplicitGraph d2 = ImplicitGraph::limit(2);
  CHECK(d2.retained_loop() == Gen::c);

  // off the fiber every edge stays inside its sheet; the sheet changes only
  // through c', d' at the fiber
  for (int i = 0; i < 3; ++i) {
    ImplicitGraph di = ImplicitGraph::limit(i);
    std::deque<SpaceVertex> q{di.marked()};
    std::unordered_set<std::string> seen{di.vertex_name(di.marked())};
    int steps = 0;
    while (!q.empty() && steps < 500) {
      SpaceVertex v = q.front();
      q.pop_front();
      ++steps;
      for (int s = 0; s < 4; ++s) {
        SpaceVertex w = di.neighbor(v, static_cast<Gen>(s));
        if (w.sheet != v.sheet) {
          CHECK(di.on_fiber(v));
          CHECK(static_cast<Gen>(s) != di.retained_loop());
          CHECK(static_cast<Gen>(s) != Gen::a);
        }
        if (seen.insert(di.vertex_name(w)).second) q.push_back(w);
      }
    }
  }

  // marked ball of Delta*_0 at radius 0: one vertex, only the b loop
  MarkedGraph b0 = d0.ball(0);
  CHECK(b0.vertex_count() == 1);
  CHECK(b0.loops_at(b0.marked()) == std::vector<Gen>({Gen::b}));
  MarkedGraph b1 = ImplicitGraph::limit(1).ball(0);
  CHECK(b1.loops_at(b1.marked()) == std::vector<Gen>({Gen::d}));
}

TEST_CASE("cover graph: Klein fiber and quotient tower") {
  ImplicitGraph cov = ImplicitGraph::cover();
  SpaceVertex e = cov.marked();
  REQUIRE(cov.on_fiber(e));
  CHECK(cov.neighbor(e, Gen::b) == SpaceVertex{e.point, 1});
  CHECK(cov.neighbor(e, Gen::c) == SpaceVertex{e.point, 2});
  CHECK(cov.neighbor(e, Gen::d) == SpaceVertex{e.point, 3});
  CHECK(cov.neighbor(SpaceVertex{e.point, 1}, Gen::c) == SpaceVertex{e.point, 3});

  // 6 fiber matching edges, the a-edge into the marked ray, the d loop on
  // the ray vertex
  MarkedGraph ball1 = cov.ball(1);
  CHECK(ball1.vertex_count() == 5);
  CHECK(ball1.edge_count() == 8);

  const int radius = 16;
  MarkedGraph sym = cov.symmetric_ball(radius);
  CHECK(sym.vertex_count() == 4u * (radius + 1));

  auto autos = automorphism_group(sym, true);
  REQUIRE(autos.size() == 4);
  auto klein_part = orbit_partition(sym.vertex_count(), autos);
  QuotientResult line_q = quotient(sym, klein_part);
  CHECK(line_q.k_fold_check(4));
  CHECK(isomorphic(line_q.graph, ImplicitGraph::orbit(xi0()).symmetric_ball(radius)));

  // order-2 subgroups: the automorphism moving the mark to the corner s
  // quotients onto the limit graph whose retained loop is s
  for (int i = 0; i < 3; ++i) {
    ImplicitGraph di = ImplicitGraph::limit(i);
    Gen kept = di.retained_loop();
    std::string target = cov.vertex_name(SpaceVertex{e.point, static_cast<std::uint8_t>(kept)});
    std::vector<std::vector<VertexId>> sub;
    for (const auto& aut : autos)
      if (sym.name(aut[sym.marked()]) == target) {
        sub = orbit_partition(sym.vertex_count(), {aut});
        break;
      }
    REQUIRE_FALSE(sub.empty());
    QuotientResult q = quotient(sym, sub);
    CHECK(q.k_fold_check(2));
    CHECK(isomorphic(q.graph, di.symmetric_ball(radius)));
  }
}

TEST_CASE("act_A moves the mark along the reversed word") {
  ImplicitGraph f0 = ImplicitGraph::orbit(xi0());
  CHECK(act_A(GroupElement(), f0).marked() == f0.marked());
  CHECK(f0.vertex_name(act_A(GroupElement::parse("a"), f0).marked()) == "0(1)^w");

  std::mt19937 rng(9);
  ImplicitGraph g01 = ImplicitGraph::orbit(BoundaryWord("", "01"));
  for (int trial = 0; trial < 50; ++trial) {
    GroupElement g = random_reduced(rng, std::uniform_int_distribution<int>(0, 8)(rng));
    GroupElement h = random_reduced(rng, std::uniform_int_distribution<int>(0, 8)(rng));
    CHECK(act_A(g * h, g01).marked() == act_A(g, act_A(h, g01)).marked());
  }
}

TEST_CASE("equivariance: remarking commutes with the boundary action") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    BoundaryWord xi = trial % 2 ? BoundaryWord("", "01") : BoundaryWord("10", "011");
    GroupElement g = random_reduced(rng, std::uniform_int_distribution<int>(0, 8)(rng));
    ImplicitGraph fxi = ImplicitGraph::orbit(xi);
    ImplicitGraph fgxi = ImplicitGraph::orbit(act_beta(g, xi));
    ImplicitGraph moved = act_A(g, fxi);
    for (int r : {0, 2, 5}) CHECK(isomorphic(fgxi.ball(r), moved.ball_at(moved.marked(), r)));
  }
}

TEST_CASE("generators act 2-Lipschitz on the graph space") {
  std::vector<ImplicitGraph> corpus;
  corpus.push_back(ImplicitGraph::orbit(BoundaryWord("", "01")));
  corpus.push_back(ImplicitGraph::orbit(BoundaryWord("", "011")));
  corpus.push_back(ImplicitGraph::orbit(xi0()));
  corpus.push_back(ImplicitGraph::limit(0));
  corpus.push_back(ImplicitGraph::limit(2));
  std::mt19937 rng(17);
  int pairs = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      GroupElement g = random_reduced(rng, std::uniform_int_distribution<int>(0, 6)(rng));
      ImplicitGraph x = act_A(g, corpus[i]);
      ImplicitGraph y = act_A(random_reduced(rng, 3), corpus[j]);
      DyadicDistance before = delta(x, y, 10);
      for (int s = 0; s < 4; ++s) {
        GroupElement gen = GroupElement::generator(static_cast<Gen>(s));
        DyadicDistance after = delta(act_A(gen, x), act_A(gen, y), 10);
        // delta' <= 2 delta, certified through the exponent bounds
        if (before.is_exact()) CHECK(after.upper_exponent() >= before.lower_exponent() - 1);
      }
      ++pairs;
    }
  CHECK(pairs == 10);
}

TEST_CASE("coset graph balls") {
  MarkedGraph whole = coset_graph_ball(whole_group_oracle(), 3);
  CHECK(whole.vertex_count() == 1);
  CHECK(whole.edge_count() == 4);
  CHECK(whole.loops_at(whole.marked()).size() == 4);

  // Schreier coset graph of St(xi) is the orbit graph of xi
  for (const BoundaryWord& xi :
       {xi0(), BoundaryWord("", "01"), BoundaryWord("0", "1")}) {
    MarkedGraph cb = coset_graph_ball(stabilizer_oracle(xi), 6);
    CHECK(isomorphic(cb, ImplicitGraph::orbit(xi).ball(6)));
  }

  // Schreier coset graph of the neighborhood stabilizer of xi0 is the cover
  MarkedGraph nb = coset_graph_ball(neighborhood_stabilizer_oracle(xi0()), 5);
  CHECK(isomorphic(nb, ImplicitGraph::cover().ball(5)));

  CHECK_THROWS_AS(coset_graph_ball(stabilizer_oracle(xi0()), 6, 3), CapTooSmall);
}

TEST_CASE("every ball of every implicit graph verifies as a Schreier ball") {
  std::vector<ImplicitGraph> corpus;
  corpus.push_back(ImplicitGraph::orbit(xi0()));
  corpus.push_back(ImplicitGraph::orbit(BoundaryWord("", "01")));
  corpus.push_back(ImplicitGraph::limit(0));
  corpus.push_back(ImplicitGraph::limit(1));
  corpus.push_back(ImplicitGraph::limit(2));
  corpus.push_back(ImplicitGraph::cover());
  for (const auto& g : corpus) {
    for (int r : {0, 3, 6}) {
      MarkedGraph ball = g.ball(r);
      SchreierVerdict v = verify_schreier(ball, 12, shell(ball, r));
      INFO(ball.marked_name() << " radius " << r << ": " << v.describe());
      CHECK(v.pass);
    }
  }
}

TEST_CASE("automorphism counts on symmetric balls") {
  for (int r : {4, 9}) {
    CHECK(automorphism_group(ImplicitGraph::orbit(xi0()).symmetric_ball(r), true).size() == 1);
    CHECK(automorphism_group(ImplicitGraph::orbit(BoundaryWord("", "01")).symmetric_ball(r), true)
              .size() == 1);
    for (int i = 0; i < 3; ++i)
      CHECK(automorphism_group(ImplicitGraph::limit(i).symmetric_ball(r), true).size() == 2);
    CHECK(automorphism_group(ImplicitGraph::cover().symmetric_ball(r), true).size() == 4);
  }
}
