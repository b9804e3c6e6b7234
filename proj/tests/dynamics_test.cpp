#include "grig/dynamics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace grig;

TEST_CASE("eta sequence members are canonical") {
  CHECK(eta_with_first_zero(3).str() == "110(1)^w");
  CHECK(eta_with_first_zero(5).str() == "11110(1)^w");
  CHECK(eta_with_first_zero(1).str() == "0(1)^w");
  CHECK(eta_with_first_zero(4).first_zero() == 4);
}

TEST_CASE("convergence experiment matches the dyadic rate") {
  ConvergenceReport rep = convergence_experiment({3, 4, 5}, 8);
  REQUIRE(rep.terms.size() == 3);
  for (const auto& t : rep.terms) {
    CHECK(t.target == t.z % 3);
    CHECK(t.required_radius == (1 << (t.z - 2)));
    CHECK_FALSE(t.budget_exhausted);
    CHECK(t.bound_ok);
    CHECK(t.dist.is_bound());
  }

  // insufficient budget is reported, not fatal
  ConvergenceReport small = convergence_experiment({6}, 8);
  CHECK(small.terms[0].budget_exhausted);
  CHECK_FALSE(small.terms[0].bound_ok);

  // deterministic under parallelism
  ConvergenceReport par = convergence_experiment({3, 4, 5}, 8, 3);
  for (std::size_t i = 0; i < rep.terms.size(); ++i)
    CHECK(par.terms[i].dist == rep.terms[i].dist);

  // report serialization
  CHECK(rep.to_json().at("terms").size() == 3);
  CHECK(rep.table().find("D*_0") != std::string::npos);
}

TEST_CASE("wrong limit targets are separated at radius zero") {
  for (int z = 3; z <= 6; ++z) {
    ImplicitGraph fz = ImplicitGraph::orbit(eta_with_first_zero(z));
    DyadicDistance right = delta(fz, ImplicitGraph::limit(z % 3), 4);
    for (int j = 0; j < 3; ++j) {
      if (j == z % 3) continue;
      DyadicDistance wrong = delta(fz, ImplicitGraph::limit(j), 4);
      CHECK(wrong == DyadicDistance::Exact(0));
      // the right target is strictly closer
      CHECK(right.upper_exponent() > wrong.lower_exponent());
    }
  }
}

TEST_CASE("the triple-loop ball identifies F(xi0)") {
  IsolatedPointReport rep = isolated_point_check(6);
  CHECK(rep.pass);
  // the vertex 1^inf occurs in the graphs of its own orbit and nowhere else;
  // at the mark only for F(xi0) itself
  REQUIRE(rep.occurrences.size() == 2);
  for (const auto& [desc, vertex] : rep.occurrences) {
    CHECK(vertex == "(1)^w");
    CHECK(desc.rfind("orbit:", 0) == 0);
  }
  CHECK(rep.occurrences[0].first == "orbit:(1)^w");
  CHECK(rep.occurrences[1].first == "orbit:0(1)^w");
}

TEST_CASE("non-isolated points have close corpus neighbours") {
  BoundaryWord xi("", "01");
  for (int R : {3, 6}) {
    // a point sharing a long prefix with xi but a different tail
    BoundaryWord eta(xi.prefix(static_cast<std::size_t>(2 * R + 8)), "1");
    REQUIRE(eta != xi);
    DyadicDistance d = delta(ImplicitGraph::orbit(eta), ImplicitGraph::orbit(xi), R);
    CHECK(d == DyadicDistance::Bound(R));  // delta <= 2^-(R+1)
  }
}

TEST_CASE("minimality probe finds witnesses through the re-marking action") {
  ImplicitGraph f01 = ImplicitGraph::orbit(BoundaryWord("", "01"));

  SECTION("start equals target") {
    MinimalityResult r = minimality_probe(f01, f01.ball(3), 3, 100);
    REQUIRE(r.found);
    CHECK(r.witness.is_identity());
  }

  SECTION("limit graph reaches an orbit-graph ball") {
    ImplicitGraph d0 = ImplicitGraph::limit(0);
    MarkedGraph target = f01.ball(3);
    MinimalityResult r = minimality_probe(d0, target, 3, 5000);
    REQUIRE(r.found);
    ImplicitGraph moved = act_A(r.witness, d0);
    CHECK(isomorphic(moved.ball_at(moved.marked(), 3), closed_ball(target, 3)));
  }

  SECTION("orbit graph reaches a limit-graph ball") {
    ImplicitGraph d1 = ImplicitGraph::limit(1);
    MarkedGraph target = d1.ball(2);
    MinimalityResult r = minimality_probe(f01, target, 2, 5000);
    REQUIRE(r.found);
    ImplicitGraph moved = act_A(r.witness, f01);
    CHECK(isomorphic(moved.ball_at(moved.marked(), 2), closed_ball(target, 2)));
  }

  SECTION("budget exhaustion is a reported outcome") {
    MinimalityResult r = minimality_probe(f01, ImplicitGraph::limit(0).ball(4), 4, 1);
    CHECK_FALSE(r.found);
    CHECK(r.explored == 1);
  }
}

TEST_CASE("ergodic cylinder averages approach the uniform measure") {
  BoundaryWord xi("", "01");
  ErgodicAverage whole = ergodic_average(xi, "", 6);
  CHECK(whole.frequency == 1.0);

  ErgodicAverage half = ergodic_average(xi, "1", 10);
  CHECK(std::abs(half.frequency - 0.5) <= 0.1);

  ErgodicAverage quarter = ergodic_average(xi, "00", 10);
  CHECK(std::abs(quarter.frequency - 0.25) <= 0.1);

  for (const char* w : {"0", "1", "00", "01", "10", "11"}) {
    ErgodicAverage avg = ergodic_average(xi, w, 10);
    CHECK(std::abs(avg.frequency - avg.expected) <= 0.1);
  }
}

TEST_CASE("exactly three limit graphs sit over the marked point") {
  // the marked limit graphs are pairwise separated already at radius 0, and
  // F(xi0) differs from each of them there as well (triple loop vs one loop)
  for (int i = 0; i < 3; ++i) {
    DyadicDistance from_ray = delta(ImplicitGraph::orbit(xi0()), ImplicitGraph::limit(i), 1);
    CHECK(from_ray == DyadicDistance::Exact(0));
    for (int j = i + 1; j < 3; ++j) {
      DyadicDistance d = delta(ImplicitGraph::limit(i), ImplicitGraph::limit(j), 1);
      CHECK(d.is_exact());
      CHECK(d.n <= 1);
    }
  }
}

TEST_CASE("the subgroup metric is an ultrametric on sampled stabilizers") {
  std::vector<std::pair<std::string, MembershipOracle>> subs;
  for (const char* xs : {"(1)^w", "(0)^w", "(01)^w", "0(1)^w", "(011)^w"})
    subs.emplace_back(std::string("stab:") + xs, stabilizer_oracle(BoundaryWord::parse(xs)));
  subs.emplace_back("stabo:(1)^w", neighborhood_stabilizer_oracle(xi0()));
  SubgroupMetricTable t = subgroup_metric_table(subs, 5);
  CHECK(t.ultrametric_on_exact());
  // symmetry and a self-distance bound at the cap
  for (std::size_t x = 0; x < t.names.size(); ++x) {
    CHECK(t.dist[x][x].is_bound());
    for (std::size_t y = 0; y < t.names.size(); ++y) CHECK(t.dist[x][y] == t.dist[y][x]);
  }
  CHECK(t.to_json().at("distances").size() == 15);
  CHECK(t.table().find("d(stab:(1)^w, stabo:(1)^w) = exact n=3") != std::string::npos);
}

TEST_CASE("minimality reports cover start/target matrices") {
  std::vector<std::pair<std::string, ImplicitGraph>> starts = {
      {"limit:0", ImplicitGraph::limit(0)},
      {"orbit:(01)^w", ImplicitGraph::orbit(BoundaryWord("", "01"))}};
  std::vector<std::pair<std::string, MarkedGraph>> targets = {
      {"orbit:(0)^w r2", ImplicitGraph::orbit(BoundaryWord("", "0")).ball(2)},
      {"limit:2 r2", ImplicitGraph::limit(2).ball(2)}};
  MinimalityReport rep = minimality_report(starts, targets, 2, 4000);
  REQUIRE(rep.entries.size() == 4);
  CHECK(rep.all_found());
  CHECK(rep.table().find("witness") != std::string::npos);
}

TEST_CASE("subgroup distances through the element enumeration") {
  MembershipOracle st = stabilizer_oracle(xi0());
  MembershipOracle sto = neighborhood_stabilizer_oracle(xi0());

  DyadicDistance same = subgroup_distance(st, st, 5);
  CHECK(same.is_bound());

  // enumeration: e, a, b, ... and b is the first element of St \ St-circle
  DyadicDistance d = subgroup_distance(st, sto, 5);
  CHECK(d == DyadicDistance::Exact(3));

  // conjugation matches the stabilizer of the moved point
  GroupElement g = GroupElement::parse("abac");
  BoundaryWord xi("", "011");
  MembershipOracle conj = stabilizer_conjugation(g, stabilizer_oracle(xi));
  MembershipOracle moved = stabilizer_oracle(act_beta(g, xi));
  CHECK(subgroup_distance(conj, moved, 6).is_bound());
}

TEST_CASE("stabilizer conjugation composes and inverts") {
  GroupElement g = GroupElement::parse("adac");
  MembershipOracle st = stabilizer_oracle(BoundaryWord("", "01"));
  MembershipOracle there = stabilizer_conjugation(g, st);
  MembershipOracle back = stabilizer_conjugation(g.inverse(), there);
  for (const GroupElement& x : enumerate_elements(5)) CHECK(back(x) == st(x));

  MembershipOracle id_conj = stabilizer_conjugation(GroupElement(), st);
  for (const GroupElement& x : enumerate_elements(4)) CHECK(id_conj(x) == st(x));
}

TEST_CASE("experiment configs parse key=value lines") {
  std::istringstream in("z_list = 3,4,5\nradius_budget=16  # comment\n# full line comment\n\njobs=2\n");
  auto cfg = parse_config(in);
  CHECK(cfg.at("z_list") == "3,4,5");
  CHECK(cfg.at("radius_budget") == "16");
  CHECK(cfg.at("jobs") == "2");
  CHECK(cfg.size() == 3);
}
