#pragma once

// Command-line surface. Every subcommand wraps one library operation or
// experiment; outputs are deterministic given the flags.
//
// Graph addresses: orbit:<xi>, limit:<0|1|2>, cover, coset:<oracle>,
// file:<path.json>. Subgroup oracles: stab:<xi>, stabo:<xi>, full.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grig/boundary.hpp"
#include "grig/dynamics.hpp"
#include "grig/graph_io.hpp"
#include "grig/graph_space.hpp"
#include "grig/group.hpp"
#include "grig/marked_graph.hpp"

namespace grig::cli {

namespace detail {

inline MembershipOracle parse_oracle(const std::string& name) {
  if (name == "full") return whole_group_oracle();
  if (name.rfind("stab:", 0) == 0) return stabilizer_oracle(BoundaryWord::parse(name.substr(5)));
  if (name.rfind("stabo:", 0) == 0)
    return neighborhood_stabilizer_oracle(BoundaryWord::parse(name.substr(6)));
  throw std::invalid_argument("unknown oracle '" + name + "' (stab:<xi>, stabo:<xi>, full)");
}

class CosetSource final : public BallSource {
 public:
  CosetSource(MembershipOracle oracle, std::size_t cap) : oracle_(std::move(oracle)), cap_(cap) {}
  MarkedGraph ball(int radius) const override { return coset_graph_ball(oracle_, radius, cap_); }

 private:
  MembershipOracle oracle_;
  std::size_t cap_;
};

struct Source {
  std::unique_ptr<BallSource> ball_source;
  std::shared_ptr<ImplicitGraph> implicit;  // set when the address is implicit
  std::optional<MarkedGraph> finite;        // set when the address is a file

  MarkedGraph ball(int radius, bool symmetric) const {
    if (symmetric && implicit) return implicit->symmetric_ball(radius);
    return ball_source->ball(radius);
  }
};

inline Source parse_source(const std::string& addr, std::size_t coset_cap) {
  Source s;
  if (addr.rfind("orbit:", 0) == 0) {
    s.implicit =
        std::make_shared<ImplicitGraph>(ImplicitGraph::orbit(BoundaryWord::parse(addr.substr(6))));
    s.ball_source = std::make_unique<ImplicitGraph>(*s.implicit);
  } else if (addr.rfind("limit:", 0) == 0) {
    s.implicit = std::make_shared<ImplicitGraph>(ImplicitGraph::limit(std::stoi(addr.substr(6))));
    s.ball_source = std::make_unique<ImplicitGraph>(*s.implicit);
  } else if (addr == "cover") {
    s.implicit = std::make_shared<ImplicitGraph>(ImplicitGraph::cover());
    s.ball_source = std::make_unique<ImplicitGraph>(*s.implicit);
  } else if (addr.rfind("coset:", 0) == 0) {
    s.ball_source = std::make_unique<CosetSource>(parse_oracle(addr.substr(6)), coset_cap);
  } else if (addr.rfind("file:", 0) == 0) {
    s.finite = load_json_file(addr.substr(5));
    s.ball_source = std::make_unique<FiniteSource>(*s.finite);
  } else {
    throw std::invalid_argument("unknown graph address '" + addr +
                                "' (orbit:<xi>, limit:<i>, cover, coset:<oracle>, file:<path>)");
  }
  return s;
}

inline std::unordered_set<VertexId> shell_vertices(const MarkedGraph& ball, int radius) {
  std::unordered_set<VertexId> out;
  auto dist = ball.distances_from(ball.marked());
  for (VertexId v = 0; v < ball.vertex_count(); ++v)
    if (dist[v] >= radius) out.insert(v);
  return out;
}

inline void emit(std::ostream& out, const std::string& text, const std::string& to_file) {
  if (to_file.empty()) {
    out << text;
    return;
  }
  std::ofstream f(to_file);
  if (!f) throw std::runtime_error("cannot write " + to_file);
  f << text;
}

inline std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grigorchuk group engine: words, boundary dynamics, Schreier graphs"};
  app.name("grig");
  app.require_subcommand(1);
  int rc = 0;

  // ------------------------------------------------------------------ words
  struct {
    std::string g, w, u, xi;
    std::uint64_t cap = 1u << 16;
  } wa;

  auto* c_reduce = app.add_subcommand("reduce", "canonical reduced form of a word");
  c_reduce->add_option("--g", wa.g, "word over a,b,c,d")->required();
  c_reduce->callback([&] { out << GroupElement::parse(wa.g).str() << "\n"; });

  auto* c_apply = app.add_subcommand("apply", "action of a word on a finite binary word");
  c_apply->add_option("--g", wa.g)->required();
  c_apply->add_option("--w", wa.w, "binary word")->required();
  c_apply->callback([&] { out << apply_word(GroupElement::parse(wa.g), wa.w) << "\n"; });

  auto* c_section = app.add_subcommand("section", "section g|_u at a finite binary word");
  c_section->add_option("--g", wa.g)->required();
  c_section->add_option("--u", wa.u, "binary word")->required();
  c_section->callback([&] { out << section(GroupElement::parse(wa.g), wa.u).str() << "\n"; });

  auto* c_trivial = app.add_subcommand("trivial", "word-problem decision");
  c_trivial->add_option("--g", wa.g)->required();
  c_trivial->callback(
      [&] { out << (is_trivial(GroupElement::parse(wa.g)) ? "true" : "false") << "\n"; });

  auto* c_order = app.add_subcommand("order", "order of the element");
  c_order->add_option("--g", wa.g)->required();
  c_order->add_option("--cap", wa.cap, "largest order searched");
  c_order->callback([&] { out << element_order(GroupElement::parse(wa.g), wa.cap) << "\n"; });

  auto* c_beta = app.add_subcommand("act-beta", "action on an eventually periodic boundary point");
  c_beta->add_option("--g", wa.g)->required();
  c_beta->add_option("--xi", wa.xi, "point in PRE(PER)^w notation")->required();
  c_beta->callback(
      [&] { out << act_beta(GroupElement::parse(wa.g), BoundaryWord::parse(wa.xi)).str() << "\n"; });

  auto* c_stab = app.add_subcommand("stab", "stabilizer membership");
  c_stab->add_option("--g", wa.g)->required();
  c_stab->add_option("--xi", wa.xi)->required();
  c_stab->callback([&] {
    out << (in_stabilizer(GroupElement::parse(wa.g), BoundaryWord::parse(wa.xi)) ? "true"
                                                                                 : "false")
        << "\n";
  });

  auto* c_stabo = app.add_subcommand("stab-o", "neighborhood-stabilizer membership");
  c_stabo->add_option("--g", wa.g)->required();
  c_stabo->add_option("--xi", wa.xi)->required();
  c_stabo->callback([&] {
    out << (in_neighborhood_stabilizer(GroupElement::parse(wa.g), BoundaryWord::parse(wa.xi))
                ? "true"
                : "false")
        << "\n";
  });

  auto* c_klein = app.add_subcommand("klein-coset", "Klein coset inside the stabilizer of 1^w");
  c_klein->add_option("--g", wa.g)->required();
  c_klein->callback([&] {
    auto h = klein_coset(GroupElement::parse(wa.g));
    out << (h ? h->str() : "not-in-stabilizer") << "\n";
  });

  // ----------------------------------------------------------------- graphs
  struct {
    std::string graph, g1, g2, partition_file, output;
    int radius = 4;
    int max_radius = 8;
    int relator_cap = 12;
    std::size_t coset_cap = 256;
    std::size_t expect_k = 0;
    int auto_index = -1;
    bool symmetric = false;
    bool unmarked = false;
    bool strict = false;
    bool dot = false;
    bool autos_orbits = false;
  } ga;

  auto add_graph_opt = [&](CLI::App* sc, std::string& target, const char* name) {
    sc->add_option(name, target,
                   "graph address: orbit:<xi> | limit:<i> | cover | coset:<oracle> | file:<path>")
        ->required();
  };

  auto* c_ball = app.add_subcommand("ball", "closed ball as JSON (or DOT)");
  add_graph_opt(c_ball, ga.graph, "--graph");
  c_ball->add_option("--radius", ga.radius)->required();
  c_ball->add_flag("--symmetric", ga.symmetric, "ball around the special fiber");
  c_ball->add_flag("--dot", ga.dot, "emit DOT instead of JSON");
  c_ball->add_option("--coset-cap", ga.coset_cap);
  c_ball->add_option("-o,--output", ga.output, "write to file instead of stdout");
  c_ball->callback([&] {
    MarkedGraph b = detail::parse_source(ga.graph, ga.coset_cap).ball(ga.radius, ga.symmetric);
    detail::emit(out, ga.dot ? to_dot(b) : to_json_string(b) + "\n", ga.output);
  });

  auto* c_delta = app.add_subcommand("delta", "dyadic distance between two graphs");
  add_graph_opt(c_delta, ga.g1, "--g1");
  add_graph_opt(c_delta, ga.g2, "--g2");
  c_delta->add_option("--max-radius", ga.max_radius)->required();
  c_delta->add_option("--coset-cap", ga.coset_cap);
  c_delta->callback([&] {
    auto s1 = detail::parse_source(ga.g1, ga.coset_cap);
    auto s2 = detail::parse_source(ga.g2, ga.coset_cap);
    out << delta(*s1.ball_source, *s2.ball_source, ga.max_radius).str() << "\n";
  });

  auto* c_verify = app.add_subcommand("verify", "Schreier-condition verification");
  add_graph_opt(c_verify, ga.graph, "--graph");
  c_verify->add_option("--radius", ga.radius, "ball radius for implicit graphs");
  c_verify->add_option("--cap", ga.relator_cap, "relator length cap");
  c_verify->add_flag("--strict", ga.strict, "no boundary exemption for truncated balls");
  c_verify->callback([&] {
    auto src = detail::parse_source(ga.graph, ga.coset_cap);
    MarkedGraph g = src.finite ? *src.finite : src.ball(ga.radius, false);
    std::unordered_set<VertexId> exempt;
    if (!src.finite && !ga.strict) exempt = detail::shell_vertices(g, ga.radius);
    SchreierVerdict v = verify_schreier(g, ga.relator_cap, exempt);
    out << v.describe() << "\n";
    if (!v.pass) rc = 1;
  });

  auto* c_autos = app.add_subcommand("autos", "automorphisms of a ball");
  add_graph_opt(c_autos, ga.graph, "--graph");
  c_autos->add_option("--radius", ga.radius);
  c_autos->add_flag("--symmetric", ga.symmetric);
  c_autos->add_flag("--unmarked", ga.unmarked);
  c_autos->callback([&] {
    auto src = detail::parse_source(ga.graph, ga.coset_cap);
    MarkedGraph g = src.finite ? *src.finite : src.ball(ga.radius, ga.symmetric);
    auto autos = automorphism_group(g, ga.unmarked);
    out << autos.size() << " automorphism" << (autos.size() == 1 ? "" : "s") << "\n";
    for (const auto& p : autos) out << g.marked_name() << " -> " << g.name(p[g.marked()]) << "\n";
  });

  auto* c_quotient = app.add_subcommand("quotient", "quotient of a ball along a partition");
  add_graph_opt(c_quotient, ga.graph, "--graph");
  c_quotient->add_option("--radius", ga.radius);
  c_quotient->add_flag("--symmetric", ga.symmetric);
  auto* opt_part = c_quotient->add_option("--partition", ga.partition_file,
                                          "JSON file: array of arrays of vertex ids");
  auto* opt_orbits =
      c_quotient->add_flag("--autos-orbits", ga.autos_orbits, "orbits of all unmarked automorphisms");
  auto* opt_auto = c_quotient->add_option(
      "--auto", ga.auto_index, "orbits of the i-th unmarked automorphism (sorted by mark image)");
  opt_part->excludes(opt_orbits);
  opt_part->excludes(opt_auto);
  c_quotient->add_option("--expect-k", ga.expect_k, "verify the quotient is k-to-1");
  c_quotient->add_option("-o,--output", ga.output);
  c_quotient->callback([&] {
    auto src = detail::parse_source(ga.graph, ga.coset_cap);
    MarkedGraph g = src.finite ? *src.finite : src.ball(ga.radius, ga.symmetric);
    std::vector<std::vector<VertexId>> part;
    if (!ga.partition_file.empty()) {
      std::ifstream in(ga.partition_file);
      if (!in) throw std::runtime_error("cannot open " + ga.partition_file);
      nlohmann::json j;
      in >> j;
      for (const auto& cls : j) {
        std::vector<VertexId> members;
        for (const auto& name : cls) {
          auto v = g.find(name.get<std::string>());
          if (!v) throw std::invalid_argument("partition names unknown vertex");
          members.push_back(*v);
        }
        part.push_back(std::move(members));
      }
    } else {
      auto autos = automorphism_group(g, true);
      std::sort(autos.begin(), autos.end(),
                [&](const auto& x, const auto& y) {
                  return g.name(x[g.marked()]) < g.name(y[g.marked()]);
                });
      if (ga.auto_index >= 0) {
        if (static_cast<std::size_t>(ga.auto_index) >= autos.size())
          throw std::invalid_argument("automorphism index out of range");
        part = orbit_partition(g.vertex_count(), {autos[static_cast<std::size_t>(ga.auto_index)]});
      } else if (ga.autos_orbits) {
        part = orbit_partition(g.vertex_count(), autos);
      } else {
        throw CLI::ValidationError("quotient",
                                   "one of --partition, --autos-orbits, --auto is required");
      }
    }
    QuotientResult q = quotient(g, part);
    if (ga.expect_k > 0 && !q.k_fold_check(ga.expect_k)) {
      err << "quotient is not " << ga.expect_k << "-to-1\n";
      rc = 1;
      return;
    }
    detail::emit(out, to_json_string(q.graph) + "\n", ga.output);
  });

  struct {
    int index = 0;
    int radius = 4;
    bool symmetric = false;
    std::string output;
  } la;
  auto* c_limit = app.add_subcommand("limit", "ball of the marked limit graph Delta*_i");
  c_limit->add_option("--i", la.index, "0, 1 or 2")->required();
  c_limit->add_option("--radius", la.radius)->required();
  c_limit->add_flag("--symmetric", la.symmetric);
  c_limit->add_option("-o,--output", la.output);
  c_limit->callback([&] {
    ImplicitGraph g = ImplicitGraph::limit(la.index);
    MarkedGraph b = la.symmetric ? g.symmetric_ball(la.radius) : g.ball(la.radius);
    detail::emit(out, to_json_string(b) + "\n", la.output);
  });

  auto* c_cover = app.add_subcommand("cover", "ball of the 4-sheeted Klein cover Delta");
  c_cover->add_option("--radius", la.radius)->required();
  c_cover->add_flag("--symmetric", la.symmetric);
  c_cover->add_option("-o,--output", la.output);
  c_cover->callback([&] {
    ImplicitGraph g = ImplicitGraph::cover();
    MarkedGraph b = la.symmetric ? g.symmetric_ball(la.radius) : g.ball(la.radius);
    detail::emit(out, to_json_string(b) + "\n", la.output);
  });

  struct {
    std::string oracle;
    int radius = 4;
    std::size_t cap = 256;
    std::string output;
  } ca;
  auto* c_coset = app.add_subcommand("coset-ball", "ball of a Schreier coset graph");
  c_coset->add_option("--oracle", ca.oracle, "stab:<xi> | stabo:<xi> | full")->required();
  c_coset->add_option("--radius", ca.radius)->required();
  c_coset->add_option("--cap", ca.cap, "element length cap for coset comparisons");
  c_coset->add_option("-o,--output", ca.output);
  c_coset->callback([&] {
    MarkedGraph b = coset_graph_ball(detail::parse_oracle(ca.oracle), ca.radius, ca.cap);
    detail::emit(out, to_json_string(b) + "\n", ca.output);
  });

  auto* c_export = app.add_subcommand("export-dot", "DOT rendering of a ball");
  add_graph_opt(c_export, ga.g1, "--graph");
  c_export->add_option("--radius", ga.radius);
  c_export->add_flag("--symmetric", ga.symmetric);
  c_export->add_option("-o,--output", ga.output);
  c_export->callback([&] {
    auto src = detail::parse_source(ga.g1, ga.coset_cap);
    MarkedGraph g = src.finite ? *src.finite : src.ball(ga.radius, ga.symmetric);
    detail::emit(out, to_dot(g), ga.output);
  });

  // ------------------------------------------------------------ experiments
  struct {
    std::string z_csv = "3,4,5,6,7";
    std::string config, json_out, start, target, xi, cylinder, h1, h2;
    int radius_budget = 64;
    int jobs = 1;
    int radius = 4;
    int target_radius = 2;
    std::size_t budget = 10000;
    int max_len = 10;
    int enum_cap = 6;
    std::size_t coset_cap = 256;
  } ea;

  auto* c_conv = app.add_subcommand("converge", "convergence of F(eta_z) to the limit graphs");
  c_conv->add_option("--z", ea.z_csv, "comma-separated z values (z >= 3)");
  c_conv->add_option("--radius-budget", ea.radius_budget);
  c_conv->add_option("--jobs", ea.jobs, "parallel workers");
  c_conv->add_option("--config", ea.config, "key=value file: z, radius_budget, jobs");
  c_conv->add_option("--json-out", ea.json_out, "write the report as JSON");
  c_conv->callback([&] {
    if (!ea.config.empty()) {
      std::ifstream in(ea.config);
      if (!in) throw std::runtime_error("cannot open " + ea.config);
      auto cfg = parse_config(in);
      if (cfg.contains("z")) ea.z_csv = cfg.at("z");
      if (cfg.contains("radius_budget")) ea.radius_budget = std::stoi(cfg.at("radius_budget"));
      if (cfg.contains("jobs")) ea.jobs = std::stoi(cfg.at("jobs"));
    }
    ConvergenceReport rep =
        convergence_experiment(detail::parse_int_list(ea.z_csv), ea.radius_budget, ea.jobs);
    out << rep.table();
    if (!ea.json_out.empty()) detail::emit(out, rep.to_json().dump(2) + "\n", ea.json_out);
  });

  auto* c_isolated = app.add_subcommand("isolated", "triple-loop isolation check");
  c_isolated->add_option("--radius", ea.radius);
  c_isolated->callback([&] {
    IsolatedPointReport rep = isolated_point_check(ea.radius);
    for (const auto& [desc, v] : rep.occurrences)
      out << "triple loop at " << v << " in " << desc << "\n";
    out << (rep.pass ? "pass" : "fail") << "\n";
    if (!rep.pass) rc = 1;
  });

  auto* c_min = app.add_subcommand("minimality", "search the re-marking action for a target ball");
  add_graph_opt(c_min, ea.start, "--start");
  add_graph_opt(c_min, ea.target, "--target");
  c_min->add_option("--target-radius", ea.target_radius)->required();
  c_min->add_option("--budget", ea.budget, "maximum vertices explored");
  c_min->add_option("--coset-cap", ea.coset_cap);
  c_min->callback([&] {
    auto start = detail::parse_source(ea.start, ea.coset_cap);
    if (!start.implicit) throw std::invalid_argument("--start must be an implicit graph address");
    MarkedGraph target = detail::parse_source(ea.target, ea.coset_cap).ball(ea.target_radius, false);
    MinimalityResult r = minimality_probe(*start.implicit, target, ea.target_radius, ea.budget);
    if (r.found)
      out << "witness " << r.witness.str() << " after exploring " << r.explored << " marks\n";
    else
      out << "exhausted after exploring " << r.explored << " marks\n";
  });

  auto* c_ergodic = app.add_subcommand("ergodic", "cylinder frequency over an orbit ball");
  c_ergodic->add_option("--xi", ea.xi)->required();
  c_ergodic->add_option("--w", ea.cylinder, "binary cylinder (may be empty)");
  c_ergodic->add_option("--max-len", ea.max_len);
  c_ergodic->callback([&] {
    ErgodicAverage avg = ergodic_average(BoundaryWord::parse(ea.xi), ea.cylinder, ea.max_len);
    out << "cylinder '" << avg.cylinder << "' frequency " << avg.frequency << " expected "
        << avg.expected << " over " << avg.points << " points\n";
  });

  auto* c_subdist = app.add_subcommand("subdist", "metric on subgroups via membership oracles");
  c_subdist->add_option("--h1", ea.h1, "stab:<xi> | stabo:<xi> | full")->required();
  c_subdist->add_option("--h2", ea.h2)->required();
  c_subdist->add_option("--enum-cap", ea.enum_cap, "max reduced length enumerated");
  c_subdist->callback([&] {
    out << subgroup_distance(detail::parse_oracle(ea.h1), detail::parse_oracle(ea.h2), ea.enum_cap)
               .str()
        << "\n";
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help and friends
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

}  // namespace grig::cli
