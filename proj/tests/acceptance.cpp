// Acceptance checks. Prints one line per criterion and exits nonzero if any
// criterion fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "chainroute/chain.hpp"
#include "chainroute/commands.hpp"
#include "chainroute/discovery.hpp"
#include "chainroute/laws.hpp"
#include "chainroute/rules.hpp"
#include "chainroute/scenario.hpp"
#include "chainroute/simulator.hpp"
#include "worked_example.hpp"
#include "oracles.hpp"

using namespace chainroute;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kData = CHAINROUTE_DATA_DIR;

// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Scenario scenario(const std::string& name) { return load_scenario(kData + "/scenarios/" + name + ".scn"); }

bool has(const SimResult& r, unsigned tick, const std::string& actor, const std::string& kind,
         const std::string& detail) {
  return std::find(r.trace.begin(), r.trace.end(), TraceRecord{tick, actor, kind, detail}) != r.trace.end();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "chainroute");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void counting_laws(Check& c) {
  const auto start = Clock::now();
  for (std::size_t n = 2; n <= 7; ++n) {
    const Digraph d = make_complete_order(numbered_labels(n));
    const auto [t, r] = transmitter_receiver(d);
    const std::string at = " at n=" + std::to_string(n);
    const std::size_t flow = max_arc_disjoint_count(d, t, r);
    c.expect(flow == n - 1, "disjoint paths" + at);
    c.expect(flow == oracle::min_cut(oracle::matrix_of(d), t, r), "min-cut oracle disagrees" + at);
    const MinCostFlow m = min_arc_disjoint_system(d, t, r);
    c.expect(m.arcs == 2 * n - 3, "u" + at);
    c.expect(d.arc_count() - m.arcs == (n - 2) * (n >= 3 ? n - 3 : 0) / 2, "r" + at);
  }
  const ChainMetrics three = chain_metrics(3), eight = chain_metrics(8);
  c.expect(three.used == 3 && three.unused == 0, "n=3 spot values");
  c.expect(eight.used == 13 && eight.unused == 15, "n=8 spot values");
  const LawReport report = verify_laws(7);
  c.expect(report.all_pass(), "verify_laws");
  c.expect(seconds_since(start) < 1.0, "runtime over 1 s");
}

void deletion_closure(Check& c) {
  std::size_t cases = 0, good = 0;
  for (std::size_t n = 3; n <= 7; ++n) {
    const Digraph d = make_complete_order(numbered_labels(n));
    for (Vertex v = 0; v < n; ++v) {
      ++cases;
      const Digraph g = delete_vertex(d, v);
      if (is_complete_order(g) && oracle::complete_order(oracle::matrix_of(g))) ++good;
    }
  }
  c.expect(cases == 25, "expected 25 deletion cases, ran " + std::to_string(cases));
  c.expect(good == cases, std::to_string(cases - good) + " deletions broke the order");
}

void growth(Check& c) {
  for (std::size_t k = 2; k <= 7; ++k) {
    std::vector<Vertex> order(k);
    std::iota(order.begin(), order.end(), 0);
    const Chain chain(order);
    const Vertex fresh = static_cast<Vertex>(k);
    for (std::size_t pos = 0; pos <= k; ++pos) {
      std::set<Arc> all;
      for (std::size_t i = 0; i < k; ++i) all.insert(i < pos ? Arc{order[i], fresh} : Arc{fresh, order[i]});
      const GrowResult g = grow(chain, fresh, pos, all);
      const std::string at = " k=" + std::to_string(k) + " pos=" + std::to_string(pos);
      if (k <= 6) {
        c.expect(g && g.required.size() == k, "grow" + at);
      } else {
        c.expect(!g && g.size_cap, "size cap not enforced" + at);
      }
    }
  }
}

void varadhan(Check& c) {
  const auto start = Clock::now();
  const Scenario base = scenario("varadhan-baseline");
  const SimResult osc = run(base);
  c.expect(osc.outcome == Outcome::oscillation && osc.tick <= 50, "baseline oscillation within 50 ticks");
  c.expect(cli({"simulate", kData + "/scenarios/varadhan-baseline.scn"}).code == kExitOscillation, "exit 3");
  const SimResult endless = run(base, {10000, false});
  c.expect(endless.outcome == Outcome::exhausted, "baseline converged within 10000 ticks");

  const SimResult chain = run(scenario("varadhan-chain"));
  c.expect(has(chain, 8, "b", "chain_rejected", "C(b,c,d)@0 by c cycle a>b>c"), "C_b rejection with cycle evidence");
  c.expect(chain.outcome == Outcome::converged && chain.tick <= 20, "chain mode converges within 20 ticks");
  c.expect(cli({"simulate", kData + "/scenarios/varadhan-chain.scn"}).code == kExitOk, "exit 0");
  c.expect(seconds_since(start) < 1.0, "runtime over 1 s");
}

void griffin(Check& c) {
  const Scenario s = scenario("griffin-chain");
  const SimResult r = run(s);
  c.expect(has(r, 20, "-", "event", "fail_link b d"), "failure event at t=20");
  c.expect(has(r, 21, "c", "route_selected", "C(c,f,b,d)@0 c-a-d"), "c selects c-a-d at t=21");
  c.expect(has(r, 21, "e", "route_selected", "C(e,c,b,d)@0 e-a-d"), "e selects e-a-d at t=21");
  c.expect(has(r, 21, "f", "route_selected", "C(f,b,d)@0 f-a-d"), "f selects f-a-d at t=21");
  c.expect(r.loop_ticks.empty(), "loop in chain mode");
  c.expect(render_trace(s, r) == slurp(kData + "/golden/griffin-chain.trace"), "chain golden mismatch");

  const Scenario b = scenario("griffin-baseline");
  const SimResult base = run(b);
  c.expect(base.outcome == Outcome::oscillation, "baseline does not oscillate");
  c.expect(render_trace(b, base) == slurp(kData + "/golden/griffin-baseline.trace"), "baseline golden mismatch");
}

void message_cost(Check& c) {
  for (std::size_t n = 3; n <= 7; ++n) {
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Chain chain(order);
    std::map<Arc, Path> routes;
    for (const Arc& seg : chain.segments()) routes[seg] = {seg.tail, seg.head};
    std::map<Vertex, Responder> responders;
    for (Vertex v : order) responders[v] = accept_all();
    const EstablishmentOutcome out = establish_chain({0, make_plan(chain, routes)}, responders);
    const std::size_t expected = 3 * (n - 2);
    c.expect(out.status == EstablishStatus::established && out.messages_sent == expected,
             "n=" + std::to_string(n) + " sent " + std::to_string(out.messages_sent) + ", want " +
                 std::to_string(expected));
  }
}

void temporal(Check& c) {
  const Scenario on = scenario("temporal-fig6");
  const SimResult r = run(on);
  const Vertex d = on.graph.index_of("d");
  c.expect(r.views.at(d).at("node:a").up, "d's final view of a is not up");
  c.expect(r.stale_ignored == 1, "stale count " + std::to_string(r.stale_ignored));
  c.expect(render_trace(on, r) == slurp(kData + "/golden/temporal-fig6.trace"), "golden mismatch (on)");

  const Scenario off = scenario("temporal-fig6-nots");
  const SimResult o = run(off);
  std::size_t changes = 0;
  for (const TraceRecord& t : o.trace)
    if (t.actor == "d" && t.kind == "view_change" && t.detail.rfind("a ", 0) == 0) ++changes;
  c.expect(changes >= 3, "only " + std::to_string(changes) + " view changes without timestamps");
  c.expect(render_trace(off, o) == slurp(kData + "/golden/temporal-fig6-nots.trace"), "golden mismatch (off)");
}

void discovery_consistency(Check& c) {
  const auto start = Clock::now();
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_real_distribution<double> density(0.15, 0.65);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = size(rng);
    const Digraph d = oracle::random_dag(rng, n, density(rng));
    const oracle::Matrix m = oracle::matrix_of(d);
    const Vertex origin = static_cast<Vertex>(round % n);
    const std::string at = " (graph " + std::to_string(round) + ")";
    const BfsOutcome bfs = modified_bfs(d, origin);
    const ChainStore store = post_combine(bfs.store, d);
    c.expect(oracle::acyclic(oracle::matrix_of(store.relation())), "relation cycle" + at);
    const oracle::Matrix cl = oracle::closure(m);
    for (const Structure* s : store.at_level(0)) {
      if (s->kind != StructureKind::chain) continue;
      const Digraph induced = induced_subgraph(transitive_closure(d), s->vertices);
      c.expect(is_complete_order(induced), "chain " + s->id + " is not a complete order" + at);
      for (std::size_t i = 0; i + 1 < s->vertices.size(); ++i)
        c.expect(cl[s->vertices[i]][s->vertices[i + 1]], "chain " + s->id + " order unreachable" + at);
    }
    for (Vertex t = 0; t < n; ++t) {
      if (t == origin) continue;
      const ReachabilityClass cls = classify_destination(store, d, origin, t);
      if (cls.kind == ClassKind::chain)
        c.expect(cls.height <= oracle::min_cut(m, origin, t), "height above oracle" + at);
    }
  }
  c.expect(seconds_since(start) < 30.0, "runtime over 30 s");
}

void worked_example(Check& c) {
  const CliRun r = cli({"analyze", kData + "/graphs/nested10.txt", "--origin", "s", "--format", "csv"});
  c.expect(r.code == kExitOk, "analyze failed");
  c.expect(r.out.find("\ns,d,chain,3,3\n") != std::string::npos, "s->d is not height 3");

  fixture::WorkedExample f;
  ChainStore store(f.g);
  const RegisterResult reg = store.register_structures(f.all);
  c.expect(reg.ok(), "fixture rejected: " + reg.message);
  if (!reg.ok()) return;
  const std::vector<std::pair<unsigned, std::set<std::string>>> levels{
      {0, {"C(s,e,b,d)@0"}},
      {1, {"A(s,e)@1", "V(s,a,b)@1", "V(s,c,d)@1", "V(e,f,b)@1", "V(e,g,d)@1", "A(b,d)@1"}},
      {2, {"A(s,a)@2", "A(a,b)@2", "A(s,c)@2", "A(c,d)@2", "A(e,f)@2", "A(f,b)@2", "C(e,h,g)@2", "A(g,d)@2"}},
      {3, {"A(e,h)@3", "V(e,f,g)@3", "C(h,i,g)@3"}},
      {4, {"A(e,f)@4", "A(f,g)@4", "A(h,i)@4", "A(i,g)@4", "A(h,g)@4"}},
  };
  for (const auto& [level, want] : levels) {
    std::set<std::string> got;
    for (const Structure* s : store.at_level(level)) got.insert(s->id);
    c.expect(got == want, "level " + std::to_string(level) + " differs");
  }
  const Resolution res = resolve(store, "C(s,e,b,d)@0");
  std::vector<std::string> routes;
  for (const Path& p : res.routes) routes.push_back(f.g.format_path(p));
  c.expect(routes == std::vector<std::string>{"s-c-d", "s-e-f-g-d", "s-a-b-d"}, "resolved routes differ");
  c.expect(res.shared_arcs == std::vector<Arc>{{f.v("e"), f.v("f")}}, "only ef should be shared");
}

void determinism(Check& c) {
  std::vector<std::vector<std::string>> commands;
  std::vector<std::string> histogram{"histogram", "--origin-all"};
  for (const auto& e : std::filesystem::directory_iterator(kData + "/graphs")) {
    commands.push_back({"analyze", e.path().string(), "--all-pairs"});
    commands.push_back({"analyze", e.path().string(), "--all-pairs", "--format", "csv"});
    histogram.push_back(e.path().string());
  }
  for (const auto& e : std::filesystem::directory_iterator(kData + "/scenarios"))
    commands.push_back({"simulate", e.path().string()});
  commands.push_back({"verify", "--n-max", "7", "--random", "5", "--seed", "3"});
  commands.push_back(histogram);
  for (const auto& cmd : commands) {
    const CliRun a = cli(cmd), b = cli(cmd);
    c.expect(a.code == b.code && a.out == b.out && a.err == b.err, cmd[0] + " " + cmd[1] + " differs between runs");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria{
      {"counting laws n=2..7", counting_laws},
      {"vertex deletion closure", deletion_closure},
      {"growth cost and size cap", growth},
      {"Varadhan oscillation and chain veto", varadhan},
      {"Griffin failover", griffin},
      {"establishment message cost", message_cost},
      {"timestamped event ordering", temporal},
      {"discovery consistency on random DAGs", discovery_consistency},
      {"worked example decomposition", worked_example},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << criteria[i].first << '\n';
    for (const auto& f : c.failures) std::cout << "       " << f << '\n';
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
