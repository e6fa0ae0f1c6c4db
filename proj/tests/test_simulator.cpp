#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chainroute/scenario.hpp"
#include "chainroute/simulator.hpp"

using namespace chainroute;

namespace {

Scenario scenario(const std::string& name) {
  return load_scenario(std::string(CHAINROUTE_DATA_DIR) + "/scenarios/" + name + ".scn");
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(CHAINROUTE_DATA_DIR) + "/golden/" + name + ".trace", std::ios::binary);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<TraceRecord> records(const SimResult& r, const std::string& kind) {
  std::vector<TraceRecord> out;
  std::copy_if(r.trace.begin(), r.trace.end(), std::back_inserter(out),
               [&](const TraceRecord& t) { return t.kind == kind; });
  return out;
}

bool has(const SimResult& r, unsigned tick, const std::string& actor, const std::string& kind,
         const std::string& detail) {
  return std::find(r.trace.begin(), r.trace.end(), TraceRecord{tick, actor, kind, detail}) != r.trace.end();
}

}  // namespace

TEST_CASE("traces match the checked-in goldens byte for byte") {
  for (const char* name : {"varadhan-baseline", "varadhan-chain", "griffin-baseline", "griffin-chain",
                           "temporal-fig6", "temporal-fig6-nots"}) {
    CAPTURE(name);
    const Scenario s = scenario(name);
    const std::string first = render_trace(s, run(s));
    CHECK(first == golden(name));
    CHECK(render_trace(s, run(s)) == first);
  }
}

TEST_CASE("varadhan baseline oscillates forever") {
  const Scenario s = scenario("varadhan-baseline");
  const SimResult r = run(s);
  CHECK(r.outcome == Outcome::oscillation);
  CHECK(r.period == 2);
  CHECK(r.tick <= 50);
  CHECK_FALSE(r.loop_ticks.empty());

  const SimResult long_run = run(s, {10000, false});
  CHECK(long_run.outcome == Outcome::exhausted);
  CHECK(long_run.tick + 1 == 10000);  // ticks 0..9999
}

TEST_CASE("varadhan chain mode vetoes the third chain and converges") {
  const SimResult r = run(scenario("varadhan-chain"));
  CHECK(r.outcome == Outcome::converged);
  CHECK(r.tick <= 20);
  CHECK(has(r, 8, "b", "chain_rejected", "C(b,c,d)@0 by c cycle a>b>c"));
  CHECK(r.chains_rejected == 1);
  CHECK(r.chains_established == 3);
  CHECK(r.loop_ticks.empty());
  CHECK(r.final_routes.at(0) == "C(a,b,d)@0 a-d a-b-d");
}

TEST_CASE("griffin chain mode fails over to the Varc through a") {
  const Scenario s = scenario("griffin-chain");
  const SimResult r = run(s);
  CHECK(r.outcome == Outcome::converged);
  CHECK(r.loop_ticks.empty());
  CHECK(records(r, "loop_detected").empty());
  CHECK(has(r, 21, "c", "route_selected", "C(c,f,b,d)@0 c-a-d"));
  CHECK(has(r, 21, "e", "route_selected", "C(e,c,b,d)@0 e-a-d"));
  CHECK(has(r, 21, "f", "route_selected", "C(f,b,d)@0 f-a-d"));
  // Before the failure each node spreads over its whole chain.
  CHECK(has(r, 2, "c", "route_selected", "C(c,f,b,d)@0 c-a-d c-f-a-d c-b-d"));

  const SimResult base = run(scenario("griffin-baseline"));
  CHECK(base.outcome == Outcome::oscillation);
  CHECK_FALSE(base.loop_ticks.empty());
}

TEST_CASE("timestamps discard the stale report") {
  const SimResult on = run(scenario("temporal-fig6"));
  const Vertex d = 3;
  CHECK(on.stale_ignored == 1);
  CHECK(on.views.at(d).at("node:a").up);
  CHECK(has(on, 4, "d", "ignored_stale", "a down t=0 from c (holding up t=2)"));

  const SimResult off = run(scenario("temporal-fig6-nots"));
  CHECK(off.stale_ignored == 0);
  std::size_t changes = 0;
  for (const TraceRecord& t : off.trace)
    if (t.actor == "d" && t.kind == "view_change" && t.detail.rfind("a ", 0) == 0) ++changes;
  CHECK(changes >= 3);
}

TEST_CASE("zero tick budget exhausts") {
  const SimResult r = run(scenario("varadhan-chain"), {0, true});
  CHECK(r.outcome == Outcome::exhausted);
}

TEST_CASE("timestamped view updates") {
  View v;
  CHECK(apply_timestamped_view(v, {"node:a", false, 0, 1}, true) == ViewUpdate::view_change);
  CHECK(apply_timestamped_view(v, {"node:a", false, 0, 2}, true) == ViewUpdate::duplicate);
  CHECK(apply_timestamped_view(v, {"node:a", true, 2, 1}, true) == ViewUpdate::view_change);
  CHECK(apply_timestamped_view(v, {"node:a", false, 0, 2}, true) == ViewUpdate::ignored_stale);
  CHECK(v.at("node:a").up);
  CHECK(apply_timestamped_view(v, {"node:a", false, 2, 3}, true) == ViewUpdate::tie_kept);
  CHECK(apply_timestamped_view(v, {"node:a", false, 2, 0}, true) == ViewUpdate::view_change);

  View plain;
  CHECK(apply_timestamped_view(plain, {"link:a-b", false, 5, 0}, false) == ViewUpdate::view_change);
  CHECK(apply_timestamped_view(plain, {"link:a-b", true, 1, 0}, false) == ViewUpdate::view_change);
  CHECK(apply_timestamped_view(plain, {"link:a-b", true, 0, 0}, false) == ViewUpdate::unchanged);
}

TEST_CASE("baseline selection walks the preference list") {
  const Scenario s = parse_scenario_text(
      "[graph]\n3\nx y d\n0 1 1\n1 0 1\n0 0 0\n[destination] d\n"
      "[preferences]\nx: x-y-d > x-d\n");
  const auto& prefs = s.preferences.at(0);
  std::map<Vertex, Path> rib{{2, {2}}, {1, {1, 2}}};
  auto all = [](Vertex) { return true; };
  CHECK(baseline_select(0, prefs, rib, all) == Path{0, 1, 2});
  CHECK(baseline_select(0, prefs, rib, [](Vertex v) { return v != 1; }) == Path{0, 2});
  rib[1] = {1, 0, 2};
  CHECK(baseline_select(0, prefs, rib, all) == Path{0, 2});
  CHECK_FALSE(baseline_select(0, prefs, {}, all).has_value());

  // A wildcard skips announcements that already contain the node.
  const std::vector<RoutePref> wild{RoutePref{true, {}, 1}};
  CHECK_FALSE(baseline_select(0, wild, {{1, {1, 0, 2}}}, all).has_value());
  CHECK(baseline_select(0, wild, {{1, {1, 2}}}, all) == Path{0, 1, 2});
}

TEST_CASE("loop detection on forwarding digraphs") {
  Digraph f(numbered_labels(4));
  f.add_arc(0, 1);
  f.add_arc(1, 3);
  CHECK(detect_loop(f).empty());
  f.add_arc(3, 0);
  CHECK(detect_loop(f).size() == 3);
}
