#include <doctest.h>

#include <numeric>
#include <set>
#include <stdexcept>

#include "chainroute/chain.hpp"
#include "chainroute/errors.hpp"
#include "chainroute/laws.hpp"
#include "oracles.hpp"

using namespace chainroute;

namespace {

Chain iota_chain(std::size_t k) {
  std::vector<Vertex> o(k);
  std::iota(o.begin(), o.end(), 0);
  return Chain(o);
}

// Arcs joining a fresh vertex at `pos` to every member of `c`.
std::set<Arc> joining_arcs(const Chain& c, Vertex v, std::size_t pos) {
  std::set<Arc> s;
  for (std::size_t i = 0; i < c.size(); ++i) s.insert(i < pos ? Arc{c.order()[i], v} : Arc{v, c.order()[i]});
  return s;
}

}  // namespace

TEST_CASE("closed-form metrics match counted values") {
  CHECK_THROWS_AS(chain_metrics(1), std::domain_error);
  for (std::size_t n = 2; n <= 8; ++n) {
    const ChainMetrics m = chain_metrics(n);
    const Digraph c = make_complete_order(numbered_labels(n));
    CHECK(m.height == n - 1);
    CHECK(m.arcs_total == c.arc_count());
    CHECK(m.used + m.unused == m.arcs_total);
    CHECK(m.used == 2 * n - 3);
  }
  CHECK(chain_metrics(3).used == 3);
  CHECK(chain_metrics(3).unused == 0);
  CHECK(chain_metrics(8).used == 13);
  CHECK(chain_metrics(8).unused == 15);
}

TEST_CASE("complete order recognition and its ends") {
  const Digraph c = make_complete_order({"t", "x", "y", "r"});
  CHECK(is_complete_order(c));
  auto [t, r] = transmitter_receiver(c);
  CHECK(c.label(t) == "t");
  CHECK(c.label(r) == "r");

  Digraph gap = c;
  gap.remove_arc(c.index_of("t"), c.index_of("r"));
  CHECK_FALSE(is_complete_order(gap));
  CHECK_THROWS_AS(transmitter_receiver(gap), ContractError);
  CHECK_FALSE(is_complete_order(Digraph({"solo"})));
}

TEST_CASE("chain positions, segments and segment digraph") {
  const Chain c({4, 1, 2});
  CHECK(c.height() == 2);
  CHECK(c.transmitter() == 4);
  CHECK(c.receiver() == 2);
  CHECK(c.position(1) == 1u);
  CHECK_FALSE(c.position(0).has_value());
  CHECK(c.segments().size() == 3);
  CHECK(c.has_segment({4, 2}));
  CHECK_FALSE(c.has_segment({2, 4}));
  CHECK_THROWS_AS(Chain({1}), ContractError);
  CHECK_THROWS_AS(Chain({1, 2, 1}), ContractError);
  const Digraph seg = c.segment_digraph(Digraph(numbered_labels(5)));
  CHECK(seg.arc_count() == 3);
  CHECK(seg.labels() == std::vector<std::string>{"v5", "v2", "v3"});
  CHECK(seg.has_arc(seg.index_of("v5"), seg.index_of("v2")));
  CHECK(is_complete_order(seg));
}

TEST_CASE("canonical disjoint paths count the height and use 2n-3 arcs") {
  for (std::size_t k = 2; k <= 7; ++k) {
    const PathSet p = canonical_disjoint_paths(iota_chain(k));
    CHECK(p.size() == k - 1);
    CHECK(pairwise_arc_disjoint(p.paths));
    std::size_t arcs = 0;
    for (const Path& path : p.paths) arcs += path.size() - 1;
    CHECK(arcs == 2 * k - 3);
  }
}

TEST_CASE("deleting any vertex of a complete order leaves a complete order") {
  std::size_t cases = 0;
  for (std::size_t n = 3; n <= 7; ++n) {
    const Digraph c = make_complete_order(numbered_labels(n));
    for (Vertex v = 0; v < n; ++v) {
      CHECK(oracle::complete_order(oracle::matrix_of(delete_vertex(c, v))));
      CHECK(shrink(iota_chain(n), v).size() == n - 1);
      ++cases;
    }
  }
  CHECK(cases == 25);
  CHECK_THROWS_AS(shrink(iota_chain(2), 0), ContractError);
  CHECK_THROWS_AS(shrink(iota_chain(3), 9), ContractError);
}

TEST_CASE("growing a chain needs one arc per member, capped at seven") {
  for (std::size_t k = 2; k <= 6; ++k) {
    const Chain c = iota_chain(k);
    const Vertex fresh = static_cast<Vertex>(k);
    for (std::size_t pos = 0; pos <= k; ++pos) {
      const std::set<Arc> all = joining_arcs(c, fresh, pos);
      const GrowResult g = grow(c, fresh, pos, all);
      REQUIRE(g);
      CHECK(g.required.size() == k);
      CHECK(g.grown->size() == k + 1);
      CHECK(g.grown->position(fresh) == pos);
      for (const Arc& drop : all) {
        std::set<Arc> partial = all;
        partial.erase(drop);
        const GrowResult miss = grow(c, fresh, pos, partial);
        CHECK_FALSE(miss);
        CHECK(miss.missing == std::vector<Arc>{drop});
      }
    }
  }
  const Chain seven = iota_chain(7);
  const GrowResult capped = grow(seven, 7, 3, joining_arcs(seven, 7, 3));
  CHECK_FALSE(capped);
  CHECK(capped.size_cap);
  CHECK(capped.required.size() == 7);
  CHECK_THROWS_AS(grow(seven, 2, 0, {}), ContractError);
  CHECK_THROWS_AS(grow(iota_chain(3), 5, 9, {}), ContractError);
}

TEST_CASE("conflicting chains order a shared pair both ways") {
  const Chain a({0, 1, 2});
  const Chain b({3, 2, 1});
  auto pair = conflicting_pair(a, b);
  REQUIRE(pair.has_value());
  CHECK(pair->first == 1);
  CHECK(pair->second == 2);
  CHECK(chains_conflict(b, a));
  CHECK_FALSE(chains_conflict(a, Chain({0, 2, 4})));
}

TEST_CASE("law verifier reports every law holding up to seven") {
  const LawReport r = verify_laws(7, 3, 11);
  CHECK(r.all_pass());
  REQUIRE(r.rows.size() == 6);
  CHECK(r.rows[0].deletion == LawStatus::not_applicable);
  for (const LawRow& row : r.rows) {
    CHECK(row.used == 2 * row.n - 3);
    CHECK(row.unused == (row.n - 2) * (row.n >= 3 ? row.n - 3 : 0) / 2);
  }
  CHECK(r.random_checks == 18);
  CHECK_THROWS_AS(verify_laws(1), ContractError);
  CHECK_THROWS_AS(verify_laws(11), ContractError);
}

TEST_CASE("min-cost disjoint system matches brute-force path enumeration") {
  // Smallest total length over all maximum arc-disjoint families, found by
  // exhaustive search over simple paths.
  for (std::size_t n = 2; n <= 5; ++n) {
    const Digraph c = make_complete_order(numbered_labels(n));
    const oracle::Matrix m = oracle::matrix_of(c);
    const auto paths = oracle::all_simple_paths(m, 0, n - 1);
    std::size_t best_count = 0, best_arcs = SIZE_MAX;
    for (std::uint32_t mask = 1; mask < (1u << paths.size()); ++mask) {
      std::set<std::pair<std::size_t, std::size_t>> used;
      std::size_t count = 0, arcs = 0;
      bool ok = true;
      for (std::size_t i = 0; i < paths.size() && ok; ++i) {
        if (!(mask & (1u << i))) continue;
        ++count;
        for (std::size_t j = 1; j < paths[i].size(); ++j) {
          ok = used.insert({paths[i][j - 1], paths[i][j]}).second;
          ++arcs;
          if (!ok) break;
        }
      }
      if (!ok) continue;
      if (count > best_count || (count == best_count && arcs < best_arcs)) {
        best_count = count;
        best_arcs = arcs;
      }
    }
    const MinCostFlow f = min_arc_disjoint_system(c, 0, static_cast<Vertex>(n - 1));
    CHECK(f.paths == best_count);
    CHECK(f.arcs == best_arcs);
  }
}
