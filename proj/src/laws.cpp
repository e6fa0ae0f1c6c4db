#include "chainroute/laws.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "chainroute/chain.hpp"
#include "chainroute/digraph.hpp"
#include "chainroute/errors.hpp"

namespace chainroute {

const char* to_string(LawStatus s) noexcept {
  switch (s) {
    case LawStatus::pass: return "pass";
    case LawStatus::fail: return "FAIL";
    case LawStatus::not_applicable: return "n/a";
  }
  return "FAIL";
}

namespace {

LawStatus verdict(bool ok) { return ok ? LawStatus::pass : LawStatus::fail; }
bool passing(LawStatus s) { return s != LawStatus::fail; }

// Pairwise comparability, asymmetry and transitivity checked directly.
bool brute_complete_order(const Digraph& d) {
  const std::size_t n = d.size();
  if (n < 2) return false;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = 0; j < n; ++j) {
      if (i == j) continue;
      if (d.has_arc(i, j) == d.has_arc(j, i)) return false;
      for (Vertex k = 0; k < n; ++k)
        if (k != i && k != j && d.has_arc(i, j) && d.has_arc(j, k) && !d.has_arc(i, k)) return false;
    }
  return true;
}

std::size_t count_if_vertex(const Digraph& d, bool in) {
  std::size_t c = 0;
  for (Vertex v = 0; v < d.size(); ++v) c += (in ? d.in_neighbors(v) : d.out_neighbors(v)).empty() ? 1 : 0;
  return c;
}

}  // namespace

MinCostFlow min_arc_disjoint_system(const Digraph& d, Vertex source, Vertex sink) {
  struct Edge {
    Vertex to;
    int cap;
    int cost;
    std::size_t rev;
  };
  const std::size_t n = d.size();
  std::vector<std::vector<Edge>> g(n);
  for (const Arc& a : d.arcs()) {
    g[a.tail].push_back({a.head, 1, 1, g[a.head].size()});
    g[a.head].push_back({a.tail, 0, -1, g[a.tail].size() - 1});
  }
  MinCostFlow result;
  long total = 0;
  while (true) {
    constexpr long inf = std::numeric_limits<long>::max() / 4;
    std::vector<long> dist(n, inf);
    std::vector<std::pair<Vertex, std::size_t>> via(n, {0, 0});
    dist[source] = 0;
    for (std::size_t round = 0; round < n; ++round) {
      bool relaxed = false;
      for (Vertex u = 0; u < n; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t i = 0; i < g[u].size(); ++i) {
          const Edge& e = g[u][i];
          if (e.cap > 0 && dist[u] + e.cost < dist[e.to]) {
            dist[e.to] = dist[u] + e.cost;
            via[e.to] = {u, i};
            relaxed = true;
          }
        }
      }
      if (!relaxed) break;
    }
    if (dist[sink] == inf) break;
    for (Vertex v = sink; v != source;) {
      auto [u, i] = via[v];
      Edge& e = g[u][i];
      e.cap -= 1;
      g[v][e.rev].cap += 1;
      v = u;
    }
    total += dist[sink];
    ++result.paths;
  }
  result.arcs = static_cast<std::size_t>(total);
  return result;
}

bool LawRow::all_pass() const {
  return passing(unique_ends) && passing(disjoint_paths) && passing(used_arcs) && passing(unused_arcs) &&
         passing(deletion) && passing(growth) && passing(growth_min);
}

bool LawReport::all_pass() const {
  return random_failures == 0 && std::all_of(rows.begin(), rows.end(), [](const LawRow& r) { return r.all_pass(); });
}

LawReport verify_laws(std::size_t n_max, std::size_t random, std::uint64_t seed) {
  if (n_max < 2 || n_max > 10) throw ContractError("verify_laws: n_max must be within 2..10");
  LawReport report;
  std::mt19937_64 rng(seed);

  for (std::size_t n = 2; n <= n_max; ++n) {
    const Digraph c = make_complete_order(numbered_labels(n));
    const Vertex t = 0;
    const Vertex r = static_cast<Vertex>(n - 1);
    LawRow row;
    row.n = n;

    row.unique_ends = verdict(brute_complete_order(c) && count_if_vertex(c, true) == 1 &&
                              count_if_vertex(c, false) == 1 && c.in_neighbors(t).empty() &&
                              c.out_neighbors(r).empty());

    const PathSet flow = max_arc_disjoint_paths(c, t, r);
    row.disjoint_paths = verdict(flow.size() == n - 1 && pairwise_arc_disjoint(flow.paths));

    const MinCostFlow mcf = min_arc_disjoint_system(c, t, r);
    row.used = mcf.arcs;
    row.unused = c.arc_count() - mcf.arcs;
    row.used_arcs = verdict(mcf.paths == n - 1 && mcf.arcs == 2 * n - 3);
    row.unused_arcs = verdict(row.unused == (n - 2) * (n >= 3 ? n - 3 : 0) / 2);

    if (n < 3) {
      row.deletion = LawStatus::not_applicable;
    } else {
      bool ok = true;
      for (Vertex v = 0; v < n; ++v) ok = ok && brute_complete_order(delete_vertex(c, v));
      row.deletion = verdict(ok);
    }

    // Grow with a fresh vertex at every position: exactly n arcs, and any
    // single missing arc blocks the insertion.
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Chain chain(order);
    const Vertex fresh = static_cast<Vertex>(n);
    bool grow_ok = true;
    bool min_ok = true;
    for (std::size_t pos = 0; pos <= n; ++pos) {
      std::set<Arc> all;
      for (std::size_t i = 0; i < n; ++i) all.insert(i < pos ? Arc{order[i], fresh} : Arc{fresh, order[i]});
      GrowResult g = grow(chain, fresh, pos, all, std::numeric_limits<std::size_t>::max());
      min_ok = min_ok && g.required.size() >= 2;
      if (!g || g.required.size() != n) {
        grow_ok = false;
        continue;
      }
      Digraph grown(numbered_labels(n + 1));
      const auto& o = g.grown->order();
      for (std::size_t i = 0; i < o.size(); ++i)
        for (std::size_t j = i + 1; j < o.size(); ++j) grown.add_arc(o[i], o[j]);
      grow_ok = grow_ok && brute_complete_order(grown);
      for (const Arc& drop : all) {
        auto partial = all;
        partial.erase(drop);
        if (grow(chain, fresh, pos, partial, std::numeric_limits<std::size_t>::max())) grow_ok = false;
      }
    }
    row.growth = verdict(grow_ok);
    row.growth_min = verdict(min_ok);
    report.rows.push_back(row);

    for (std::size_t k = 0; k < random; ++k) {
      std::vector<Vertex> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Digraph shuffled(numbered_labels(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) shuffled.add_arc(perm[i], perm[j]);
      ++report.random_checks;
      bool ok = is_complete_order(shuffled) && brute_complete_order(shuffled);
      if (ok) {
        auto [tx, rx] = transmitter_receiver(shuffled);
        ok = tx == perm.front() && rx == perm.back() && max_arc_disjoint_count(shuffled, tx, rx) == n - 1 &&
             min_arc_disjoint_system(shuffled, tx, rx).arcs == 2 * n - 3;
      }
      if (!ok) ++report.random_failures;
    }
  }
  return report;
}

std::string render_law_report(const LawReport& report) {
  std::ostringstream out;
  out << " n  T1    T2    T3    C4    T5    T6    C7      u    r\n";
  for (const LawRow& r : report.rows) {
    out << std::setw(2) << r.n;
    for (LawStatus s : {r.unique_ends, r.disjoint_paths, r.used_arcs, r.unused_arcs, r.deletion, r.growth, r.growth_min})
      out << "  " << std::left << std::setw(4) << to_string(s) << std::right;
    out << "  " << std::setw(3) << r.used << "  " << std::setw(3) << r.unused << '\n';
  }
  const auto next = chain_metrics(report.rows.empty() ? 3 : report.rows.back().n + 1);
  out << "next size n=" << next.n << " (not checked): u=" << next.used << " r=" << next.unused << '\n';
  if (report.random_checks)
    out << "random relabellings: " << report.random_checks << " checked, " << report.random_failures << " failed\n";
  out << (report.all_pass() ? "all laws hold\n" : "LAW VIOLATION\n");
  return out.str();
}

}  // namespace chainroute
