#include "chainroute/discovery.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include "chainroute/errors.hpp"

namespace chainroute {

namespace {

Path tree_path(const BfsState& st, Vertex v) {
  Path p{v};
  while (st.predecessor[p.back()]) p.push_back(*st.predecessor[p.back()]);
  std::reverse(p.begin(), p.end());
  return p;
}

void add_arcs(std::set<Arc>& used, const Path& route) {
  for (const Arc& a : path_arcs(route)) used.insert(a);
}

std::string chain_name(const Digraph& d, const Chain& c) {
  return make_structure_id(d, StructureKind::chain, c.order(), 0);
}

// Chain for the transitive arc x->y: rooted at the lowest common tree
// ancestor, then grown with higher ancestors that have direct arcs to every
// chain vertex.
std::optional<ChainPlan> chain_from_transitive_arc(const Digraph& d, const BfsState& st, Vertex x, Vertex y,
                                                   std::size_t max_size) {
  const Path px = tree_path(st, x);
  const Path py = tree_path(st, y);
  std::size_t k = 0;
  while (k + 1 < px.size() && k + 1 < py.size() && px[k + 1] == py[k + 1]) ++k;
  const Vertex lca = px[k];
  if (lca == x || lca == y) return std::nullopt;

  std::map<Arc, Path> routes;
  routes[{lca, x}] = Path(px.begin() + static_cast<std::ptrdiff_t>(k), px.end());
  routes[{lca, y}] = Path(py.begin() + static_cast<std::ptrdiff_t>(k), py.end());
  routes[{x, y}] = {x, y};
  Chain chain({lca, x, y});

  std::set<Arc> used;
  for (const auto& [seg, route] : routes) add_arcs(used, route);
  for (std::size_t i = k; i-- > 0;) {
    const Vertex w = px[i];
    std::set<Arc> available;
    for (Vertex v : chain.order())
      if (d.has_arc(w, v) && !used.contains(Arc{w, v})) available.insert({w, v});
    GrowResult g = grow(chain, w, 0, available, max_size);
    if (g.size_cap) break;
    if (!g) continue;
    for (const Arc& a : g.required) {
      routes[a] = {a.tail, a.head};
      used.insert(a);
    }
    chain = *g.grown;
  }
  return make_plan(chain, routes);
}

}  // namespace

BfsOutcome modified_bfs(const Digraph& d, Vertex origin) {
  if (origin >= d.size()) throw LookupError("origin vertex out of range");
  if (d.role() != Role::announcement) throw ContractError("modified_bfs expects an announcement digraph");

  const std::size_t n = d.size();
  BfsState st;
  st.predecessor.assign(n, std::nullopt);
  st.distance.assign(n, std::nullopt);
  st.distance[origin] = 0;

  std::vector<Path> tree_struct(n);
  std::set<Vertex> live;
  std::vector<ChainPlan> candidates;
  std::deque<Vertex> queue{origin};

  while (!queue.empty()) {
    const Vertex x = queue.front();
    queue.pop_front();
    st.visit_order.push_back(x);
    const auto out = d.out_neighbors(x);
    for (Vertex y : out) {
      if (y == origin) continue;
      if (!st.distance[y]) {
        st.predecessor[y] = x;
        st.distance[y] = *st.distance[x] + 1;
        queue.push_back(y);
        if (x != origin && out.size() == 1) {
          tree_struct[y] = tree_struct[x];
          tree_struct[y].push_back(y);
          live.erase(x);
        } else {
          tree_struct[y] = {x, y};
        }
        live.insert(y);
        continue;
      }
      if (!st.predecessor[y]) continue;
      const Path px = tree_path(st, x);
      if (std::find(px.begin(), px.end(), y) != px.end()) continue;
      if (auto plan = chain_from_transitive_arc(d, st, x, y, kMaxChainSize)) candidates.push_back(std::move(*plan));
    }
  }

  BfsOutcome out{ChainStore(d), std::move(st), {}, 0};
  for (Vertex v : live) {
    auto bundle = build_path_structures(d, tree_struct[v], 0);
    if (auto r = out.store.register_structures(bundle); !r) out.warnings.push_back("tree structure refused: " + r.message);
  }
  for (const ChainPlan& plan : candidates) {
    auto bundle = build_chain_structures(d, plan, 0);
    if (auto r = out.store.register_structures(bundle); !r) {
      ++out.rejected_chains;
      out.warnings.push_back("chain refused: " + r.message);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Combination

namespace {

std::vector<std::vector<Vertex>> linear_extensions(const Chain& a, const Chain& b, std::size_t cap) {
  std::set<Vertex> members(a.order().begin(), a.order().end());
  members.insert(b.order().begin(), b.order().end());
  std::vector<Vertex> verts(members.begin(), members.end());
  std::set<Arc> before;
  for (const Arc& s : a.segments()) before.insert(s);
  for (const Arc& s : b.segments()) before.insert(s);

  std::vector<std::vector<Vertex>> result;
  std::vector<Vertex> prefix;
  std::vector<bool> placed(verts.size(), false);
  std::function<void()> rec = [&] {
    if (result.size() >= cap) return;
    if (prefix.size() == verts.size()) {
      result.push_back(prefix);
      return;
    }
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (placed[i]) continue;
      bool minimal = true;
      for (std::size_t j = 0; j < verts.size() && minimal; ++j)
        if (!placed[j] && j != i && before.contains(Arc{verts[j], verts[i]})) minimal = false;
      if (!minimal) continue;
      placed[i] = true;
      prefix.push_back(verts[i]);
      rec();
      prefix.pop_back();
      placed[i] = false;
    }
  };
  rec();
  return result;
}

bool simple_route(const Path& p) {
  auto s = p;
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) == s.end();
}

std::optional<ChainPlan> realise(const Digraph& d, const std::vector<Vertex>& order, const ChainPlan& a,
                                 const ChainPlan& b) {
  Chain merged(order);
  const std::set<Vertex> members(order.begin(), order.end());
  std::set<Arc> used;
  std::map<Arc, Path> routes;

  auto fits = [&](const Path& p) {
    if (!simple_route(p)) return false;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
      if (members.contains(p[i])) return false;
    for (const Arc& arc : path_arcs(p))
      if (used.contains(arc) || !d.has_arc(arc)) return false;
    return true;
  };

  for (const Arc& seg : merged.segments()) {
    std::vector<Path> options;
    if (a.chain.has_segment(seg)) options.push_back(a.segment(seg).route);
    if (b.chain.has_segment(seg)) options.push_back(b.segment(seg).route);
    if (d.has_arc(seg)) options.push_back({seg.tail, seg.head});
    auto bfs = shortest_path(
        d, seg.tail, seg.head, [&](Arc arc) { return !used.contains(arc); },
        [&](Vertex v) { return !members.contains(v); });
    if (bfs) options.push_back(*bfs);

    bool placed = false;
    for (const Path& p : options)
      if (fits(p)) {
        routes[seg] = p;
        add_arcs(used, p);
        placed = true;
        break;
      }
    if (!placed) return std::nullopt;
  }
  return make_plan(merged, routes);
}

std::vector<std::vector<Structure>> base_bundles(const ChainStore& store) {
  std::vector<std::vector<Structure>> bundles;
  for (const Structure* top : store.at_level(0)) {
    if (top->kind == StructureKind::chain) continue;
    std::vector<Structure> bundle;
    std::vector<const Structure*> todo{top};
    while (!todo.empty()) {
      const Structure* s = todo.back();
      todo.pop_back();
      bundle.push_back(*s);
      for (const auto& id : s->children) todo.push_back(&store.at(id));
    }
    bundles.push_back(std::move(bundle));
  }
  return bundles;
}

ChainStore assemble(const ChainStore& like, const std::vector<std::vector<Structure>>& base,
                    const std::vector<ChainPlan>& plans, std::vector<bool>* accepted) {
  ChainStore store(like.universe(), like.max_chain_size());
  for (const auto& bundle : base) store.register_structures(bundle);
  if (accepted) accepted->clear();
  for (const ChainPlan& plan : plans) {
    auto r = store.register_structures(build_chain_structures(like.universe(), plan, 0));
    if (accepted) accepted->push_back(r.ok());
  }
  return store;
}

}  // namespace

ChainStore post_combine(const ChainStore& store, const Digraph& d, std::size_t* merges) {
  const auto base = base_bundles(store);
  std::vector<ChainPlan> plans;
  for (const Structure* c : store.top_chains()) plans.push_back(plan_of(store, *c));
  std::size_t merged_count = 0;

  auto by_name = [&](const ChainPlan& x, const ChainPlan& y) { return chain_name(d, x.chain) < chain_name(d, y.chain); };

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < plans.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < plans.size() && !changed; ++j) {
        const Chain& a = plans[i].chain;
        const Chain& b = plans[j].chain;
        std::size_t shared = 0;
        for (Vertex v : a.order()) shared += b.contains(v) ? 1 : 0;
        if (shared < 2 || chains_conflict(a, b)) continue;
        if (a.size() + b.size() - shared > store.max_chain_size()) continue;
        if (a.size() + b.size() - shared == std::max(a.size(), b.size())) continue;

        for (const auto& order : linear_extensions(a, b, 64)) {
          auto m = realise(d, order, plans[i], plans[j]);
          if (!m) continue;
          std::vector<ChainPlan> next;
          for (std::size_t k = 0; k < plans.size(); ++k)
            if (k != i && k != j) next.push_back(plans[k]);
          next.push_back(*m);
          std::vector<bool> ok;
          assemble(store, base, next, &ok);
          if (!ok.back()) continue;
          std::sort(next.begin(), next.end(), by_name);
          plans = std::move(next);
          ++merged_count;
          changed = true;
          break;
        }
      }
    }
  }
  if (merges) *merges = merged_count;
  return assemble(store, base, plans, nullptr);
}

// ---------------------------------------------------------------------------
// Classification

const char* to_string(ClassKind kind) noexcept {
  switch (kind) {
    case ClassKind::chain: return "chain";
    case ClassKind::arc: return "arc";
    case ClassKind::bridge: return "bridge";
    case ClassKind::unreachable: return "unreachable";
  }
  return "unreachable";
}

std::string ReachabilityClass::cell() const {
  switch (kind) {
    case ClassKind::chain: return std::to_string(height);
    case ClassKind::arc: return "A";
    case ClassKind::bridge: return "B";
    case ClassKind::unreachable: return "U";
  }
  return "U";
}

ReachabilityClass classify_destination(const ChainStore& store, const Digraph& d, Vertex origin, Vertex dest,
                                       std::vector<std::string>* warnings) {
  if (origin == dest) throw ContractError("classify_destination: origin equals destination");
  const std::size_t flow = max_arc_disjoint_count(d, origin, dest);
  if (flow == 0) return ReachabilityClass::unreachable();

  const auto chains = store.top_chains();
  std::size_t best = 0;
  for (const Structure* s : chains) {
    Chain c = chain_of(*s);
    auto po = c.position(origin), pd = c.position(dest);
    if (po && pd && *po < *pd) best = std::max(best, *pd - *po);
  }
  if (best >= 1) {
    if (best > flow) {
      if (warnings)
        warnings->push_back("chain height " + std::to_string(best) + " to " + d.label(dest) +
                            " exceeds arc-disjoint count " + std::to_string(flow) + "; clamped");
      best = flow;
    }
    return ReachabilityClass::chain_height(best);
  }

  if (flow >= 2) {
    if (warnings)
      warnings->push_back("no chain covers " + d.label(origin) + "->" + d.label(dest) + " despite " +
                          std::to_string(flow) + " arc-disjoint paths; reported as height 1");
    return ReachabilityClass::chain_height(1);
  }

  // A single arc-disjoint path: a bridge when some chain sits on a walk from
  // the origin to the destination, plain arcs otherwise.
  const auto from_origin = reachable_from(d, origin);
  std::map<Vertex, std::vector<bool>> reach;
  auto reaches_dest = [&](Vertex w) {
    if (w == dest) return true;
    auto it = reach.find(w);
    if (it == reach.end()) it = reach.emplace(w, reachable_from(d, w)).first;
    return static_cast<bool>(it->second[dest]);
  };
  for (const Structure* s : chains) {
    const auto& o = s->vertices;
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (!from_origin[o[i]]) continue;
      for (std::size_t j = i + 1; j < o.size(); ++j)
        if (reaches_dest(o[j])) return ReachabilityClass::bridge();
    }
  }
  return ReachabilityClass::arc_only();
}

DiscoveryReport build_report(const Digraph& d, Vertex origin) {
  DiscoveryReport report;
  report.origin = origin;
  BfsOutcome bfs = modified_bfs(d, origin);
  report.warnings = std::move(bfs.warnings);
  report.rejected_chains = bfs.rejected_chains;
  ChainStore store = post_combine(bfs.store, d, &report.merges);

  for (Vertex v = 0; v < d.size(); ++v) {
    if (v == origin) continue;
    auto cls = classify_destination(store, d, origin, v, &report.warnings);
    report.per_destination[v] = cls;
    report.arc_disjoint[v] = max_arc_disjoint_count(d, origin, v);
    if (cls.kind == ClassKind::chain) ++report.histogram[cls.height];
    if (cls.kind == ClassKind::arc) ++report.arc_only;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_table(const Digraph& d, const std::vector<DiscoveryReport>& reports) {
  std::size_t width = 1;
  for (const auto& l : d.labels()) width = std::max(width, l.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "" ;
  for (const auto& l : d.labels()) out << ' ' << std::right << std::setw(static_cast<int>(width)) << l;
  out << '\n';
  for (const DiscoveryReport& r : reports) {
    out << std::left << std::setw(static_cast<int>(width)) << d.label(r.origin);
    for (Vertex v = 0; v < d.size(); ++v) {
      std::string cell = v == r.origin ? "-" : r.per_destination.at(v).cell();
      out << ' ' << std::right << std::setw(static_cast<int>(width)) << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string render_csv(const Digraph& d, const std::vector<DiscoveryReport>& reports) {
  std::ostringstream out;
  out << "origin,dest,class,height,oracle_disjoint\n";
  for (const DiscoveryReport& r : reports)
    for (const auto& [v, cls] : r.per_destination)
      out << d.label(r.origin) << ',' << d.label(v) << ',' << to_string(cls.kind) << ',' << cls.height << ','
          << r.arc_disjoint.at(v) << '\n';
  return out.str();
}

std::vector<CsvRow> parse_report_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.starts_with("origin,")) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 5) throw ParseError(ParseErrorKind::bad_entry, lineno, "expected 5 comma-separated fields");
    CsvRow row;
    row.origin = f[0];
    row.dest = f[1];
    try {
      const std::size_t height = std::stoul(f[3]);
      row.oracle_disjoint = std::stoul(f[4]);
      if (f[2] == "chain") row.cls = ReachabilityClass::chain_height(height);
      else if (f[2] == "arc") row.cls = ReachabilityClass::arc_only();
      else if (f[2] == "bridge") row.cls = ReachabilityClass::bridge();
      else if (f[2] == "unreachable") row.cls = ReachabilityClass::unreachable();
      else throw ParseError(ParseErrorKind::bad_entry, lineno, "unknown class '" + f[2] + "'");
    } catch (const std::logic_error&) {
      throw ParseError(ParseErrorKind::bad_entry, lineno, "non-numeric height or count");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void Histogram::add(const DiscoveryReport& r) {
  for (const auto& [h, c] : r.histogram) counts[h] += c;
  if (r.arc_only) {
    counts[1] += r.arc_only;
    arc_only += r.arc_only;
  }
}

std::string render_histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "height,count,arc_only\n";
  for (const auto& [height, count] : h.counts) out << height << ',' << count << ',' << (height == 1 ? h.arc_only : 0) << '\n';
  return out.str();
}

std::string render_histogram_text(const Histogram& h) {
  std::ostringstream out;
  std::size_t peak = 1;
  for (const auto& [height, count] : h.counts) peak = std::max(peak, count);
  for (const auto& [height, count] : h.counts) {
    const std::size_t arcs = height == 1 ? h.arc_only : 0;
    const std::size_t bar = (count * 40 + peak - 1) / peak;
    const std::size_t dark = count ? (arcs * bar) / count : 0;
    out << std::setw(3) << height << " | " << std::string(dark, '#') << std::string(bar - dark, '=') << ' '
        << count;
    if (arcs) out << " (" << arcs << " arc-only)";
    out << '\n';
  }
  return out.str();
}

}  // namespace chainroute
