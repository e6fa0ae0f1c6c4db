#include "chainroute/store.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "chainroute/errors.hpp"

namespace chainroute {

const char* to_string(StructureKind kind) noexcept {
  switch (kind) {
    case StructureKind::arc: return "arc";
    case StructureKind::varc: return "varc";
    case StructureKind::chain: return "chain";
  }
  return "arc";
}

const char* to_string(RegisterStatus status) noexcept {
  switch (status) {
    case RegisterStatus::accepted: return "accepted";
    case RegisterStatus::already_present: return "already_present";
    case RegisterStatus::duplicate_id: return "duplicate_id";
    case RegisterStatus::missing_child: return "missing_child";
    case RegisterStatus::too_large: return "too_large";
    case RegisterStatus::malformed: return "malformed";
    case RegisterStatus::cycle: return "cycle";
  }
  return "malformed";
}

namespace {

std::vector<Arc> ordered_pairs(const std::vector<Vertex>& seq) {
  std::vector<Arc> pairs;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j) pairs.push_back({seq[i], seq[j]});
  return pairs;
}

void sort_unique(std::vector<Arc>& arcs) {
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
}

}  // namespace

std::vector<Arc> Structure::implied_pairs() const { return ordered_pairs(vertices); }

std::string make_structure_id(const Digraph& names, StructureKind kind, const std::vector<Vertex>& vertices,
                              unsigned level) {
  std::string id = kind == StructureKind::arc ? "A(" : kind == StructureKind::varc ? "V(" : "C(";
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (i) id += ',';
    id += names.label(vertices[i]);
  }
  id += ")@" + std::to_string(level);
  return id;
}

Structure make_arc_structure(const Digraph& names, Vertex tail, Vertex head, unsigned level) {
  Structure s;
  s.kind = StructureKind::arc;
  s.level = level;
  s.tail = tail;
  s.head = head;
  s.vertices = {tail, head};
  s.id = make_structure_id(names, s.kind, s.vertices, level);
  return s;
}

Structure make_varc_structure(const Digraph& names, std::span<const Structure> children, unsigned level) {
  if (children.empty()) throw ContractError("a Varc needs at least one child");
  Structure s;
  s.kind = StructureKind::varc;
  s.level = level;
  s.tail = children.front().tail;
  s.head = children.back().head;
  s.vertices.push_back(s.tail);
  for (const Structure& c : children) {
    s.children.push_back(c.id);
    s.vertices.push_back(c.head);
  }
  s.id = make_structure_id(names, s.kind, s.vertices, level);
  return s;
}

Structure make_chain_structure(const Digraph& names, const Chain& chain, std::span<const Structure> segments,
                               unsigned level) {
  Structure s;
  s.kind = StructureKind::chain;
  s.level = level;
  s.tail = chain.transmitter();
  s.head = chain.receiver();
  s.vertices = chain.order();
  for (const Arc& seg : chain.segments()) {
    auto it = std::find_if(segments.begin(), segments.end(),
                           [&](const Structure& c) { return c.tail == seg.tail && c.head == seg.head; });
    if (it == segments.end())
      throw ContractError("chain segment " + names.label(seg.tail) + names.label(seg.head) + " has no structure");
    s.children.push_back(it->id);
  }
  s.id = make_structure_id(names, s.kind, s.vertices, level);
  return s;
}

// ---------------------------------------------------------------------------
// Plans

const SegmentPlan& ChainPlan::segment(Arc ends) const {
  for (const SegmentPlan& s : segments)
    if (s.ends == ends) return s;
  throw LookupError("chain plan has no such segment");
}

std::vector<Arc> ChainPlan::implied_pairs() const {
  std::vector<Arc> pairs = chain.segments();
  for (const SegmentPlan& s : segments) {
    auto more = s.nested ? s.nested->implied_pairs() : ordered_pairs(s.route);
    pairs.insert(pairs.end(), more.begin(), more.end());
  }
  sort_unique(pairs);
  return pairs;
}

std::vector<Path> ChainPlan::routes() const {
  std::vector<Path> result;
  for (const Path& hop_path : canonical_disjoint_paths(chain).paths) {
    Path route{hop_path.front()};
    for (std::size_t i = 1; i < hop_path.size(); ++i) {
      const Path& piece = segment({hop_path[i - 1], hop_path[i]}).route;
      route.insert(route.end(), piece.begin() + 1, piece.end());
    }
    result.push_back(std::move(route));
  }
  return result;
}

const Path& ChainPlan::primary_route() const { return segment({chain.transmitter(), chain.receiver()}).route; }

ChainPlan make_plan(const Chain& chain, const std::map<Arc, Path>& routes) {
  ChainPlan plan{chain, {}};
  for (const Arc& seg : chain.segments()) {
    auto it = routes.find(seg);
    if (it == routes.end()) throw ContractError("make_plan: missing route for a segment");
    plan.segments.push_back({seg, it->second, nullptr});
  }
  return plan;
}

std::vector<Structure> build_path_structures(const Digraph& names, const Path& path, unsigned level) {
  if (path.size() < 2) throw ContractError("a route needs at least one arc");
  if (path.size() == 2) return {make_arc_structure(names, path[0], path[1], level)};
  std::vector<Structure> arcs;
  for (std::size_t i = 1; i < path.size(); ++i) arcs.push_back(make_arc_structure(names, path[i - 1], path[i], level + 1));
  std::vector<Structure> out{make_varc_structure(names, arcs, level)};
  out.insert(out.end(), arcs.begin(), arcs.end());
  return out;
}

std::vector<Structure> build_chain_structures(const Digraph& names, const ChainPlan& plan, unsigned level) {
  std::vector<Structure> tops;
  std::vector<Structure> below;
  for (const SegmentPlan& seg : plan.segments) {
    auto part = seg.nested ? build_chain_structures(names, *seg.nested, level + 1)
                           : build_path_structures(names, seg.route, level + 1);
    tops.push_back(part.front());
    below.insert(below.end(), part.begin(), part.end());
  }
  std::vector<Structure> out{make_chain_structure(names, plan.chain, tops, level)};
  std::set<std::string> seen{out.front().id};
  for (auto& s : below)
    if (seen.insert(s.id).second) out.push_back(std::move(s));
  return out;
}

// ---------------------------------------------------------------------------
// Store

ChainStore::ChainStore(const Digraph& universe, std::size_t max_chain_size)
    : universe_(universe), relation_(universe.labels()), max_chain_size_(max_chain_size) {}

const Structure* ChainStore::find(std::string_view id) const {
  auto it = structures_.find(id);
  return it == structures_.end() ? nullptr : &it->second;
}

const Structure& ChainStore::at(std::string_view id) const {
  if (const Structure* s = find(id)) return *s;
  throw LookupError("no structure '" + std::string(id) + "'");
}

Path ChainStore::cycle_if_added(std::span<const Arc> pairs) const {
  Digraph trial = relation_;
  for (const Arc& a : pairs) {
    if (a.tail == a.head) return {a.tail};
    trial.add_arc(a.tail, a.head);
  }
  return find_cycle(trial);
}

RegisterResult ChainStore::validate(const Structure& s,
                                    const std::map<std::string, const Structure*>& pending) const {
  auto fail = [&](RegisterStatus st, const std::string& msg) { return RegisterResult{st, s.id + ": " + msg, {}}; };
  auto lookup = [&](const std::string& id) -> const Structure* {
    if (const Structure* c = find(id)) return c;
    auto it = pending.find(id);
    return it == pending.end() ? nullptr : it->second;
  };

  if (s.tail >= universe_.size() || s.head >= universe_.size()) return fail(RegisterStatus::malformed, "vertex out of range");
  for (Vertex v : s.vertices)
    if (v >= universe_.size()) return fail(RegisterStatus::malformed, "vertex out of range");
  if (s.vertices.size() < 2 || s.vertices.front() != s.tail || s.vertices.back() != s.head)
    return fail(RegisterStatus::malformed, "vertex list does not match endpoints");
  if (s.id != make_structure_id(universe_, s.kind, s.vertices, s.level))
    return fail(RegisterStatus::malformed, "id does not match content");

  std::vector<const Structure*> kids;
  for (const std::string& cid : s.children) {
    const Structure* c = lookup(cid);
    if (!c) return fail(RegisterStatus::missing_child, "child " + cid + " is not registered");
    if (c->level != s.level + 1) return fail(RegisterStatus::malformed, "child " + cid + " is not one level below");
    kids.push_back(c);
  }

  switch (s.kind) {
    case StructureKind::arc:
      if (!s.children.empty()) return fail(RegisterStatus::malformed, "an arc cannot contain other structures");
      if (s.vertices.size() != 2) return fail(RegisterStatus::malformed, "an arc has two vertices");
      if (!universe_.has_arc(s.tail, s.head)) return fail(RegisterStatus::malformed, "arc not present in the digraph");
      break;
    case StructureKind::varc: {
      if (kids.empty()) return fail(RegisterStatus::malformed, "a Varc needs children");
      if (kids.size() + 1 != s.vertices.size()) return fail(RegisterStatus::malformed, "Varc vertex list mismatch");
      for (std::size_t i = 0; i < kids.size(); ++i)
        if (kids[i]->tail != s.vertices[i] || kids[i]->head != s.vertices[i + 1])
          return fail(RegisterStatus::malformed, "Varc children do not form a directed path");
      auto sorted = s.vertices;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        return fail(RegisterStatus::malformed, "Varc path repeats a vertex");
      break;
    }
    case StructureKind::chain: {
      const std::size_t k = s.vertices.size();
      if (k > max_chain_size_)
        return fail(RegisterStatus::too_large,
                    "chain of " + std::to_string(k) + " vertices exceeds " + std::to_string(max_chain_size_));
      std::optional<Chain> chain;
      try {
        chain.emplace(s.vertices);
      } catch (const ContractError& e) {
        return fail(RegisterStatus::malformed, e.what());
      }
      const auto segs = chain->segments();
      if (kids.size() != segs.size())
        return fail(RegisterStatus::malformed, "a chain of " + std::to_string(k) + " vertices needs " +
                                                   std::to_string(segs.size()) + " segments");
      for (std::size_t i = 0; i < segs.size(); ++i)
        if (kids[i]->tail != segs[i].tail || kids[i]->head != segs[i].head)
          return fail(RegisterStatus::malformed, "segment " + kids[i]->id + " does not match the vertex order");
      break;
    }
  }
  return {};
}

RegisterResult ChainStore::register_structures(std::span<const Structure> bundle) {
  std::map<std::string, const Structure*> pending;
  std::vector<const Structure*> fresh;
  for (const Structure& s : bundle) {
    if (const Structure* existing = find(s.id)) {
      if (*existing == s) continue;
      return {RegisterStatus::duplicate_id, s.id + ": id already registered with different content", {}};
    }
    if (auto it = pending.find(s.id); it != pending.end()) {
      if (*it->second == s) continue;
      return {RegisterStatus::duplicate_id, s.id + ": id repeated in bundle", {}};
    }
    pending.emplace(s.id, &s);
    fresh.push_back(&s);
  }
  for (const Structure* s : fresh)
    if (auto r = validate(*s, pending); !r) return r;
  if (fresh.empty()) return {RegisterStatus::already_present, {}, {}};

  std::vector<Arc> pairs;
  for (const Structure* s : fresh) {
    auto p = s->implied_pairs();
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  sort_unique(pairs);
  if (Path cycle = cycle_if_added(pairs); !cycle.empty()) {
    std::string msg = fresh.front()->id + ": would close the cycle ";
    for (Vertex v : cycle) msg += universe_.label(v) + ">";
    msg += universe_.label(cycle.front());
    return {RegisterStatus::cycle, msg, cycle};
  }

  for (const Arc& a : pairs) relation_.add_arc(a.tail, a.head);
  for (const Structure* s : fresh) {
    by_level_[s->level].insert(s->id);
    by_endpoints_[{s->tail, s->head}].insert(s->id);
    structures_.emplace(s->id, *s);
  }
  return {RegisterStatus::accepted, {}, {}};
}

std::vector<const Structure*> ChainStore::at_level(unsigned level) const {
  std::vector<const Structure*> out;
  if (auto it = by_level_.find(level); it != by_level_.end())
    for (const auto& id : it->second) out.push_back(&at(id));
  return out;
}

std::vector<const Structure*> ChainStore::with_endpoints(Vertex tail, Vertex head) const {
  std::vector<const Structure*> out;
  if (auto it = by_endpoints_.find({tail, head}); it != by_endpoints_.end())
    for (const auto& id : it->second) out.push_back(&at(id));
  return out;
}

std::vector<const Structure*> ChainStore::ordered() const {
  std::vector<const Structure*> out;
  for (const auto& [level, ids] : by_level_)
    for (const auto& id : ids) out.push_back(&at(id));
  return out;
}

std::vector<const Structure*> ChainStore::top_chains() const {
  std::vector<const Structure*> out;
  for (const Structure* s : at_level(0))
    if (s->kind == StructureKind::chain) out.push_back(s);
  return out;
}

std::string ChainStore::serialize() const {
  std::ostringstream out;
  for (const Structure* s : ordered()) {
    out << s->level << ' ' << to_string(s->kind) << ' ' << s->id << ' ' << universe_.label(s->tail) << ' '
        << universe_.label(s->head);
    for (const auto& c : s->children) out << ' ' << c;
    if (s->kind == StructureKind::chain) {
      out << " ORDER ";
      for (std::size_t i = 0; i < s->vertices.size(); ++i) out << (i ? "," : "") << universe_.label(s->vertices[i]);
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Resolution

Chain chain_of(const Structure& s) {
  if (s.kind != StructureKind::chain) throw ContractError(s.id + " is not a chain");
  return Chain(s.vertices);
}

namespace {

const Structure& child_of(const ChainStore& store, const Structure& parent, const std::string& id) {
  const Structure* c = store.find(id);
  if (!c) throw IntegrityError(parent.id + " references missing child " + id);
  return *c;
}

const Structure& segment_child(const ChainStore& store, const Structure& chain, Arc ends) {
  for (const auto& id : chain.children) {
    const Structure& c = child_of(store, chain, id);
    if (c.tail == ends.tail && c.head == ends.head) return c;
  }
  throw IntegrityError(chain.id + " lacks a segment");
}

Path primary(const ChainStore& store, const Structure& s, std::size_t depth) {
  if (depth > 64) throw IntegrityError("structure nesting too deep at " + s.id);
  switch (s.kind) {
    case StructureKind::arc: return {s.tail, s.head};
    case StructureKind::varc: {
      Path route{s.tail};
      for (const auto& id : s.children) {
        Path piece = primary(store, child_of(store, s, id), depth + 1);
        route.insert(route.end(), piece.begin() + 1, piece.end());
      }
      return route;
    }
    case StructureKind::chain:
      return primary(store, segment_child(store, s, {s.tail, s.head}), depth + 1);
  }
  return {};
}

void collect_arcs(const ChainStore& store, const Structure& s, std::map<Arc, std::set<std::string>>& owners,
                  std::size_t depth) {
  if (depth > 64) throw IntegrityError("structure nesting too deep at " + s.id);
  if (s.kind == StructureKind::arc) {
    owners[{s.tail, s.head}].insert(s.id);
    return;
  }
  for (const auto& id : s.children) collect_arcs(store, child_of(store, s, id), owners, depth + 1);
}

}  // namespace

Path primary_route(const ChainStore& store, std::string_view id) { return primary(store, store.at(id), 0); }

Resolution resolve(const ChainStore& store, std::string_view id) {
  const Structure& s = store.at(id);
  Resolution r;
  if (s.kind != StructureKind::chain) {
    r.routes.push_back(primary(store, s, 0));
  } else {
    for (const Path& hops : canonical_disjoint_paths(chain_of(s)).paths) {
      Path route{hops.front()};
      for (std::size_t i = 1; i < hops.size(); ++i) {
        Path piece = primary(store, segment_child(store, s, {hops[i - 1], hops[i]}), 1);
        route.insert(route.end(), piece.begin() + 1, piece.end());
      }
      r.routes.push_back(std::move(route));
    }
  }

  std::map<Arc, std::set<std::string>> owners;
  collect_arcs(store, s, owners, 0);
  std::set<Arc> shared;
  for (const auto& [arc, ids] : owners)
    if (ids.size() > 1) shared.insert(arc);
  std::map<Arc, std::size_t> uses;
  for (const Path& p : r.routes)
    for (const Arc& a : path_arcs(p))
      if (++uses[a] > 1) shared.insert(a);
  r.shared_arcs.assign(shared.begin(), shared.end());
  r.disjoint = pairwise_arc_disjoint(r.routes);
  return r;
}

ChainPlan plan_of(const ChainStore& store, const Structure& chain) {
  Chain c = chain_of(chain);
  ChainPlan plan{c, {}};
  for (const Arc& seg : c.segments()) plan.segments.push_back({seg, primary(store, segment_child(store, chain, seg), 1), nullptr});
  return plan;
}

}  // namespace chainroute
