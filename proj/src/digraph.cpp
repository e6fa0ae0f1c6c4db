#include "chainroute/digraph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <set>
#include <sstream>

#include "chainroute/errors.hpp"

namespace chainroute {

const char* to_string(ParseErrorKind kind) noexcept {
  switch (kind) {
    case ParseErrorKind::malformed_header: return "malformed header";
    case ParseErrorKind::non_square: return "non-square matrix";
    case ParseErrorKind::duplicate_label: return "duplicate label";
    case ParseErrorKind::loop: return "loop on diagonal";
    case ParseErrorKind::bad_entry: return "bad matrix entry";
  }
  return "parse error";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + to_string(kind) + ": " + message),
      kind_(kind),
      line_(line) {}

ScenarioError::ScenarioError(std::string section, std::size_t line, const std::string& message)
    : std::runtime_error("[" + section + "] line " + std::to_string(line) + ": " + message),
      section_(std::move(section)),
      line_(line) {}

const char* to_string(Role role) noexcept {
  switch (role) {
    case Role::announcement: return "announcement";
    case Role::destination: return "destination";
    case Role::generic: return "generic";
  }
  return "generic";
}

Digraph::Digraph(std::vector<std::string> labels, Role role)
    : labels_(std::move(labels)), out_(labels_.size()), in_(labels_.size()), role_(role) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ContractError("empty vertex label");
    auto [it, inserted] = index_.emplace(labels_[i], static_cast<Vertex>(i));
    if (!inserted) throw ContractError("duplicate vertex label '" + labels_[i] + "'");
  }
}

void Digraph::check_vertex(Vertex v) const {
  if (v >= labels_.size()) throw LookupError("vertex index " + std::to_string(v) + " out of range");
}

const std::string& Digraph::label(Vertex v) const {
  check_vertex(v);
  return labels_[v];
}

std::optional<Vertex> Digraph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vertex Digraph::index_of(std::string_view label) const {
  if (auto v = find(label)) return *v;
  throw LookupError("unknown vertex '" + std::string(label) + "'");
}

bool Digraph::has_arc(Vertex tail, Vertex head) const {
  if (tail >= size() || head >= size()) return false;
  const auto& out = out_[tail];
  return std::binary_search(out.begin(), out.end(), head);
}

void Digraph::add_arc(Vertex tail, Vertex head) {
  check_vertex(tail);
  check_vertex(head);
  if (tail == head) throw ContractError("loop at '" + labels_[tail] + "'");
  auto& out = out_[tail];
  auto it = std::lower_bound(out.begin(), out.end(), head);
  if (it != out.end() && *it == head) return;
  out.insert(it, head);
  auto& in = in_[head];
  in.insert(std::lower_bound(in.begin(), in.end(), tail), tail);
  ++arc_count_;
}

bool Digraph::remove_arc(Vertex tail, Vertex head) {
  if (!has_arc(tail, head)) return false;
  auto& out = out_[tail];
  out.erase(std::lower_bound(out.begin(), out.end(), head));
  auto& in = in_[head];
  in.erase(std::lower_bound(in.begin(), in.end(), tail));
  --arc_count_;
  return true;
}

std::span<const Vertex> Digraph::out_neighbors(Vertex v) const {
  check_vertex(v);
  return out_[v];
}

std::span<const Vertex> Digraph::in_neighbors(Vertex v) const {
  check_vertex(v);
  return in_[v];
}

std::vector<Arc> Digraph::arcs() const {
  std::vector<Arc> result;
  result.reserve(arc_count_);
  for (Vertex t = 0; t < size(); ++t)
    for (Vertex h : out_[t]) result.push_back({t, h});
  return result;
}

Digraph Digraph::converse() const {
  Digraph c(labels_, role_ == Role::announcement  ? Role::destination
                     : role_ == Role::destination ? Role::announcement
                                                  : Role::generic);
  for (const Arc& a : arcs()) c.add_arc(a.head, a.tail);
  return c;
}

std::string Digraph::format_path(const Path& path) const {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '-';
    s += label(path[i]);
  }
  return s;
}

bool operator==(const Digraph& a, const Digraph& b) {
  return a.labels_ == b.labels_ && a.out_ == b.out_ && a.role_ == b.role_;
}

std::vector<Arc> path_arcs(const Path& path) {
  std::vector<Arc> arcs;
  for (std::size_t i = 1; i < path.size(); ++i) arcs.push_back({path[i - 1], path[i]});
  return arcs;
}

bool pairwise_arc_disjoint(std::span<const Path> paths) {
  std::set<Arc> seen;
  for (const Path& p : paths) {
    // A single walk may not reuse an arc either.
    for (const Arc& a : path_arcs(p))
      if (!seen.insert(a).second) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Adjacency matrix I/O

namespace {

struct ContentLine {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<ContentLine> content_lines(std::istream& in) {
  std::vector<ContentLine> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    ContentLine line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Digraph parse_adjacency(std::istream& in, Role role) {
  const auto lines = content_lines(in);
  if (lines.empty()) throw ParseError(ParseErrorKind::malformed_header, 1, "empty input");

  const auto& header = lines[0];
  std::size_t n = 0;
  {
    const std::string& tok = header.tokens[0];
    bool numeric = !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (header.tokens.size() != 1 || !numeric || tok.size() > 6)
      throw ParseError(ParseErrorKind::malformed_header, header.number, "expected a single vertex count");
    n = std::stoul(tok);
    if (n == 0) throw ParseError(ParseErrorKind::malformed_header, header.number, "vertex count must be positive");
  }
  if (lines.size() < 2)
    throw ParseError(ParseErrorKind::malformed_header, header.number + 1, "missing label line");
  const auto& label_line = lines[1];
  if (label_line.tokens.size() != n)
    throw ParseError(ParseErrorKind::malformed_header, label_line.number,
                     "expected " + std::to_string(n) + " labels, found " + std::to_string(label_line.tokens.size()));
  {
    std::set<std::string> seen;
    for (const auto& l : label_line.tokens)
      if (!seen.insert(l).second)
        throw ParseError(ParseErrorKind::duplicate_label, label_line.number, "label '" + l + "' repeated");
  }

  Digraph d(label_line.tokens, role);
  const std::size_t rows = lines.size() - 2;
  for (std::size_t r = 0; r < std::min(rows, n); ++r) {
    const auto& line = lines[r + 2];
    if (line.tokens.size() != n)
      throw ParseError(ParseErrorKind::non_square, line.number,
                       "row " + std::to_string(r + 1) + " has " + std::to_string(line.tokens.size()) +
                           " entries, expected " + std::to_string(n));
    for (std::size_t c = 0; c < n; ++c) {
      const std::string& tok = line.tokens[c];
      if (tok != "0" && tok != "1")
        throw ParseError(ParseErrorKind::bad_entry, line.number, "entry '" + tok + "' is not 0 or 1");
      if (tok == "1") {
        if (r == c)
          throw ParseError(ParseErrorKind::loop, line.number, "vertex '" + d.label(static_cast<Vertex>(r)) + "' has a loop");
        d.add_arc(static_cast<Vertex>(r), static_cast<Vertex>(c));
      }
    }
  }
  if (rows < n) {
    std::size_t at = lines.back().number + 1;
    throw ParseError(ParseErrorKind::non_square, at,
                     "expected " + std::to_string(n) + " rows, found " + std::to_string(rows));
  }
  if (rows > n)
    throw ParseError(ParseErrorKind::non_square, lines[n + 2].number, "more than " + std::to_string(n) + " rows");
  return d;
}

Digraph parse_adjacency_text(std::string_view text, Role role) {
  std::istringstream in{std::string(text)};
  return parse_adjacency(in, role);
}

std::string serialize_adjacency(const Digraph& d) {
  std::ostringstream out;
  out << d.size() << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) out << (i ? " " : "") << d.labels()[i];
  out << '\n';
  for (Vertex r = 0; r < d.size(); ++r) {
    for (Vertex c = 0; c < d.size(); ++c) out << (c ? " " : "") << (d.has_arc(r, c) ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Traversal

std::optional<std::vector<Vertex>> topological_order(const Digraph& d) {
  std::vector<std::size_t> indegree(d.size());
  for (Vertex v = 0; v < d.size(); ++v) indegree[v] = d.in_neighbors(v).size();
  std::set<Vertex> ready;
  for (Vertex v = 0; v < d.size(); ++v)
    if (indegree[v] == 0) ready.insert(v);
  std::vector<Vertex> order;
  while (!ready.empty()) {
    Vertex v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (Vertex w : d.out_neighbors(v))
      if (--indegree[w] == 0) ready.insert(w);
  }
  if (order.size() != d.size()) return std::nullopt;
  return order;
}

bool is_acyclic(const Digraph& d) { return topological_order(d).has_value(); }

Path find_cycle(const Digraph& d) {
  enum class Mark : std::uint8_t { white, grey, black };
  std::vector<Mark> mark(d.size(), Mark::white);

  for (Vertex root = 0; root < d.size(); ++root) {
    if (mark[root] != Mark::white) continue;
    // Iterative DFS: (vertex, next neighbor index)
    std::vector<std::pair<Vertex, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      auto out = d.out_neighbors(v);
      if (next == out.size()) {
        mark[v] = Mark::black;
        stack.pop_back();
        continue;
      }
      Vertex w = out[next++];
      if (mark[w] == Mark::grey) {
        Path cycle{w};
        for (std::size_t i = 0; i < stack.size(); ++i)
          if (stack[i].first == w) {
            for (std::size_t j = i + 1; j < stack.size(); ++j) cycle.push_back(stack[j].first);
            break;
          }
        return cycle;
      }
      if (mark[w] == Mark::white) {
        mark[w] = Mark::grey;
        stack.push_back({w, 0});
      }
    }
  }
  return {};
}

std::vector<bool> reachable_from(const Digraph& d, Vertex source) {
  std::vector<bool> seen(d.size(), false);
  std::deque<Vertex> queue{source};
  seen.at(source) = true;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    for (Vertex w : d.out_neighbors(v))
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
  }
  return seen;
}

Digraph transitive_closure(const Digraph& d) {
  const std::size_t n = d.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> rows(n * words, 0);
  auto row = [&](std::size_t v) { return rows.data() + v * words; };
  for (const Arc& a : d.arcs()) row(a.tail)[a.head / 64] |= std::uint64_t{1} << (a.head % 64);
  // Warshall over bit rows.
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t* rk = row(k);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t* ri = row(i);
      if (ri[k / 64] >> (k % 64) & 1)
        for (std::size_t w = 0; w < words; ++w) ri[w] |= rk[w];
    }
  }
  Digraph closure(d.labels(), d.role());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && (row(i)[j / 64] >> (j % 64) & 1)) closure.add_arc(static_cast<Vertex>(i), static_cast<Vertex>(j));
  return closure;
}

// ---------------------------------------------------------------------------
// Unit-capacity max flow

namespace {

struct FlowEdge {
  Vertex to;
  int capacity;
  std::size_t reverse;
  bool forward;
};

class UnitFlow {
 public:
  explicit UnitFlow(const Digraph& d) : adjacency_(d.size()) {
    for (const Arc& a : d.arcs()) {
      std::size_t fi = edges_.size();
      edges_.push_back({a.head, 1, fi + 1, true});
      edges_.push_back({a.tail, 0, fi, false});
      adjacency_[a.tail].push_back(fi);
      adjacency_[a.head].push_back(fi + 1);
    }
  }

  std::size_t run(Vertex s, Vertex t) {
    std::size_t flow = 0;
    while (augment(s, t)) ++flow;
    return flow;
  }

  // Arcs carrying flow, grouped by tail and ordered by head.
  std::vector<std::vector<Vertex>> flow_arcs() const {
    std::vector<std::vector<Vertex>> result(adjacency_.size());
    for (std::size_t v = 0; v < adjacency_.size(); ++v) {
      for (std::size_t e : adjacency_[v])
        if (edges_[e].forward && edges_[e].capacity == 0) result[v].push_back(edges_[e].to);
      std::sort(result[v].begin(), result[v].end());
    }
    return result;
  }

 private:
  bool augment(Vertex s, Vertex t) {
    std::vector<std::size_t> via(adjacency_.size(), SIZE_MAX);
    std::vector<bool> seen(adjacency_.size(), false);
    std::deque<Vertex> queue{s};
    seen[s] = true;
    while (!queue.empty() && !seen[t]) {
      Vertex v = queue.front();
      queue.pop_front();
      for (std::size_t e : adjacency_[v]) {
        const FlowEdge& edge = edges_[e];
        if (edge.capacity > 0 && !seen[edge.to]) {
          seen[edge.to] = true;
          via[edge.to] = e;
          queue.push_back(edge.to);
        }
      }
    }
    if (!seen[t]) return false;
    for (Vertex v = t; v != s;) {
      std::size_t e = via[v];
      edges_[e].capacity -= 1;
      edges_[edges_[e].reverse].capacity += 1;
      v = edges_[edges_[e].reverse].to;
    }
    return true;
  }

  std::vector<FlowEdge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace

PathSet max_arc_disjoint_paths(const Digraph& d, Vertex source, Vertex sink) {
  if (source >= d.size() || sink >= d.size()) throw LookupError("max_arc_disjoint_paths: vertex out of range");
  if (source == sink) throw ContractError("max_arc_disjoint_paths: source equals sink");

  UnitFlow flow(d);
  const std::size_t value = flow.run(source, sink);
  auto remaining = flow.flow_arcs();

  PathSet result;
  result.disjoint = true;
  for (std::size_t k = 0; k < value; ++k) {
    Path walk{source};
    while (walk.back() != sink) {
      auto& out = remaining[walk.back()];
      Vertex next = out.front();
      out.erase(out.begin());
      auto seen = std::find(walk.begin(), walk.end(), next);
      if (seen != walk.end())
        walk.erase(seen + 1, walk.end());  // drop a flow cycle
      else
        walk.push_back(next);
    }
    result.paths.push_back(std::move(walk));
  }
  return result;
}

std::size_t max_arc_disjoint_count(const Digraph& d, Vertex source, Vertex sink) {
  if (source >= d.size() || sink >= d.size()) throw LookupError("max_arc_disjoint_count: vertex out of range");
  if (source == sink) throw ContractError("max_arc_disjoint_count: source equals sink");
  UnitFlow flow(d);
  return flow.run(source, sink);
}

// ---------------------------------------------------------------------------
// Subgraphs

Digraph induced_subgraph(const Digraph& d, std::span<const Vertex> keep) {
  std::vector<std::string> labels;
  std::vector<long> remap(d.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    labels.push_back(d.label(keep[i]));
    remap[keep[i]] = static_cast<long>(i);
  }
  Digraph sub(std::move(labels), d.role());
  for (const Arc& a : d.arcs())
    if (remap[a.tail] >= 0 && remap[a.head] >= 0)
      sub.add_arc(static_cast<Vertex>(remap[a.tail]), static_cast<Vertex>(remap[a.head]));
  return sub;
}

Digraph delete_vertex(const Digraph& d, Vertex v) {
  if (v >= d.size()) throw LookupError("delete_vertex: vertex index out of range");
  std::vector<Vertex> keep;
  for (Vertex u = 0; u < d.size(); ++u)
    if (u != v) keep.push_back(u);
  return induced_subgraph(d, keep);
}

Digraph delete_vertex(const Digraph& d, std::string_view label) { return delete_vertex(d, d.index_of(label)); }

Digraph make_complete_order(const std::vector<std::string>& labels) {
  Digraph d(labels);
  for (Vertex i = 0; i < d.size(); ++i)
    for (Vertex j = i + 1; j < d.size(); ++j) d.add_arc(i, j);
  return d;
}

std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back("v" + std::to_string(i));
  return labels;
}

std::optional<Path> shortest_path(const Digraph& d, Vertex source, Vertex sink, const ArcFilter& arc_ok,
                                  const VertexFilter& interior_ok) {
  if (source == sink) return Path{source};
  std::vector<long> parent(d.size(), -1);
  std::vector<bool> seen(d.size(), false);
  std::deque<Vertex> queue{source};
  seen[source] = true;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    for (Vertex w : d.out_neighbors(v)) {
      if (seen[w]) continue;
      if (arc_ok && !arc_ok({v, w})) continue;
      if (w != sink && interior_ok && !interior_ok(w)) continue;
      seen[w] = true;
      parent[w] = v;
      if (w == sink) {
        Path p{sink};
        for (long u = v; u != -1; u = parent[static_cast<Vertex>(u)]) {
          p.push_back(static_cast<Vertex>(u));
          if (static_cast<Vertex>(u) == source) break;
        }
        std::reverse(p.begin(), p.end());
        return p;
      }
      queue.push_back(w);
    }
  }
  return std::nullopt;
}

}  // namespace chainroute
