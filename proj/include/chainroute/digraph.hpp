#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chainroute {

using Vertex = std::uint32_t;

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// A directed walk given by its vertex sequence.
using Path = std::vector<Vertex>;

enum class Role { announcement, destination, generic };

const char* to_string(Role role) noexcept;

/// Labeled simple digraph without loops. Vertex indices follow label order,
/// and every neighbor list is kept sorted so iteration is deterministic.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(std::vector<std::string> labels, Role role = Role::generic);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t arc_count() const noexcept { return arc_count_; }

  Role role() const noexcept { return role_; }
  void set_role(Role role) noexcept { role_ = role; }

  const std::string& label(Vertex v) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<Vertex> find(std::string_view label) const;
  /// Throws LookupError when the label is unknown.
  Vertex index_of(std::string_view label) const;

  bool has_arc(Vertex tail, Vertex head) const;
  bool has_arc(Arc a) const { return has_arc(a.tail, a.head); }
  /// Adds tail->head; no-op if present. Loops are rejected.
  void add_arc(Vertex tail, Vertex head);
  bool remove_arc(Vertex tail, Vertex head);

  std::span<const Vertex> out_neighbors(Vertex v) const;
  std::span<const Vertex> in_neighbors(Vertex v) const;

  /// All arcs in (tail, head) order.
  std::vector<Arc> arcs() const;

  Digraph converse() const;

  /// "a-b-d" rendering of a vertex path.
  std::string format_path(const Path& path) const;

  friend bool operator==(const Digraph& a, const Digraph& b);

 private:
  void check_vertex(Vertex v) const;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, Vertex> index_;
  std::vector<std::vector<Vertex>> out_;
  std::vector<std::vector<Vertex>> in_;
  std::size_t arc_count_ = 0;
  Role role_ = Role::generic;
};

/// Set of source->sink paths. `disjoint` asserts pairwise arc-disjointness;
/// vertices may repeat across paths.
struct PathSet {
  std::vector<Path> paths;
  bool disjoint = false;

  std::size_t size() const noexcept { return paths.size(); }
  bool empty() const noexcept { return paths.empty(); }
};

bool pairwise_arc_disjoint(std::span<const Path> paths);
std::vector<Arc> path_arcs(const Path& path);

// Adjacency-matrix text format:
//   n
//   label_1 ... label_n
//   n rows of n 0/1 entries, row = tail, column = head
// '#' starts a comment; blank lines are skipped.
Digraph parse_adjacency(std::istream& in, Role role = Role::announcement);
Digraph parse_adjacency_text(std::string_view text, Role role = Role::announcement);
std::string serialize_adjacency(const Digraph& d);

bool is_acyclic(const Digraph& d);
/// A directed cycle (first vertex not repeated at the end), or empty.
Path find_cycle(const Digraph& d);
std::optional<std::vector<Vertex>> topological_order(const Digraph& d);

std::vector<bool> reachable_from(const Digraph& d, Vertex source);
Digraph transitive_closure(const Digraph& d);

/// Maximum set of arc-disjoint s->t paths via unit-capacity augmenting paths.
/// An unreachable sink gives an empty set.
PathSet max_arc_disjoint_paths(const Digraph& d, Vertex source, Vertex sink);
std::size_t max_arc_disjoint_count(const Digraph& d, Vertex source, Vertex sink);

Digraph delete_vertex(const Digraph& d, Vertex v);
Digraph delete_vertex(const Digraph& d, std::string_view label);

/// Subgraph induced by `keep`, relabeled in the order given.
Digraph induced_subgraph(const Digraph& d, std::span<const Vertex> keep);

/// Complete order v1 < v2 < ... < vn on the given labels.
Digraph make_complete_order(const std::vector<std::string>& labels);
/// Labels "v1".."vn".
std::vector<std::string> numbered_labels(std::size_t n);

using ArcFilter = std::function<bool(Arc)>;
using VertexFilter = std::function<bool(Vertex)>;

/// BFS shortest path that only uses arcs accepted by `arc_ok` and only
/// passes through interior vertices accepted by `interior_ok`. Neighbors are
/// expanded in label order, so ties resolve deterministically.
std::optional<Path> shortest_path(const Digraph& d, Vertex source, Vertex sink,
                                  const ArcFilter& arc_ok = {},
                                  const VertexFilter& interior_ok = {});

}  // namespace chainroute
