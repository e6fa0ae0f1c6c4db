#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainroute/digraph.hpp"
#include "chainroute/store.hpp"

namespace chainroute {

struct BfsState {
  std::vector<std::optional<Vertex>> predecessor;
  std::vector<std::optional<std::size_t>> distance;
  /// Vertices in the order they were dequeued.
  std::vector<Vertex> visit_order;
};

struct BfsOutcome {
  ChainStore store;
  BfsState state;
  std::vector<std::string> warnings;
  /// Candidate chains refused by the store (cycle or malformed).
  std::size_t rejected_chains = 0;
};

/// Modified BFS from `origin` over an announcement digraph. Tree vertices
/// become Arcs (or extend a Varc when the parent has a single out-neighbour
/// and is not the origin); a transitive arc xy into an already visited vertex
/// becomes a chain rooted at the lowest common tree ancestor of x and y,
/// grown with further ancestors while direct arcs allow. Arcs back to the
/// origin are ignored. Never throws on a well-formed digraph; LookupError
/// for a bad origin, ContractError for a non-announcement digraph.
BfsOutcome modified_bfs(const Digraph& d, Vertex origin);

/// Merges pairs of chains sharing at least two vertices into a taller chain
/// when every segment of the union order can be realised by arc-disjoint
/// routes that avoid the chain's other vertices. Repeats until no pair
/// merges. `merges`, when given, receives the number of merges.
ChainStore post_combine(const ChainStore& store, const Digraph& d, std::size_t* merges = nullptr);

enum class ClassKind { chain, arc, bridge, unreachable };

const char* to_string(ClassKind kind) noexcept;

struct ReachabilityClass {
  ClassKind kind = ClassKind::unreachable;
  /// Chain height; 0 unless kind == chain.
  std::size_t height = 0;

  static ReachabilityClass chain_height(std::size_t h) { return {ClassKind::chain, h}; }
  static ReachabilityClass arc_only() { return {ClassKind::arc, 0}; }
  static ReachabilityClass bridge() { return {ClassKind::bridge, 0}; }
  static ReachabilityClass unreachable() { return {ClassKind::unreachable, 0}; }

  /// Table cell: the height, "A", "B" or "U".
  std::string cell() const;

  friend bool operator==(const ReachabilityClass&, const ReachabilityClass&) = default;
};

/// Longest structure from `origin` to `dest`. `warnings` collects
/// inconsistencies instead of failing.
ReachabilityClass classify_destination(const ChainStore& store, const Digraph& d, Vertex origin, Vertex dest,
                                       std::vector<std::string>* warnings = nullptr);

struct DiscoveryReport {
  Vertex origin = 0;
  std::map<Vertex, ReachabilityClass> per_destination;
  /// Count of ChainHeight classifications per height.
  std::map<std::size_t, std::size_t> histogram;
  std::size_t arc_only = 0;
  /// Max-flow arc-disjoint path counts, for cross-checking.
  std::map<Vertex, std::size_t> arc_disjoint;
  std::vector<std::string> warnings;
  std::size_t rejected_chains = 0;
  std::size_t merges = 0;
};

DiscoveryReport build_report(const Digraph& d, Vertex origin);

/// Aligned matrix with one row per report and "-" on the diagonal.
std::string render_table(const Digraph& d, const std::vector<DiscoveryReport>& reports);
/// `origin,dest,class,height,oracle_disjoint` with a header line.
std::string render_csv(const Digraph& d, const std::vector<DiscoveryReport>& reports);

struct CsvRow {
  std::string origin;
  std::string dest;
  ReachabilityClass cls;
  std::size_t oracle_disjoint = 0;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

/// Inverse of render_csv. Throws ParseError(bad_entry) on malformed rows.
std::vector<CsvRow> parse_report_csv(std::string_view text);

/// Aggregated height histogram: ArcOnly entries sit in the height-1
/// bucket and are also counted separately.
struct Histogram {
  std::map<std::size_t, std::size_t> counts;
  std::size_t arc_only = 0;

  void add(const DiscoveryReport& r);
};

/// `height,count,arc_only` rows.
std::string render_histogram_csv(const Histogram& h);
std::string render_histogram_text(const Histogram& h);

}  // namespace chainroute
