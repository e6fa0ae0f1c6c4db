#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "chainroute/digraph.hpp"

namespace chainroute {

/// Largest chain worth maintaining: beyond 7 vertices the unused arcs
/// outnumber the arcs carried by the disjoint paths.
inline constexpr std::size_t kMaxChainSize = 7;

struct ChainMetrics {
  std::size_t n = 0;
  std::size_t height = 0;      // n - 1, also the arc-disjoint path count
  std::size_t arcs_total = 0;  // n(n-1)/2
  std::size_t used = 0;        // 2n - 3
  std::size_t unused = 0;      // (n-2)(n-3)/2
};

/// Closed-form metrics of a k-vertex complete order. Throws std::domain_error
/// for k < 2.
ChainMetrics chain_metrics(std::size_t k);

/// Irreflexive, asymmetric, transitive and complete over all pairs. Graphs
/// with fewer than two vertices are not treated as chains.
bool is_complete_order(const Digraph& d);

/// (transmitter, receiver) of a complete order; ContractError otherwise.
std::pair<Vertex, Vertex> transmitter_receiver(const Digraph& d);

/// Vertex order of a complete order, transmitter first. The segments are all
/// pairs (order[i], order[j]) with i < j.
class Chain {
 public:
  /// Requires at least two distinct vertices.
  explicit Chain(std::vector<Vertex> order);

  const std::vector<Vertex>& order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }
  std::size_t height() const noexcept { return order_.size() - 1; }
  Vertex transmitter() const noexcept { return order_.front(); }
  Vertex receiver() const noexcept { return order_.back(); }

  std::optional<std::size_t> position(Vertex v) const;
  bool contains(Vertex v) const { return position(v).has_value(); }

  /// All n(n-1)/2 segments, ordered by (position of tail, position of head).
  std::vector<Arc> segments() const;
  bool has_segment(Arc a) const;

  /// The chain's segments as a digraph over `universe`'s labels restricted
  /// to the chain's vertices (in chain order).
  Digraph segment_digraph(const Digraph& universe) const;

  friend bool operator==(const Chain&, const Chain&) = default;

 private:
  std::vector<Vertex> order_;
};

/// Transmitter-to-receiver paths over segments: the direct segment first,
/// then one two-segment path through each intermediate in chain order.
PathSet canonical_disjoint_paths(const Chain& c);

/// Removes `v`, keeping the relative order of the rest. ContractError if `v`
/// is absent or fewer than two vertices would remain.
Chain shrink(const Chain& c, Vertex v);

struct GrowResult {
  std::optional<Chain> grown;
  /// Segments between `v` and the existing vertices that were not available.
  std::vector<Arc> missing;
  /// Every segment the insertion needs, whether available or not.
  std::vector<Arc> required;
  bool size_cap = false;

  explicit operator bool() const noexcept { return grown.has_value(); }
};

/// Inserts `v` before position `position` (0 = new transmitter,
/// size() = new receiver). Needs one new segment per existing vertex.
GrowResult grow(const Chain& c, Vertex v, std::size_t position, const std::set<Arc>& available,
                std::size_t max_size = kMaxChainSize);

/// A shared vertex pair ordered oppositely by the two chains, if any.
std::optional<std::pair<Vertex, Vertex>> conflicting_pair(const Chain& a, const Chain& b);
bool chains_conflict(const Chain& a, const Chain& b);

}  // namespace chainroute
