#include "chainroute/chain.hpp"

#include <algorithm>
#include <stdexcept>

#include "chainroute/errors.hpp"

namespace chainroute {

ChainMetrics chain_metrics(std::size_t k) {
  if (k < 2) throw std::domain_error("chain_metrics: a chain needs at least 2 vertices");
  ChainMetrics m;
  m.n = k;
  m.height = k - 1;
  m.arcs_total = k * (k - 1) / 2;
  m.used = 2 * k - 3;
  m.unused = (k - 2) * (k - 3) / 2;
  return m;
}

bool is_complete_order(const Digraph& d) {
  const std::size_t n = d.size();
  if (n < 2) return false;
  return d.arc_count() == n * (n - 1) / 2 && is_acyclic(d);
}

std::pair<Vertex, Vertex> transmitter_receiver(const Digraph& d) {
  if (!is_complete_order(d)) throw ContractError("transmitter_receiver: digraph is not a complete order");
  std::optional<Vertex> transmitter, receiver;
  for (Vertex v = 0; v < d.size(); ++v) {
    if (d.in_neighbors(v).empty()) {
      if (transmitter) throw ContractError("transmitter_receiver: two in-degree-0 vertices");
      transmitter = v;
    }
    if (d.out_neighbors(v).empty()) {
      if (receiver) throw ContractError("transmitter_receiver: two out-degree-0 vertices");
      receiver = v;
    }
  }
  return {*transmitter, *receiver};
}

Chain::Chain(std::vector<Vertex> order) : order_(std::move(order)) {
  if (order_.size() < 2) throw ContractError("a chain needs at least 2 vertices");
  auto sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ContractError("a chain may not repeat a vertex");
}

std::optional<std::size_t> Chain::position(Vertex v) const {
  auto it = std::find(order_.begin(), order_.end(), v);
  if (it == order_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - order_.begin());
}

std::vector<Arc> Chain::segments() const {
  std::vector<Arc> s;
  for (std::size_t i = 0; i < order_.size(); ++i)
    for (std::size_t j = i + 1; j < order_.size(); ++j) s.push_back({order_[i], order_[j]});
  return s;
}

bool Chain::has_segment(Arc a) const {
  auto i = position(a.tail), j = position(a.head);
  return i && j && *i < *j;
}

Digraph Chain::segment_digraph(const Digraph& universe) const {
  std::vector<std::string> labels;
  for (Vertex v : order_) labels.push_back(universe.label(v));
  Digraph d(std::move(labels));
  for (Vertex i = 0; i < order_.size(); ++i)
    for (Vertex j = i + 1; j < order_.size(); ++j) d.add_arc(i, j);
  return d;
}

PathSet canonical_disjoint_paths(const Chain& c) {
  PathSet set;
  set.disjoint = true;
  const auto& o = c.order();
  set.paths.push_back({o.front(), o.back()});
  for (std::size_t i = 1; i + 1 < o.size(); ++i) set.paths.push_back({o.front(), o[i], o.back()});
  return set;
}

Chain shrink(const Chain& c, Vertex v) {
  if (!c.contains(v)) throw ContractError("shrink: vertex not in chain");
  if (c.size() < 3) throw ContractError("shrink: a chain must keep at least 2 vertices");
  std::vector<Vertex> order;
  for (Vertex u : c.order())
    if (u != v) order.push_back(u);
  return Chain(std::move(order));
}

GrowResult grow(const Chain& c, Vertex v, std::size_t position, const std::set<Arc>& available,
                std::size_t max_size) {
  if (c.contains(v)) throw ContractError("grow: vertex already in chain");
  if (position > c.size()) throw ContractError("grow: insertion position out of range");

  GrowResult result;
  const auto& o = c.order();
  for (std::size_t i = 0; i < o.size(); ++i) {
    Arc need = i < position ? Arc{o[i], v} : Arc{v, o[i]};
    result.required.push_back(need);
    if (!available.contains(need)) result.missing.push_back(need);
  }
  if (c.size() + 1 > max_size) {
    result.size_cap = true;
    return result;
  }
  if (!result.missing.empty()) return result;

  std::vector<Vertex> order = o;
  order.insert(order.begin() + static_cast<std::ptrdiff_t>(position), v);
  result.grown = Chain(std::move(order));
  return result;
}

std::optional<std::pair<Vertex, Vertex>> conflicting_pair(const Chain& a, const Chain& b) {
  const auto& o = a.order();
  for (std::size_t i = 0; i < o.size(); ++i)
    for (std::size_t j = i + 1; j < o.size(); ++j) {
      auto pi = b.position(o[i]), pj = b.position(o[j]);
      if (pi && pj && *pi > *pj) return std::pair{o[i], o[j]};
    }
  return std::nullopt;
}

bool chains_conflict(const Chain& a, const Chain& b) { return conflicting_pair(a, b).has_value(); }

}  // namespace chainroute
