#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainroute/chain.hpp"
#include "chainroute/digraph.hpp"

namespace chainroute {

enum class StructureKind { arc, varc, chain };

const char* to_string(StructureKind kind) noexcept;

/// One entry of the chain routing data structure.
///
/// Ids are derived from content and level, e.g. `A(s,e)@1`, `V(s,a,b)@1`,
/// `C(s,e,b,d)@0`, so registering the same structure twice is a no-op.
/// Children live exactly one level below their parent.
struct Structure {
  StructureKind kind = StructureKind::arc;
  std::string id;
  unsigned level = 0;
  Vertex tail = 0;
  Vertex head = 0;
  std::vector<std::string> children;
  /// Arc: {tail, head}. Varc: the endpoints of its children along the path.
  /// Chain: the vertex order, transmitter first.
  std::vector<Vertex> vertices;

  /// Ordered vertex pairs this structure commits to.
  std::vector<Arc> implied_pairs() const;

  friend bool operator==(const Structure&, const Structure&) = default;
};

std::string make_structure_id(const Digraph& names, StructureKind kind, const std::vector<Vertex>& vertices,
                              unsigned level);

Structure make_arc_structure(const Digraph& names, Vertex tail, Vertex head, unsigned level);
/// Varc over `children`, which must form a directed path.
Structure make_varc_structure(const Digraph& names, std::span<const Structure> children, unsigned level);
/// Chain whose children are `segments` (one per vertex pair, any order).
Structure make_chain_structure(const Digraph& names, const Chain& chain, std::span<const Structure> segments,
                               unsigned level);

struct ChainPlan;

/// How one chain segment is realised in the network.
struct SegmentPlan {
  Arc ends;
  /// Concrete route from ends.tail to ends.head. For a nested chain this is
  /// the nested chain's primary (direct segment) route.
  Path route;
  std::shared_ptr<const ChainPlan> nested;
};

/// A chain together with a realisation of each of its segments.
struct ChainPlan {
  Chain chain;
  /// One entry per segment, in Chain::segments() order.
  std::vector<SegmentPlan> segments;

  const SegmentPlan& segment(Arc ends) const;
  /// Chain order pairs, Varc route pairs and nested-chain pairs.
  std::vector<Arc> implied_pairs() const;
  /// Concrete route of every canonical disjoint path.
  std::vector<Path> routes() const;
  /// Route of the direct transmitter->receiver segment.
  const Path& primary_route() const;
};

/// Builds a plan whose segments are the given routes (no nesting).
ChainPlan make_plan(const Chain& chain, const std::map<Arc, Path>& routes);

/// Structures realising `path` at `level`: an Arc for a single hop, otherwise
/// a Varc followed by its arcs. The top structure comes first.
std::vector<Structure> build_path_structures(const Digraph& names, const Path& path, unsigned level);
/// Structures realising `plan` with the chain at `level`, top first.
std::vector<Structure> build_chain_structures(const Digraph& names, const ChainPlan& plan, unsigned level);

enum class RegisterStatus { accepted, already_present, duplicate_id, missing_child, too_large, malformed, cycle };

const char* to_string(RegisterStatus status) noexcept;

struct RegisterResult {
  RegisterStatus status = RegisterStatus::accepted;
  std::string message;
  /// Cycle evidence for RegisterStatus::cycle.
  Path cycle;

  bool ok() const noexcept {
    return status == RegisterStatus::accepted || status == RegisterStatus::already_present;
  }
  explicit operator bool() const noexcept { return ok(); }
};

/// Leveled registry of arcs, Varcs and chains over one universe digraph.
/// The accumulated relation of every registered structure is kept acyclic.
/// Single writer; concurrent readers are fine between writes.
class ChainStore {
 public:
  explicit ChainStore(const Digraph& universe, std::size_t max_chain_size = kMaxChainSize);

  /// Registers a bundle atomically: either every new structure is added or
  /// none is. Children may come from the bundle or the store.
  RegisterResult register_structures(std::span<const Structure> bundle);
  RegisterResult register_structure(const Structure& s) { return register_structures({&s, 1}); }

  /// Cycle that would appear if `pairs` joined the relation, or empty.
  Path cycle_if_added(std::span<const Arc> pairs) const;

  const Structure* find(std::string_view id) const;
  /// Throws LookupError.
  const Structure& at(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::vector<const Structure*> at_level(unsigned level) const;
  std::vector<const Structure*> with_endpoints(Vertex tail, Vertex head) const;
  /// Every structure in (level, id) order.
  std::vector<const Structure*> ordered() const;
  /// Chains registered at level 0, in id order.
  std::vector<const Structure*> top_chains() const;

  std::size_t size() const noexcept { return structures_.size(); }
  std::size_t max_chain_size() const noexcept { return max_chain_size_; }
  const Digraph& universe() const noexcept { return universe_; }
  const Digraph& relation() const noexcept { return relation_; }

  /// `LEVEL KIND ID TAIL HEAD [CHILDREN...] [ORDER v1,v2,...]` per line.
  std::string serialize() const;

 private:
  RegisterResult validate(const Structure& s, const std::map<std::string, const Structure*>& pending) const;

  Digraph universe_;
  Digraph relation_;
  std::size_t max_chain_size_;
  std::map<std::string, Structure, std::less<>> structures_;
  std::map<unsigned, std::set<std::string>> by_level_;
  std::map<std::pair<Vertex, Vertex>, std::set<std::string>> by_endpoints_;
};

/// Chain at `id` as a Chain value; ContractError if it is not a chain.
Chain chain_of(const Structure& s);

/// Single concrete route of a structure: an Arc is itself, a Varc is the
/// concatenation of its children, a Chain is its direct segment.
Path primary_route(const ChainStore& store, std::string_view id);

struct Resolution {
  /// Arc/Varc: one route. Chain: one route per canonical disjoint path.
  std::vector<Path> routes;
  /// Concrete arcs reached through two different Arc structures in the
  /// expansion, or used by two routes.
  std::vector<Arc> shared_arcs;
  bool disjoint = true;
};

/// Expands a registered structure into concrete routes. IntegrityError on a
/// dangling child.
Resolution resolve(const ChainStore& store, std::string_view id);

/// Realisation of a registered chain with every segment flattened to its
/// primary route.
ChainPlan plan_of(const ChainStore& store, const Structure& chain);

}  // namespace chainroute
