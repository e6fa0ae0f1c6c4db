#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chainroute/chain.hpp"
#include "chainroute/store.hpp"

namespace chainroute {

struct ChainProposal {
  Vertex proposer = 0;
  ChainPlan plan;

  const std::vector<Vertex>& vertex_order() const { return plan.chain.order(); }
};

struct Rule1Verdict {
  bool accepted = true;
  /// Witness cycle when rejected.
  Path cycle;
};

/// Accepts iff the proposal's implied pairs keep `local`'s relation acyclic.
Rule1Verdict rule1_check(const ChainStore& local, const ChainProposal& p);

enum class SegmentState { up, down, unconfirmed };

const char* to_string(SegmentState s) noexcept;

/// Per-segment availability; segments not listed are up.
struct SegmentStatus {
  std::map<Arc, SegmentState> state;

  SegmentState at(Arc segment) const;
  void set(Arc segment, SegmentState s) { state[segment] = s; }
  bool any_excluded() const;
};

struct FailoverResult {
  PathSet safe;
  /// Canonical paths dropped, in canonical order.
  std::vector<Path> excluded;
  bool no_safe_path = false;
};

/// Canonical disjoint paths of `c` that can neither use a segment that is
/// not up nor be forced through one by the vertex order: the path through v
/// is dropped whenever a failed or unconfirmed segment starts at or after v.
FailoverResult rule2_failover(const Chain& c, const SegmentStatus& status);

/// Marks `confirmed` segments up again. Unconfirmed segments become up and
/// up segments are left alone; confirming a down segment or a segment the
/// chain does not have is a ContractError.
SegmentStatus reinstate(const Chain& c, const SegmentStatus& status, const std::vector<Arc>& confirmed);

using Responder = std::function<Rule1Verdict(const ChainProposal&)>;

Responder accept_all();
Responder reject_all();
/// Answers with rule1_check against `store`, which must outlive the responder.
Responder rule1_responder(const ChainStore& store);

enum class EstablishStatus { established, rejected };

struct ProtocolMessage {
  unsigned round = 0;
  Vertex from = 0;
  Vertex to = 0;
  /// "request", "accept", "reject" or "confirm".
  std::string kind;
};

struct EstablishmentOutcome {
  EstablishStatus status = EstablishStatus::established;
  /// First rejecting intermediary, meaningful when rejected.
  Vertex rejected_by = 0;
  Path cycle;
  std::size_t messages_sent = 0;
  unsigned rounds = 0;
  std::vector<ProtocolMessage> log;
};

/// Runs the request / reply / confirm exchange between the proposer and
/// every intermediary. An intermediary without a responder rejects.
EstablishmentOutcome establish_chain(const ChainProposal& p, const std::map<Vertex, Responder>& responders);

}  // namespace chainroute
