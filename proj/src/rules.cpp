#include "chainroute/rules.hpp"

#include <algorithm>

#include "chainroute/errors.hpp"

namespace chainroute {

Rule1Verdict rule1_check(const ChainStore& local, const ChainProposal& p) {
  const auto pairs = p.plan.implied_pairs();
  Path cycle = local.cycle_if_added(pairs);
  return {cycle.empty(), std::move(cycle)};
}

const char* to_string(SegmentState s) noexcept {
  switch (s) {
    case SegmentState::up: return "up";
    case SegmentState::down: return "down";
    case SegmentState::unconfirmed: return "unconfirmed";
  }
  return "up";
}

SegmentState SegmentStatus::at(Arc segment) const {
  auto it = state.find(segment);
  return it == state.end() ? SegmentState::up : it->second;
}

bool SegmentStatus::any_excluded() const {
  return std::any_of(state.begin(), state.end(), [](const auto& kv) { return kv.second != SegmentState::up; });
}

FailoverResult rule2_failover(const Chain& c, const SegmentStatus& status) {
  // A two-hop path through v is unsafe when a non-up segment starts at or
  // after v in the order.
  std::optional<std::size_t> latest_failed_tail;
  for (const auto& [seg, st] : status.state) {
    if (st == SegmentState::up || !c.has_segment(seg)) continue;
    latest_failed_tail = std::max(latest_failed_tail.value_or(0), *c.position(seg.tail));
  }

  FailoverResult r;
  r.safe.disjoint = true;
  for (const Path& p : canonical_disjoint_paths(c).paths) {
    bool ok = true;
    for (std::size_t i = 1; i < p.size() && ok; ++i) ok = status.at({p[i - 1], p[i]}) == SegmentState::up;
    if (ok && p.size() == 3 && latest_failed_tail && *c.position(p[1]) <= *latest_failed_tail) ok = false;
    (ok ? r.safe.paths : r.excluded).push_back(p);
  }
  r.no_safe_path = r.safe.empty();
  return r;
}

SegmentStatus reinstate(const Chain& c, const SegmentStatus& status, const std::vector<Arc>& confirmed) {
  SegmentStatus next = status;
  for (const Arc& seg : confirmed) {
    if (!c.has_segment(seg)) throw ContractError("reinstate: segment is not part of the chain");
    switch (status.at(seg)) {
      case SegmentState::up: break;
      case SegmentState::unconfirmed: next.state.erase(seg); break;
      case SegmentState::down: throw ContractError("reinstate: segment is still down");
    }
  }
  return next;
}

Responder accept_all() {
  return [](const ChainProposal&) { return Rule1Verdict{true, {}}; };
}

Responder reject_all() {
  return [](const ChainProposal&) { return Rule1Verdict{false, {}}; };
}

Responder rule1_responder(const ChainStore& store) {
  return [&store](const ChainProposal& p) { return rule1_check(store, p); };
}

EstablishmentOutcome establish_chain(const ChainProposal& p, const std::map<Vertex, Responder>& responders) {
  EstablishmentOutcome out;
  const auto& order = p.vertex_order();
  if (order.size() < 3) return out;
  const std::vector<Vertex> mids(order.begin() + 1, order.end() - 1);

  for (Vertex m : mids) out.log.push_back({1, p.proposer, m, "request"});
  out.rounds = 1;

  bool all_accept = true;
  for (Vertex m : mids) {
    auto it = responders.find(m);
    Rule1Verdict v = it == responders.end() ? Rule1Verdict{false, {}} : it->second(p);
    out.log.push_back({2, m, p.proposer, v.accepted ? "accept" : "reject"});
    if (!v.accepted && all_accept) {
      all_accept = false;
      out.status = EstablishStatus::rejected;
      out.rejected_by = m;
      out.cycle = std::move(v.cycle);
    }
  }
  out.rounds = 2;

  if (all_accept) {
    for (Vertex m : mids) out.log.push_back({3, p.proposer, m, "confirm"});
    out.rounds = 3;
  }
  out.messages_sent = out.log.size();
  return out;
}

}  // namespace chainroute
