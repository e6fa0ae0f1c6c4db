#include "chainroute/simulator.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <sstream>
#include <variant>

#include "chainroute/chain.hpp"
#include "chainroute/errors.hpp"
#include "chainroute/rules.hpp"
#include "chainroute/store.hpp"

namespace chainroute {

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::converged: return "converged";
    case Outcome::oscillation: return "oscillation";
    case Outcome::exhausted: return "exhausted";
  }
  return "exhausted";
}

const char* to_string(ViewUpdate u) noexcept {
  switch (u) {
    case ViewUpdate::view_change: return "view_change";
    case ViewUpdate::unchanged: return "unchanged";
    case ViewUpdate::duplicate: return "duplicate";
    case ViewUpdate::ignored_stale: return "ignored_stale";
    case ViewUpdate::tie_kept: return "tie_kept";
  }
  return "unchanged";
}

ViewUpdate apply_timestamped_view(View& view, const EventReport& r, bool timestamping) {
  ViewEntry& e = view[r.subject];
  if (!timestamping) {
    if (e.up == r.up) return ViewUpdate::unchanged;
    e = {r.up, true, r.origin_time, r.sender};
    return ViewUpdate::view_change;
  }
  if (e.known && r.origin_time < e.origin_time) return ViewUpdate::ignored_stale;
  if (e.known && r.origin_time == e.origin_time) {
    if (e.up == r.up) return ViewUpdate::duplicate;
    if (r.sender >= e.sender) return ViewUpdate::tie_kept;
  }
  const bool changed = e.up != r.up;
  e = {r.up, true, r.origin_time, r.sender};
  return changed ? ViewUpdate::view_change : ViewUpdate::unchanged;
}

std::optional<Path> baseline_select(Vertex node, const std::vector<RoutePref>& prefs,
                                    const std::map<Vertex, Path>& rib_in,
                                    const std::function<bool(Vertex)>& hop_usable) {
  for (const RoutePref& p : prefs) {
    const Vertex hop = p.first_hop();
    if (!hop_usable(hop)) continue;
    auto it = rib_in.find(hop);
    if (it == rib_in.end()) continue;
    const Path& announced = it->second;
    if (p.wildcard) {
      if (std::find(announced.begin(), announced.end(), node) != announced.end()) continue;
    } else if (!std::equal(p.path.begin() + 1, p.path.end(), announced.begin(), announced.end())) {
      continue;
    }
    Path route{node};
    route.insert(route.end(), announced.begin(), announced.end());
    return route;
  }
  return std::nullopt;
}

Path detect_loop(const Digraph& forwarding) { return find_cycle(forwarding); }

namespace {

enum class MsgKind { announce, report, request, reply, confirm, probe, probe_reply };

struct Message {
  unsigned deliver = 0;
  std::uint64_t seq = 0;
  Vertex from = 0;
  Vertex to = 0;
  MsgKind kind = MsgKind::announce;
  std::optional<Path> route;
  EventReport report;
  std::string chain_id;
  bool accept = true;
  Path cycle;
  Arc segment{};
};

struct HeldChain {
  std::string id;
  std::shared_ptr<const ChainPlan> plan;
  SegmentStatus status;
};

struct Node {
  bool up = true;
  std::optional<Path> selected;
  std::map<Vertex, Path> rib_in;
  View view;
  std::set<std::string> seen;
  std::optional<ChainStore> store;
  std::vector<HeldChain> chains;
  std::optional<std::size_t> active;
  std::string selection = "none";
  std::vector<Path> routes;
};

struct Proposal {
  Vertex source = 0;
  std::shared_ptr<const ChainPlan> plan;
  std::string id;
  unsigned start_at = 0;
  std::optional<unsigned> decide_at;
  std::map<Vertex, Message> replies;
  std::set<std::string> tried;
};

std::string cycle_text(const Digraph& g, const Path& cycle) {
  std::string s;
  for (std::size_t i = 0; i < cycle.size(); ++i) s += (i ? ">" : "") + g.label(cycle[i]);
  return s;
}

class Sim {
 public:
  Sim(const Scenario& scn, const SimOptions& opt) : s_(scn), g_(scn.graph), opt_(opt), nodes_(scn.graph.size()) {
    for (Node& n : nodes_) n.store.emplace(g_);
    if (s_.mode == Mode::chain) {
      for (Vertex v = 0; v < g_.size(); ++v)
        if (v != s_.destination && (s_.preferences.empty() || s_.preferences.contains(v))) sources_.insert(v);
      pending_ = sources_;
    }
    last_event_ = s_.events.empty() ? 0 : s_.events.back().tick;
  }

  SimResult run() {
    std::optional<std::string> prev;
    std::map<std::string, unsigned> seen_states;
    bool stopped = false;
    for (t_ = 0; t_ < opt_.max_ticks; ++t_) {
      res_.tick = t_;
      deliver();
      apply_events();
      if (t_ == 0 && s_.mode == Mode::baseline && nodes_[s_.destination].up) announce(s_.destination);
      if (s_.mode == Mode::chain) pipeline();
      for (Vertex v = 0; v < g_.size(); ++v) s_.mode == Mode::baseline ? reselect_baseline(v) : reselect_chain(v);
      check_loop();

      const std::string state = snapshot();
      const bool idle = inflight_.empty() && t_ >= last_event_ && !current_ && pending_.empty();
      if (idle && prev && *prev == state) {
        trace("-", "converged", "tick " + std::to_string(t_));
        res_.outcome = Outcome::converged;
        stopped = true;
        break;
      }
      if (t_ >= last_event_) {
        if (auto it = seen_states.find(state); it != seen_states.end() && !res_.oscillation_tick) {
          res_.period = t_ - it->second;
          res_.oscillation_tick = t_;
          trace("-", "oscillation_detected",
                "period " + std::to_string(res_.period) + " repeats tick " + std::to_string(it->second));
          if (opt_.stop_on_oscillation) {
            res_.outcome = Outcome::oscillation;
            stopped = true;
            break;
          }
        }
        seen_states.emplace(state, t_);
      }
      prev = state;
    }
    if (!stopped) res_.outcome = Outcome::exhausted;

    for (Vertex v = 0; v < g_.size(); ++v) {
      if (v == s_.destination) continue;
      if (s_.mode == Mode::baseline) res_.final_routes[v] = nodes_[v].selected ? g_.format_path(*nodes_[v].selected) : "none";
      else if (sources_.contains(v)) res_.final_routes[v] = nodes_[v].selection;
      res_.views[v] = nodes_[v].view;
    }
    res_.views[s_.destination] = nodes_[s_.destination].view;
    return std::move(res_);
  }

 private:
  // -- plumbing -------------------------------------------------------------

  void trace(const std::string& actor, const std::string& kind, const std::string& detail) {
    res_.trace.push_back({t_, actor, kind, detail});
  }

  const std::string& L(Vertex v) const { return g_.label(v); }

  bool link_down(Vertex a, Vertex b) const { return down_links_.contains(std::minmax(a, b)); }

  bool link_usable(Vertex a, Vertex b) const {
    return nodes_[a].up && nodes_[b].up && s_.linked(a, b) && !link_down(a, b);
  }

  std::string node_subject(Vertex v) const { return "node:" + L(v); }
  std::string link_subject(Vertex a, Vertex b) const {
    auto [x, y] = std::minmax(a, b);
    return "link:" + L(x) + "-" + L(y);
  }
  static std::string subject_text(const std::string& subject) {
    return subject.starts_with("node:") ? subject.substr(5) : "link " + subject.substr(5);
  }

  std::string describe(const Message& m) const {
    switch (m.kind) {
      case MsgKind::announce: return m.route ? "announce " + g_.format_path(*m.route) : "withdraw";
      case MsgKind::report:
        return "report " + subject_text(m.report.subject) + (m.report.up ? " up" : " down") +
               " t=" + std::to_string(m.report.origin_time);
      case MsgKind::request: return "request " + m.chain_id;
      case MsgKind::reply:
        return (m.accept ? "accept " : "reject ") + m.chain_id + (m.cycle.empty() ? "" : " cycle " + cycle_text(g_, m.cycle));
      case MsgKind::confirm: return "confirm " + m.chain_id;
      case MsgKind::probe: return "probe " + L(m.segment.tail) + L(m.segment.head);
      case MsgKind::probe_reply: return "probe_reply " + L(m.segment.tail) + L(m.segment.head);
    }
    return {};
  }

  void send(Message m, unsigned delay) {
    m.deliver = t_ + delay;
    m.seq = seq_++;
    trace(L(m.from), "message_sent", "to " + L(m.to) + " " + describe(m));
    inflight_.push_back(std::move(m));
  }

  // -- delivery -------------------------------------------------------------

  void deliver() {
    std::vector<Message> due;
    std::vector<Message> later;
    for (Message& m : inflight_) (m.deliver == t_ ? due : later).push_back(std::move(m));
    inflight_ = std::move(later);
    std::sort(due.begin(), due.end(), [](const Message& a, const Message& b) { return a.seq < b.seq; });
    for (Message& m : due) {
      const bool physical = m.kind == MsgKind::announce || m.kind == MsgKind::report;
      if (physical ? !link_usable(m.from, m.to) : !nodes_[m.to].up) {
        trace(L(m.to), "message_dropped", "from " + L(m.from) + " " + describe(m));
        continue;
      }
      trace(L(m.to), "message_received", "from " + L(m.from) + " " + describe(m));
      handle(m);
    }
  }

  void handle(const Message& m) {
    Node& n = nodes_[m.to];
    switch (m.kind) {
      case MsgKind::announce:
        if (m.route) n.rib_in[m.from] = *m.route;
        else n.rib_in.erase(m.from);
        break;
      case MsgKind::report: {
        EventReport r = m.report;
        r.sender = m.from;
        on_report(m.to, r);
        break;
      }
      case MsgKind::request: {
        if (!current_ || current_->id != m.chain_id) break;
        Rule1Verdict v = rule1_check(*n.store, ChainProposal{current_->source, *current_->plan});
        Message reply;
        reply.from = m.to;
        reply.to = m.from;
        reply.kind = MsgKind::reply;
        reply.chain_id = m.chain_id;
        reply.accept = v.accepted;
        reply.cycle = v.cycle;
        send(std::move(reply), 1);
        break;
      }
      case MsgKind::reply:
        if (current_ && current_->id == m.chain_id) current_->replies[m.from] = m;
        break;
      case MsgKind::confirm: break;
      case MsgKind::probe: {
        Message reply;
        reply.from = m.to;
        reply.to = m.from;
        reply.kind = MsgKind::probe_reply;
        reply.segment = m.segment;
        send(std::move(reply), 1);
        break;
      }
      case MsgKind::probe_reply:
        for (HeldChain& hc : n.chains) {
          if (hc.status.at(m.segment) != SegmentState::unconfirmed) continue;
          if (!segment_clear(m.to, hc.plan->segment(m.segment).route)) continue;
          hc.status = reinstate(hc.plan->chain, hc.status, {m.segment});
          trace(L(m.to), "segment_reinstated", hc.id + " " + L(m.segment.tail) + L(m.segment.head));
        }
        break;
    }
  }

  // -- event reports --------------------------------------------------------

  void on_report(Vertex n, const EventReport& r) {
    Node& node = nodes_[n];
    const std::string what = subject_text(r.subject) + (r.up ? " up" : " down") + " t=" + std::to_string(r.origin_time);
    switch (apply_timestamped_view(node.view, r, s_.timestamping)) {
      case ViewUpdate::view_change:
        trace(L(n), "view_change", what + " from " + L(r.sender));
        after_view_change(n);
        break;
      case ViewUpdate::ignored_stale: {
        ++res_.stale_ignored;
        const ViewEntry& e = node.view.at(r.subject);
        trace(L(n), "ignored_stale",
              what + " from " + L(r.sender) + " (holding " + (e.up ? "up" : "down") + " t=" + std::to_string(e.origin_time) + ")");
        break;
      }
      case ViewUpdate::tie_kept:
        trace(L(n), "tie_kept", what + " from " + L(r.sender));
        break;
      case ViewUpdate::duplicate:
      case ViewUpdate::unchanged: break;
    }
    relay(n, r, r.sender);
  }

  void relay(Vertex n, const EventReport& r, Vertex from) {
    const std::string key = r.subject + (r.up ? "|up|" : "|down|") + std::to_string(r.origin_time);
    if (!nodes_[n].seen.insert(key).second) return;
    const std::string self_subject = node_subject(n);
    for (Vertex m : s_.neighbors(n)) {
      if (m == from || node_subject(m) == r.subject || !link_usable(n, m)) continue;
      Message msg;
      msg.from = n;
      msg.to = m;
      msg.kind = MsgKind::report;
      msg.report = r;
      msg.report.sender = n;
      send(std::move(msg), s_.delay(n, m));
    }
  }

  void detect(Vertex detector, const std::string& subject, bool up) {
    if (!nodes_[detector].up) return;
    EventReport r{subject, up, t_, detector};
    Node& node = nodes_[detector];
    if (apply_timestamped_view(node.view, r, s_.timestamping) == ViewUpdate::view_change) {
      trace(L(detector), "view_change", subject_text(subject) + (up ? " up" : " down") + " t=" + std::to_string(t_) + " detected");
      after_view_change(detector);
    }
    relay(detector, r, detector);
  }

  // -- scripted events ------------------------------------------------------

  void apply_events() {
    for (const TimedEvent& e : s_.events) {
      if (e.tick != t_) continue;
      switch (e.kind) {
        case EventKind::fail_link:
        case EventKind::recover_link: {
          const bool up = e.kind == EventKind::recover_link;
          trace("-", "event", std::string(to_string(e.kind)) + " " + L(e.a) + " " + L(e.b));
          if (up) down_links_.erase(std::minmax(e.a, e.b));
          else down_links_.insert(std::minmax(e.a, e.b));
          if (s_.mode == Mode::baseline) {
            if (!up) {
              nodes_[e.a].rib_in.erase(e.b);
              nodes_[e.b].rib_in.erase(e.a);
            } else {
              reannounce_over(e.a, e.b);
              reannounce_over(e.b, e.a);
            }
          }
          detect(e.a, link_subject(e.a, e.b), up);
          detect(e.b, link_subject(e.a, e.b), up);
          break;
        }
        case EventKind::fail_node: {
          trace("-", "event", "fail_node " + L(e.a));
          Node& n = nodes_[e.a];
          n.up = false;
          n.rib_in.clear();
          n.selected.reset();
          for (Vertex m : s_.neighbors(e.a)) nodes_[m].rib_in.erase(e.a);
          for (Vertex m : s_.neighbors(e.a)) detect(m, node_subject(e.a), false);
          break;
        }
        case EventKind::recover_node: {
          trace("-", "event", "recover_node " + L(e.a));
          nodes_[e.a].up = true;
          if (s_.mode == Mode::baseline) {
            for (Vertex m : s_.neighbors(e.a)) reannounce_over(m, e.a);
            if (e.a == s_.destination) announce(e.a);
          }
          for (Vertex m : s_.neighbors(e.a)) detect(m, node_subject(e.a), true);
          break;
        }
      }
    }
  }

  // -- baseline -------------------------------------------------------------

  std::optional<Path> advertised(Vertex v) const {
    if (v == s_.destination) return nodes_[v].up ? std::optional<Path>(Path{v}) : std::nullopt;
    return nodes_[v].selected;
  }

  void announce_to(Vertex from, Vertex to) {
    Message m;
    m.from = from;
    m.to = to;
    m.kind = MsgKind::announce;
    m.route = advertised(from);
    send(std::move(m), s_.delay(from, to));
  }

  void announce(Vertex v) {
    for (Vertex u : g_.in_neighbors(v))
      if (link_usable(v, u)) announce_to(v, u);
  }

  // `from` re-sends its current route to `to` when `to` forwards through it.
  void reannounce_over(Vertex from, Vertex to) {
    if (g_.has_arc(to, from) && link_usable(from, to) && advertised(from)) announce_to(from, to);
  }

  void reselect_baseline(Vertex v) {
    if (v == s_.destination || !nodes_[v].up) return;
    Node& n = nodes_[v];
    auto usable = [&](Vertex h) { return g_.has_arc(v, h) && link_usable(v, h); };
    auto next = baseline_select(v, s_.prefs_for(v), n.rib_in, usable);
    if (next == n.selected) return;
    n.selected = next;
    trace(L(v), "route_selected", next ? g_.format_path(*next) : "none");
    announce(v);
  }

  // -- chain mode: views and segments ---------------------------------------

  bool arc_up_in_view(Vertex viewer, Vertex a, Vertex b) const {
    const View& view = nodes_[viewer].view;
    for (const std::string& subject : {node_subject(a), node_subject(b), link_subject(a, b)}) {
      auto it = view.find(subject);
      if (it != view.end() && !it->second.up) return false;
    }
    return g_.has_arc(a, b);
  }

  bool segment_clear(Vertex viewer, const Path& route) const {
    for (std::size_t i = 1; i < route.size(); ++i)
      if (!arc_up_in_view(viewer, route[i - 1], route[i])) return false;
    return true;
  }

  void after_view_change(Vertex n) {
    if (s_.mode != Mode::chain || !sources_.contains(n)) return;
    const Node& node = nodes_[n];
    if (!node.active || pending_.contains(n) || (current_ && current_->source == n)) return;
    const HeldChain& hc = node.chains[*node.active];
    for (const SegmentPlan& seg : hc.plan->segments)
      if (!segment_clear(n, seg.route)) {
        pending_.insert(n);
        trace(L(n), "replan", hc.id + " lost segment " + L(seg.ends.tail) + L(seg.ends.head));
        return;
      }
  }

  void update_statuses(Vertex v) {
    Node& n = nodes_[v];
    for (HeldChain& hc : n.chains) {
      for (const SegmentPlan& seg : hc.plan->segments) {
        const bool clear = segment_clear(v, seg.route);
        const SegmentState st = hc.status.at(seg.ends);
        if (!clear && st != SegmentState::down) {
          hc.status.set(seg.ends, SegmentState::down);
          trace(L(v), "segment_down", hc.id + " " + L(seg.ends.tail) + L(seg.ends.head));
        } else if (clear && st == SegmentState::down) {
          hc.status.set(seg.ends, SegmentState::unconfirmed);
          trace(L(v), "segment_unconfirmed", hc.id + " " + L(seg.ends.tail) + L(seg.ends.head));
          Message probe;
          probe.from = v;
          probe.to = seg.ends.head;
          probe.kind = MsgKind::probe;
          probe.segment = seg.ends;
          send(std::move(probe), 1);
        }
      }
    }
  }

  static std::vector<Path> concrete_routes(const ChainPlan& plan, const PathSet& safe) {
    std::vector<Path> out;
    for (const Path& hops : safe.paths) {
      Path route{hops.front()};
      for (std::size_t i = 1; i < hops.size(); ++i) {
        const Path& piece = plan.segment({hops[i - 1], hops[i]}).route;
        route.insert(route.end(), piece.begin() + 1, piece.end());
      }
      out.push_back(std::move(route));
    }
    return out;
  }

  void reselect_chain(Vertex v) {
    if (!sources_.contains(v)) return;
    Node& n = nodes_[v];
    std::string label = "none";
    std::vector<Path> routes;
    if (n.up) {
      update_statuses(v);
      std::optional<FailoverResult> safe;
      if (n.active) {
        safe = rule2_failover(n.chains[*n.active].plan->chain, n.chains[*n.active].status);
        if (safe->no_safe_path) {
          for (std::size_t i = 0; i < n.chains.size(); ++i) {
            if (i == *n.active) continue;
            auto alt = rule2_failover(n.chains[i].plan->chain, n.chains[i].status);
            if (alt.no_safe_path) continue;
            trace(L(v), "chain_switch", n.chains[*n.active].id + " -> " + n.chains[i].id);
            n.active = i;
            safe = alt;
            break;
          }
        }
      }
      if (n.active && !safe->no_safe_path) {
        label = n.chains[*n.active].id;
        routes = concrete_routes(*n.chains[*n.active].plan, safe->safe);
      } else if (arc_up_in_view(v, v, s_.destination)) {
        label = "direct";
        routes = {{v, s_.destination}};
      }
    }
    std::string rendered = label;
    for (const Path& p : routes) rendered += " " + g_.format_path(p);
    n.routes = std::move(routes);
    if (rendered == n.selection) return;
    n.selection = rendered;
    trace(L(v), "route_selected", rendered);
  }

  // -- chain mode: planning and establishment ------------------------------

  std::optional<SegmentPlan> route_segment(Vertex src, Arc seg, const std::set<Vertex>& members) const {
    const Vertex dest = s_.destination;
    if (seg.head == dest && seg.tail != src && nodes_[seg.tail].active) {
      const auto& nested = nodes_[seg.tail].chains[*nodes_[seg.tail].active].plan;
      const Path& primary = nested->primary_route();
      bool ok = segment_clear(src, primary);
      for (std::size_t i = 1; ok && i + 1 < primary.size(); ++i) ok = !members.contains(primary[i]);
      if (ok) return SegmentPlan{seg, primary, nested};
    }
    if (arc_up_in_view(src, seg.tail, seg.head)) return SegmentPlan{seg, {seg.tail, seg.head}, nullptr};
    auto path = shortest_path(
        g_, seg.tail, seg.head, [&](Arc a) { return arc_up_in_view(src, a.tail, a.head); },
        [&](Vertex x) { return !members.contains(x); });
    if (path) return SegmentPlan{seg, *path, nullptr};
    return std::nullopt;
  }

  // Plan over `order`, or the first segment that cannot be routed.
  std::variant<ChainPlan, Arc> build_plan(Vertex src, const std::vector<Vertex>& order) const {
    Chain chain(order);
    const std::set<Vertex> members(order.begin(), order.end());
    ChainPlan plan{chain, {}};
    for (const Arc& seg : chain.segments()) {
      auto sp = route_segment(src, seg, members);
      if (!sp) return seg;
      plan.segments.push_back(std::move(*sp));
    }
    return plan;
  }

  std::optional<ChainPlan> shrink_to_feasible(Vertex src, std::vector<Vertex> order) const {
    while (true) {
      auto built = build_plan(src, order);
      if (auto* plan = std::get_if<ChainPlan>(&built)) return std::move(*plan);
      if (order.size() <= 2) return std::nullopt;
      const Arc bad = std::get<Arc>(built);
      Vertex victim = bad.tail != src ? bad.tail : bad.head;
      if (victim == s_.destination) victim = order[order.size() - 2];
      order.erase(std::find(order.begin(), order.end(), victim));
    }
  }

  std::optional<ChainPlan> plan_from_preferences(Vertex src) const {
    const auto prefs = s_.prefs_for(src);
    if (prefs.empty()) return std::nullopt;
    std::vector<Vertex> order =
        prefs.front().wildcard ? std::vector<Vertex>{src, prefs.front().via, s_.destination} : prefs.front().path;
    auto plan = shrink_to_feasible(src, order);
    if (!plan) return std::nullopt;
    order = plan->chain.order();
    for (std::size_t i = 1; i < prefs.size(); ++i) {
      const Vertex hop = prefs[i].first_hop();
      if (hop == s_.destination || std::find(order.begin(), order.end(), hop) != order.end()) continue;
      if (order.size() + 1 > kMaxChainSize) break;
      for (std::size_t pos = 1; pos < order.size(); ++pos) {
        auto candidate = order;
        candidate.insert(candidate.begin() + static_cast<std::ptrdiff_t>(pos), hop);
        auto built = build_plan(src, candidate);
        if (auto* p = std::get_if<ChainPlan>(&built)) {
          plan = std::move(*p);
          order = std::move(candidate);
          break;
        }
      }
    }
    return plan;
  }

  std::string chain_id(const ChainPlan& plan) const {
    return make_structure_id(g_, StructureKind::chain, plan.chain.order(), 0);
  }

  Vertex pick_source() const {
    for (Vertex v : pending_) {
      const auto prefs = s_.prefs_for(v);
      if (prefs.empty()) return v;
      const Vertex hop = prefs.front().first_hop();
      const bool hop_busy = pending_.contains(hop) || (current_ && current_->source == hop);
      if (hop == s_.destination || !sources_.contains(hop) || !hop_busy) return v;
    }
    return *pending_.begin();
  }

  void pipeline() {
    if (current_) {
      if (current_->start_at == t_) start_proposal();
      else if (current_->decide_at && *current_->decide_at == t_) decide();
    }
    if (current_ || pending_.empty() || t_ < next_start_) return;
    const Vertex src = pick_source();
    pending_.erase(src);
    auto plan = plan_from_preferences(src);
    if (!plan) {
      trace(L(src), "chain_rejected", "no feasible chain");
      ++res_.chains_rejected;
      next_start_ = t_ + 1;
      return;
    }
    const std::string id = chain_id(*plan);
    for (const HeldChain& hc : nodes_[src].chains)
      if (hc.id == id) {
        next_start_ = t_ + 1;
        return;
      }
    current_.emplace();
    current_->source = src;
    current_->plan = std::make_shared<const ChainPlan>(std::move(*plan));
    current_->id = id;
    current_->start_at = t_;
    current_->tried.insert(id);
    start_proposal();
  }

  void start_proposal() {
    const auto& order = current_->plan->chain.order();
    if (order.size() <= 2) {
      establish(0);
      return;
    }
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      Message m;
      m.from = current_->source;
      m.to = order[i];
      m.kind = MsgKind::request;
      m.chain_id = current_->id;
      send(std::move(m), 1);
    }
    current_->decide_at = t_ + 2;
  }

  void decide() {
    const auto& order = current_->plan->chain.order();
    const std::size_t mids = order.size() - 2;
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      auto it = current_->replies.find(order[i]);
      if (it != current_->replies.end() && it->second.accept) continue;
      reject(order[i], it == current_->replies.end() ? Path{} : it->second.cycle);
      return;
    }
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      Message m;
      m.from = current_->source;
      m.to = order[i];
      m.kind = MsgKind::confirm;
      m.chain_id = current_->id;
      send(std::move(m), 1);
    }
    establish(3 * mids);
  }

  void establish(std::size_t messages) {
    const Proposal& p = *current_;
    const auto bundle = build_chain_structures(g_, *p.plan, 0);
    std::set<Vertex> members(p.plan->chain.order().begin(), p.plan->chain.order().end());
    for (const Arc& a : p.plan->implied_pairs()) {
      members.insert(a.tail);
      members.insert(a.head);
    }
    for (Vertex m : members)
      if (nodes_[m].up) nodes_[m].store->register_structures(bundle);
    Node& src = nodes_[p.source];
    src.chains.push_back({p.id, p.plan, {}});
    const bool standby = src.active.has_value();
    if (!standby) src.active = src.chains.size() - 1;
    ++res_.chains_established;
    trace(L(p.source), "chain_established",
          p.id + " messages=" + std::to_string(messages) + (standby ? " standby" : " active"));
    current_.reset();
    next_start_ = t_ + 1;
  }

  void reject(Vertex by, const Path& cycle) {
    ++res_.chains_rejected;
    trace(L(current_->source), "chain_rejected",
          current_->id + " by " + L(by) + (cycle.empty() ? "" : " cycle " + cycle_text(g_, cycle)));
    const Vertex src = current_->source;
    std::vector<Vertex> order = current_->plan->chain.order();
    auto droppable = [&](Vertex v) {
      return v != src && v != s_.destination && std::find(cycle.begin(), cycle.end(), v) != cycle.end();
    };
    std::vector<Vertex> reduced;
    for (Vertex v : order)
      if (!droppable(v)) reduced.push_back(v);
    if (reduced.size() == order.size()) reduced.erase(std::find(reduced.begin(), reduced.end(), by));

    auto plan = shrink_to_feasible(src, reduced);
    if (!plan || current_->tried.contains(chain_id(*plan))) {
      current_.reset();
      next_start_ = t_ + 1;
      return;
    }
    current_->id = chain_id(*plan);
    current_->plan = std::make_shared<const ChainPlan>(std::move(*plan));
    current_->tried.insert(current_->id);
    current_->replies.clear();
    current_->decide_at.reset();
    current_->start_at = t_ + 1;
  }

  // -- loops and state ------------------------------------------------------

  void check_loop() {
    Digraph fwd(g_.labels());
    for (Vertex v = 0; v < g_.size(); ++v) {
      if (!nodes_[v].up) continue;
      if (s_.mode == Mode::baseline) {
        if (nodes_[v].selected && nodes_[v].selected->size() >= 2) fwd.add_arc(v, (*nodes_[v].selected)[1]);
      } else {
        for (const Path& p : nodes_[v].routes)
          for (const Arc& a : path_arcs(p)) fwd.add_arc(a.tail, a.head);
      }
    }
    if (Path cycle = detect_loop(fwd); !cycle.empty()) {
      res_.loop_ticks.push_back(t_);
      trace("-", "loop_detected", cycle_text(g_, cycle));
    }
  }

  std::string snapshot() const {
    std::ostringstream os;
    for (Vertex v = 0; v < g_.size(); ++v) {
      const Node& n = nodes_[v];
      os << v << (n.up ? '+' : '-') << (n.selected ? g_.format_path(*n.selected) : "~") << '|' << n.selection << '|';
      for (const auto& [k, p] : n.rib_in) os << k << ':' << g_.format_path(p) << ',';
      os << '|';
      for (const auto& [k, e] : n.view) os << k << (e.up ? '+' : '-') << e.known << e.origin_time << '/' << e.sender << ',';
      os << '|' << n.seen.size() << '|' << n.store->size() << '|' << (n.active ? static_cast<long>(*n.active) : -1L);
      for (const HeldChain& hc : n.chains) {
        os << hc.id << '{';
        for (const auto& [a, st] : hc.status.state) os << a.tail << '.' << a.head << '=' << static_cast<int>(st) << ';';
        os << '}';
      }
      os << '\n';
    }
    std::vector<const Message*> msgs;
    for (const Message& m : inflight_) msgs.push_back(&m);
    std::sort(msgs.begin(), msgs.end(), [](const Message* a, const Message* b) { return a->seq < b->seq; });
    for (const Message* m : msgs) os << (m->deliver - t_) << ' ' << m->from << ' ' << m->to << ' ' << describe(*m) << '\n';
    os << "pending";
    for (Vertex v : pending_) os << ' ' << v;
    if (current_) os << " current " << current_->id;
    return os.str();
  }

  const Scenario& s_;
  const Digraph& g_;
  SimOptions opt_;
  SimResult res_;
  std::vector<Node> nodes_;
  std::set<std::pair<Vertex, Vertex>> down_links_;
  std::vector<Message> inflight_;
  std::uint64_t seq_ = 0;
  unsigned t_ = 0;
  unsigned last_event_ = 0;
  std::set<Vertex> sources_;
  std::set<Vertex> pending_;
  std::optional<Proposal> current_;
  unsigned next_start_ = 0;
};

}  // namespace

SimResult run(const Scenario& scn, const SimOptions& options) { return Sim(scn, options).run(); }

std::string render_trace(const Scenario& scn, const SimResult& r) {
  std::ostringstream out;
  out << "# scenario " << (scn.name.empty() ? "-" : scn.name) << " mode " << to_string(scn.mode) << " timestamping "
      << (scn.timestamping ? "on" : "off") << " destination " << scn.graph.label(scn.destination) << '\n';
  if (scn.mode == Mode::chain) out << "# chains are re-planned only after a topology change reaches the source\n";
  out << "# tick actor kind detail\n";
  for (const TraceRecord& rec : r.trace) {
    out << rec.tick << ' ' << rec.actor << ' ' << rec.kind;
    if (!rec.detail.empty()) out << ' ' << rec.detail;
    out << '\n';
  }
  out << "# summary " << to_string(r.outcome) << " tick " << r.tick;
  if (r.oscillation_tick) out << " period " << r.period;
  out << " stale_ignored " << r.stale_ignored << " loops " << r.loop_ticks.size() << '\n';
  for (const auto& [v, route] : r.final_routes) out << "# final " << scn.graph.label(v) << ' ' << route << '\n';
  return out.str();
}

}  // namespace chainroute
