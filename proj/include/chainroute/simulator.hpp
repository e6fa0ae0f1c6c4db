#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainroute/digraph.hpp"
#include "chainroute/scenario.hpp"

namespace chainroute {

struct TraceRecord {
  unsigned tick = 0;
  std::string actor;
  std::string kind;
  std::string detail;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class Outcome { converged, oscillation, exhausted };

const char* to_string(Outcome o) noexcept;

struct SimOptions {
  unsigned max_ticks = 1000;
  /// Stop at the first recurring state. When false the run continues to
  /// max_ticks and the outcome is exhausted unless it converges.
  bool stop_on_oscillation = true;
};

/// A node's belief about one subject (`node:v` or `link:a-b`).
struct ViewEntry {
  bool up = true;
  bool known = false;
  unsigned origin_time = 0;
  Vertex sender = 0;

  friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};

using View = std::map<std::string, ViewEntry>;

/// Event report flooded from the neighbours that detect a change.
struct EventReport {
  std::string subject;
  bool up = true;
  unsigned origin_time = 0;
  Vertex sender = 0;
};

enum class ViewUpdate { view_change, unchanged, duplicate, ignored_stale, tie_kept };

const char* to_string(ViewUpdate u) noexcept;

/// Applies `r` to `view`. With timestamping an older origin time is stale,
/// an equal time with the same status is a duplicate, and an equal time with
/// a different status keeps whichever sender has the lower vertex index.
/// Without timestamping any status different from the current view applies.
ViewUpdate apply_timestamped_view(View& view, const EventReport& r, bool timestamping);

/// Path-vector choice: the most preferred route whose first hop is usable
/// and whose continuation is exactly what that neighbour announced (`via n X`
/// takes any announcement not containing `node`). `rib_in` maps neighbour to
/// its announced path; the destination announces itself.
std::optional<Path> baseline_select(Vertex node, const std::vector<RoutePref>& prefs,
                                    const std::map<Vertex, Path>& rib_in,
                                    const std::function<bool(Vertex)>& hop_usable);

/// A directed cycle of the forwarding digraph, or empty.
Path detect_loop(const Digraph& forwarding);

struct SimResult {
  Outcome outcome = Outcome::exhausted;
  /// Last tick executed (0 when no tick ran).
  unsigned tick = 0;
  /// Recurrence period when an oscillation was found.
  unsigned period = 0;
  std::optional<unsigned> oscillation_tick;
  std::vector<TraceRecord> trace;
  /// Rendered final selection of every non-destination node.
  std::map<Vertex, std::string> final_routes;
  std::map<Vertex, View> views;
  std::size_t stale_ignored = 0;
  /// Ticks at which the forwarding digraph held a cycle.
  std::vector<unsigned> loop_ticks;
  std::size_t chains_established = 0;
  std::size_t chains_rejected = 0;
};

/// Runs the synchronous tick loop: deliver due messages, apply scripted
/// events, advance chain proposals (chain mode), reselect in label order,
/// check the forwarding digraph, then test for convergence or recurrence.
SimResult run(const Scenario& scn, const SimOptions& options = {});

/// Header comments, one `tick actor kind detail` line per record and a
/// summary footer.
std::string render_trace(const Scenario& scn, const SimResult& result);

}  // namespace chainroute
