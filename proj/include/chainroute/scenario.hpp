#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chainroute/digraph.hpp"

namespace chainroute {

/// One preference entry: an explicit path to the destination, or
/// `via n X`, any currently announced path through neighbour n.
struct RoutePref {
  bool wildcard = false;
  Path path;
  Vertex via = 0;

  Vertex first_hop() const { return wildcard ? via : path.at(1); }
  std::string text(const Digraph& names) const;

  friend bool operator==(const RoutePref&, const RoutePref&) = default;
};

enum class EventKind { fail_link, recover_link, fail_node, recover_node };

const char* to_string(EventKind kind) noexcept;

struct TimedEvent {
  unsigned tick = 0;
  EventKind kind = EventKind::fail_link;
  Vertex a = 0;
  /// Second endpoint for link events; equal to `a` for node events.
  Vertex b = 0;
};

enum class Mode { baseline, chain };

const char* to_string(Mode mode) noexcept;

struct Scenario {
  std::string name;
  /// Forwarding digraph: x->y means x may hand traffic to y.
  Digraph graph;
  Vertex destination = 0;
  /// Explicit preference lines, most preferred first.
  std::map<Vertex, std::vector<RoutePref>> preferences;
  /// Per-direction message latency; unlisted directions take 1 tick.
  std::map<Arc, unsigned> delays;
  /// Sorted by tick, file order within a tick.
  std::vector<TimedEvent> events;
  Mode mode = Mode::baseline;
  bool timestamping = false;

  unsigned delay(Vertex from, Vertex to) const;
  /// Explicit preferences, or the direct route (when that arc exists)
  /// followed by `via n X` for every other out-neighbour in label order.
  std::vector<RoutePref> prefs_for(Vertex v) const;
  /// Vertices sharing an arc with `v` in either direction, in label order.
  std::vector<Vertex> neighbors(Vertex v) const;
  bool linked(Vertex a, Vertex b) const { return graph.has_arc(a, b) || graph.has_arc(b, a); }
};

/// Parses and validates a scenario. `base_dir` resolves `file <path>` in the
/// [graph] section. Throws ScenarioError naming section and line.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario parse_scenario_text(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

}  // namespace chainroute
