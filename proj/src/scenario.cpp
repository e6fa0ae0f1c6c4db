#include "chainroute/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "chainroute/errors.hpp"

namespace chainroute {

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::fail_link: return "fail_link";
    case EventKind::recover_link: return "recover_link";
    case EventKind::fail_node: return "fail_node";
    case EventKind::recover_node: return "recover_node";
  }
  return "fail_link";
}

const char* to_string(Mode mode) noexcept { return mode == Mode::chain ? "chain" : "baseline"; }

std::string RoutePref::text(const Digraph& names) const {
  return wildcard ? "via " + names.label(via) + " X" : names.format_path(path);
}

unsigned Scenario::delay(Vertex from, Vertex to) const {
  auto it = delays.find({from, to});
  return it == delays.end() ? 1 : it->second;
}

std::vector<RoutePref> Scenario::prefs_for(Vertex v) const {
  if (auto it = preferences.find(v); it != preferences.end()) return it->second;
  std::vector<RoutePref> prefs;
  if (v == destination) return prefs;
  if (graph.has_arc(v, destination)) prefs.push_back({false, {v, destination}, 0});
  for (Vertex n : graph.out_neighbors(v))
    if (n != destination) prefs.push_back({true, {}, n});
  return prefs;
}

std::vector<Vertex> Scenario::neighbors(Vertex v) const {
  std::set<Vertex> all(graph.out_neighbors(v).begin(), graph.out_neighbors(v).end());
  all.insert(graph.in_neighbors(v).begin(), graph.in_neighbors(v).end());
  return {all.begin(), all.end()};
}

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

class Parser {
 public:
  explicit Parser(std::filesystem::path base) : base_(std::move(base)) {}

  Scenario run(std::istream& in) {
    read_sections(in);
    for (const auto& [name, first] : header_line_)
      if (!known(name)) throw ScenarioError(name, first, "unknown section");
    Scenario s;
    parse_graph(s);
    parse_destination(s);
    parse_preferences(s);
    parse_delays(s);
    parse_events(s);
    parse_mode(s);
    parse_timestamping(s);
    return s;
  }

 private:
  static bool known(const std::string& name) {
    static const std::set<std::string> names{"graph", "destination", "preferences", "delays",
                                             "events", "mode", "timestamping"};
    return names.contains(name);
  }

  void read_sections(std::istream& in) {
    std::string raw, current;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::string text = trim(raw);
      if (text.empty()) continue;
      if (text.front() == '[') {
        const auto close = text.find(']');
        if (close == std::string::npos) throw ScenarioError(current.empty() ? "-" : current, number, "unclosed section header");
        current = trim(std::string_view(text).substr(1, close - 1));
        if (header_line_.contains(current)) throw ScenarioError(current, number, "section repeated");
        header_line_[current] = number;
        sections_[current];
        std::string rest = trim(std::string_view(text).substr(close + 1));
        if (!rest.empty()) sections_[current].push_back({number, rest});
        continue;
      }
      if (current.empty()) throw ScenarioError("-", number, "content before the first section header");
      sections_[current].push_back({number, text});
    }
  }

  const std::vector<Line>& section(const std::string& name) {
    static const std::vector<Line> none;
    auto it = sections_.find(name);
    return it == sections_.end() ? none : it->second;
  }

  Vertex vertex(const Scenario& s, const std::string& sec, std::size_t line, const std::string& label) {
    if (auto v = s.graph.find(label)) return *v;
    throw ScenarioError(sec, line, "unknown vertex '" + label + "'");
  }

  const Line& single(const std::string& name, bool required) {
    const auto& lines = section(name);
    if (lines.empty()) {
      if (required) throw ScenarioError(name, header_line_.contains(name) ? header_line_[name] : 0, "section missing or empty");
      static const Line empty{0, {}};
      return empty;
    }
    if (lines.size() > 1) throw ScenarioError(name, lines[1].number, "expected a single value");
    return lines.front();
  }

  void parse_graph(Scenario& s) {
    const auto& lines = section("graph");
    if (lines.empty()) throw ScenarioError("graph", header_line_.contains("graph") ? header_line_["graph"] : 0,
                                           "section missing or empty");
    if (lines.front().text.starts_with("file ")) {
      if (lines.size() > 1) throw ScenarioError("graph", lines[1].number, "unexpected content after 'file'");
      const auto path = base_ / trim(std::string_view(lines.front().text).substr(5));
      std::ifstream f(path);
      if (!f) throw ScenarioError("graph", lines.front().number, "cannot open " + path.string());
      try {
        s.graph = parse_adjacency(f, Role::destination);
      } catch (const ParseError& e) {
        throw ScenarioError("graph", lines.front().number, path.filename().string() + ": " + e.what());
      }
      return;
    }
    std::string text;
    for (const Line& l : lines) text += l.text + '\n';
    try {
      s.graph = parse_adjacency_text(text, Role::destination);
    } catch (const ParseError& e) {
      const std::size_t at = e.line() >= 1 && e.line() <= lines.size() ? lines[e.line() - 1].number
                                                                       : lines.back().number;
      throw ScenarioError("graph", at, e.what());
    }
  }

  void parse_destination(Scenario& s) {
    const Line& l = single("destination", true);
    s.destination = vertex(s, "destination", l.number, l.text);
  }

  RoutePref parse_route(const Scenario& s, Vertex node, const Line& l, const std::string& text) {
    const auto w = words(text);
    RoutePref r;
    if (!w.empty() && w[0] == "via") {
      if (w.size() != 3 || w[2] != "X") throw ScenarioError("preferences", l.number, "expected 'via <neighbor> X'");
      r.wildcard = true;
      r.via = vertex(s, "preferences", l.number, w[1]);
      if (!s.graph.has_arc(node, r.via))
        throw ScenarioError("preferences", l.number, "'" + w[1] + "' is not an out-neighbour of " + s.graph.label(node));
      if (r.via == s.destination) throw ScenarioError("preferences", l.number, "wildcard through the destination");
      return r;
    }
    if (w.size() != 1) throw ScenarioError("preferences", l.number, "malformed route '" + text + "'");
    std::istringstream parts(w[0]);
    for (std::string label; std::getline(parts, label, '-');) r.path.push_back(vertex(s, "preferences", l.number, label));
    if (r.path.size() < 2 || r.path.front() != node || r.path.back() != s.destination)
      throw ScenarioError("preferences", l.number,
                          "route '" + w[0] + "' must start at " + s.graph.label(node) + " and end at the destination");
    auto sorted = r.path;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ScenarioError("preferences", l.number, "route '" + w[0] + "' repeats a vertex");
    for (std::size_t i = 1; i < r.path.size(); ++i)
      if (!s.graph.has_arc(r.path[i - 1], r.path[i]))
        throw ScenarioError("preferences", l.number, "route '" + w[0] + "' uses a missing arc");
    return r;
  }

  void parse_preferences(Scenario& s) {
    for (const Line& l : section("preferences")) {
      const auto colon = l.text.find(':');
      if (colon == std::string::npos) throw ScenarioError("preferences", l.number, "expected 'node: route > route ...'");
      const Vertex node = vertex(s, "preferences", l.number, trim(std::string_view(l.text).substr(0, colon)));
      if (node == s.destination) throw ScenarioError("preferences", l.number, "the destination has no preferences");
      if (s.preferences.contains(node)) throw ScenarioError("preferences", l.number, "node listed twice");
      std::vector<RoutePref> prefs;
      std::string rest = l.text.substr(colon + 1);
      std::size_t start = 0;
      while (true) {
        const auto gt = rest.find('>', start);
        std::string piece = trim(std::string_view(rest).substr(start, gt == std::string::npos ? std::string::npos : gt - start));
        if (piece.empty()) throw ScenarioError("preferences", l.number, "empty route");
        RoutePref r = parse_route(s, node, l, piece);
        if (std::find(prefs.begin(), prefs.end(), r) != prefs.end())
          throw ScenarioError("preferences", l.number, "route listed twice (preferences must be strict)");
        prefs.push_back(std::move(r));
        if (gt == std::string::npos) break;
        start = gt + 1;
      }
      s.preferences[node] = std::move(prefs);
    }
  }

  void parse_delays(Scenario& s) {
    for (const Line& l : section("delays")) {
      const auto w = words(l.text);
      if (w.size() != 3) throw ScenarioError("delays", l.number, "expected '<from> <to> <ticks>'");
      const Vertex a = vertex(s, "delays", l.number, w[0]);
      const Vertex b = vertex(s, "delays", l.number, w[1]);
      if (!s.linked(a, b)) throw ScenarioError("delays", l.number, "no link between " + w[0] + " and " + w[1]);
      unsigned ticks = 0;
      try {
        std::size_t used = 0;
        const long v = std::stol(w[2], &used);
        if (used != w[2].size() || v < 1) throw std::invalid_argument("range");
        ticks = static_cast<unsigned>(v);
      } catch (const std::logic_error&) {
        throw ScenarioError("delays", l.number, "delay must be an integer >= 1");
      }
      s.delays[{a, b}] = ticks;
    }
  }

  void parse_events(Scenario& s) {
    for (const Line& l : section("events")) {
      const auto w = words(l.text);
      if (w.size() < 3 || !w[0].starts_with("t="))
        throw ScenarioError("events", l.number, "expected 't=<int> <event> <args>'");
      TimedEvent e;
      try {
        std::size_t used = 0;
        const long t = std::stol(w[0].substr(2), &used);
        if (used != w[0].size() - 2 || t < 0) throw std::invalid_argument("range");
        e.tick = static_cast<unsigned>(t);
      } catch (const std::logic_error&) {
        throw ScenarioError("events", l.number, "event time must be a non-negative integer");
      }
      const std::string& kind = w[1];
      if (kind == "fail_link" || kind == "recover_link") {
        if (w.size() != 4) throw ScenarioError("events", l.number, kind + " takes two vertices");
        e.kind = kind == "fail_link" ? EventKind::fail_link : EventKind::recover_link;
        e.a = vertex(s, "events", l.number, w[2]);
        e.b = vertex(s, "events", l.number, w[3]);
        if (!s.linked(e.a, e.b)) throw ScenarioError("events", l.number, "no link between " + w[2] + " and " + w[3]);
      } else if (kind == "fail_node" || kind == "recover_node") {
        if (w.size() != 3) throw ScenarioError("events", l.number, kind + " takes one vertex");
        e.kind = kind == "fail_node" ? EventKind::fail_node : EventKind::recover_node;
        e.a = e.b = vertex(s, "events", l.number, w[2]);
      } else {
        throw ScenarioError("events", l.number, "unknown event '" + kind + "'");
      }
      s.events.push_back(e);
    }
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const TimedEvent& x, const TimedEvent& y) { return x.tick < y.tick; });
  }

  void parse_mode(Scenario& s) {
    const Line& l = single("mode", false);
    if (l.text.empty() || l.text == "baseline") s.mode = Mode::baseline;
    else if (l.text == "chain") s.mode = Mode::chain;
    else throw ScenarioError("mode", l.number, "expected 'baseline' or 'chain'");
  }

  void parse_timestamping(Scenario& s) {
    const Line& l = single("timestamping", false);
    if (l.text.empty() || l.text == "off") s.timestamping = false;
    else if (l.text == "on") s.timestamping = true;
    else throw ScenarioError("timestamping", l.number, "expected 'on' or 'off'");
  }

  std::filesystem::path base_;
  std::map<std::string, std::vector<Line>> sections_;
  std::map<std::string, std::size_t> header_line_;
};

}  // namespace

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  return Parser(base_dir).run(in);
}

Scenario parse_scenario_text(std::string_view text, const std::filesystem::path& base_dir) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in, base_dir);
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError("-", 0, "cannot open " + file.string());
  Scenario s = parse_scenario(in, file.parent_path());
  s.name = file.stem().string();
  return s;
}

}  // namespace chainroute
