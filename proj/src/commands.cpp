#include "chainroute/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "chainroute/digraph.hpp"
#include "chainroute/discovery.hpp"
#include "chainroute/errors.hpp"
#include "chainroute/laws.hpp"
#include "chainroute/scenario.hpp"
#include "chainroute/simulator.hpp"

namespace chainroute {

namespace {

std::optional<Digraph> load_matrix(const std::filesystem::path& file, std::ostream& err) {
  std::ifstream in(file);
  if (!in) {
    err << "error: cannot open " << file.string() << '\n';
    return std::nullopt;
  }
  try {
    return parse_adjacency(in, Role::announcement);
  } catch (const ParseError& e) {
    err << "error: " << file.string() << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

bool emit(const std::string& text, const std::optional<std::filesystem::path>& file, std::ostream& out,
          std::ostream& err) {
  if (!file) {
    out << text;
    return true;
  }
  std::ofstream f(*file, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << file->string() << '\n';
    return false;
  }
  f << text;
  return true;
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  if (args.all_pairs == args.origin.has_value()) {
    err << "error: give exactly one of --origin or --all-pairs\n";
    return kExitInput;
  }
  if (args.format != "table" && args.format != "csv") {
    err << "error: --format must be table or csv\n";
    return kExitInput;
  }
  auto d = load_matrix(args.file, err);
  if (!d) return kExitInput;

  std::vector<Vertex> origins;
  if (args.all_pairs) {
    for (Vertex v = 0; v < d->size(); ++v) origins.push_back(v);
  } else if (auto v = d->find(*args.origin)) {
    origins.push_back(*v);
  } else {
    err << "error: unknown origin '" << *args.origin << "'; labels:";
    for (const auto& l : d->labels()) err << ' ' << l;
    err << '\n';
    return kExitInput;
  }

  std::vector<DiscoveryReport> reports;
  for (Vertex o : origins) {
    reports.push_back(build_report(*d, o));
    for (const auto& w : reports.back().warnings) err << "warning: origin " << d->label(o) << ": " << w << '\n';
  }
  const std::string text = args.format == "csv" ? render_csv(*d, reports) : render_table(*d, reports);
  return emit(text, args.out, out, err) ? kExitOk : kExitInput;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  Scenario scn;
  try {
    scn = load_scenario(args.file);
  } catch (const ScenarioError& e) {
    err << "error: " << args.file.string() << ": " << e.what() << '\n';
    return kExitInput;
  }
  const SimResult r = run(scn, {args.max_ticks, true});
  const std::string text = render_trace(scn, r);
  if (args.trace) {
    if (!emit(text, args.trace, out, err)) return kExitInput;
    out << "outcome " << to_string(r.outcome) << " tick " << r.tick << '\n';
  } else {
    out << text;
  }
  switch (r.outcome) {
    case Outcome::converged: return kExitOk;
    case Outcome::oscillation: return kExitOscillation;
    case Outcome::exhausted: return kExitExhausted;
  }
  return kExitExhausted;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  if (args.n_max < 2 || args.n_max > 10) {
    err << "error: --n-max must be within 2..10\n";
    return kExitInput;
  }
  const LawReport report = verify_laws(args.n_max, args.random, args.seed);
  out << render_law_report(report);
  return report.all_pass() ? kExitOk : 1;
}

int cmd_histogram(const HistogramArgs& args, std::ostream& out, std::ostream& err) {
  if (args.files.empty()) {
    err << "error: histogram needs at least one matrix file\n";
    return kExitInput;
  }
  if (args.format != "csv" && args.format != "text") {
    err << "error: --format must be csv or text\n";
    return kExitInput;
  }
  Histogram h;
  std::size_t parsed = 0;
  for (const auto& file : args.files) {
    auto d = load_matrix(file, err);
    if (!d) {
      err << "warning: skipping " << file.string() << '\n';
      continue;
    }
    ++parsed;
    const Vertex last = args.origin_all ? static_cast<Vertex>(d->size()) : 1;
    for (Vertex o = 0; o < last; ++o) h.add(build_report(*d, o));
  }
  if (parsed == 0) {
    err << "error: no input file could be parsed\n";
    return kExitInput;
  }
  const std::string text = args.format == "csv" ? render_histogram_csv(h) : render_histogram_text(h);
  return emit(text, args.out, out, err) ? kExitOk : kExitInput;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chain routing toolkit: chain discovery, routing dynamics and complete-order laws", "chainroute"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);

  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "Classify destinations by longest chain or structure");
  a->add_option("file", analyze.file, "Adjacency-matrix file")->required();
  auto* origin = a->add_option("--origin", analyze.origin, "Origin vertex label");
  auto* all = a->add_flag("--all-pairs", analyze.all_pairs, "Analyze every vertex as origin");
  origin->excludes(all);
  a->add_option("--format", analyze.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
  a->add_option("--out", analyze.out, "Write the report here instead of stdout");

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "Run a routing scenario");
  s->add_option("file", simulate.file, "Scenario file")->required();
  s->add_option("--max-ticks", simulate.max_ticks, "Tick budget");
  s->add_option("--trace", simulate.trace, "Write the event trace here");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check complete-order laws exhaustively");
  v->add_option("--n-max", verify.n_max, "Largest complete order to check (2..10)")->required();
  v->add_option("--random", verify.random, "Random relabellings per size");
  v->add_option("--seed", verify.seed, "Seed for --random");

  HistogramArgs histogram;
  auto* h = app.add_subcommand("histogram", "Chain-height frequency over many matrices");
  h->add_option("files", histogram.files, "Adjacency-matrix files");
  h->add_flag("--origin-all", histogram.origin_all, "Use every vertex as origin (default: first label)");
  h->add_option("--format", histogram.format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  h->add_option("--out", histogram.out, "Write the histogram here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (a->parsed()) return cmd_analyze(analyze, out, err);
  if (s->parsed()) return cmd_simulate(simulate, out, err);
  if (v->parsed()) return cmd_verify(verify, out, err);
  return cmd_histogram(histogram, out, err);
}

}  // namespace chainroute
