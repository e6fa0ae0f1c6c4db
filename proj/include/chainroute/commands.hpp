#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chainroute {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitOscillation = 3;
inline constexpr int kExitExhausted = 4;

struct AnalyzeArgs {
  std::filesystem::path file;
  std::optional<std::string> origin;
  bool all_pairs = false;
  std::string format = "table";
  std::optional<std::filesystem::path> out;
};

struct SimulateArgs {
  std::filesystem::path file;
  unsigned max_ticks = 1000;
  std::optional<std::filesystem::path> trace;
};

struct VerifyArgs {
  std::size_t n_max = 7;
  std::size_t random = 0;
  std::uint64_t seed = 1;
};

struct HistogramArgs {
  std::vector<std::filesystem::path> files;
  bool origin_all = false;
  std::string format = "csv";
  std::optional<std::filesystem::path> out;
};

// Each command writes results to `out` (or the --out/--trace file) and
// diagnostics to `err`, and returns the process exit code.
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_histogram(const HistogramArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Unknown flags and usage errors exit 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chainroute
