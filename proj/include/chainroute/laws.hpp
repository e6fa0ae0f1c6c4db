#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace chainroute {

enum class LawStatus { pass, fail, not_applicable };

const char* to_string(LawStatus s) noexcept;

/// Law checks on the complete order of one size.
struct LawRow {
  std::size_t n = 0;
  LawStatus unique_ends = LawStatus::fail;     // single transmitter and receiver
  LawStatus disjoint_paths = LawStatus::fail;  // n-1 arc-disjoint paths
  LawStatus used_arcs = LawStatus::fail;       // 2n-3 arcs carry them
  LawStatus unused_arcs = LawStatus::fail;     // (n-2)(n-3)/2 left over
  LawStatus deletion = LawStatus::fail;        // every C - v is a complete order
  LawStatus growth = LawStatus::fail;          // growing needs exactly n arcs
  LawStatus growth_min = LawStatus::fail;      // and never fewer than 2
  /// Measured values: minimum arcs over maximum disjoint path systems, and
  /// the remainder.
  std::size_t used = 0;
  std::size_t unused = 0;

  bool all_pass() const;
};

struct LawReport {
  std::vector<LawRow> rows;
  /// Relabelled random checks run per size and how many failed.
  std::size_t random_checks = 0;
  std::size_t random_failures = 0;

  bool all_pass() const;
};

/// Exhaustive checks for n = 2..n_max (2 <= n_max <= 10). `random` extra
/// label permutations per size are checked with an mt19937_64 seeded by
/// `seed`.
LawReport verify_laws(std::size_t n_max, std::size_t random = 0, std::uint64_t seed = 1);

/// Minimum total arc count of a maximum set of arc-disjoint s->t paths
/// (unit-cost successive shortest paths), returned with the path count.
struct MinCostFlow {
  std::size_t paths = 0;
  std::size_t arcs = 0;
};

class Digraph;
MinCostFlow min_arc_disjoint_system(const Digraph& d, std::uint32_t source, std::uint32_t sink);

std::string render_law_report(const LawReport& report);

}  // namespace chainroute
