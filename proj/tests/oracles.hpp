#pragma once

// Brute-force references used to cross-check the library. They work on a
// plain boolean matrix so they share no code with Digraph's algorithms.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chainroute/digraph.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<bool>>;

inline Matrix matrix_of(const chainroute::Digraph& d) {
  const std::size_t n = d.size();
  Matrix m(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = d.has_arc(static_cast<chainroute::Vertex>(i), static_cast<chainroute::Vertex>(j));
  return m;
}

// Warshall closure.
inline Matrix closure(Matrix m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (m[k][j]) m[i][j] = true;
  return m;
}

inline bool acyclic(const Matrix& m) {
  const Matrix c = closure(m);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (c[i][i]) return false;
  return true;
}

inline bool reaches(const Matrix& m, std::size_t a, std::size_t b) { return a == b || closure(m)[a][b]; }

// Irreflexive, asymmetric, transitive and complete, checked pair by pair.
inline bool complete_order(const Matrix& m) {
  const std::size_t n = m.size();
  if (n < 2) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][i]) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (m[i][j] == m[j][i]) return false;
      for (std::size_t k = 0; k < n; ++k)
        if (m[i][j] && m[j][k] && k != i && !m[i][k]) return false;
    }
  }
  return true;
}

// Minimum s-t arc cut by enumerating every vertex bipartition. By Menger this
// equals the maximum number of arc-disjoint s-t paths. Fine up to ~16 vertices.
inline std::size_t min_cut(const Matrix& m, std::size_t s, std::size_t t) {
  const std::size_t n = m.size();
  std::vector<std::size_t> free;
  for (std::size_t v = 0; v < n; ++v)
    if (v != s && v != t) free.push_back(v);
  std::size_t best = SIZE_MAX;
  for (std::uint32_t mask = 0; mask < (1u << free.size()); ++mask) {
    std::vector<bool> side(n, false);
    side[s] = true;
    for (std::size_t i = 0; i < free.size(); ++i)
      if (mask & (1u << i)) side[free[i]] = true;
    std::size_t cut = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i][j] && side[i] && !side[j]) ++cut;
    if (cut < best) best = cut;
  }
  return best;
}

// Every simple path from s to t.
inline void simple_paths(const Matrix& m, std::size_t at, std::size_t t, std::vector<std::size_t>& stack,
                         std::vector<bool>& on, std::vector<std::vector<std::size_t>>& out) {
  if (at == t) {
    out.push_back(stack);
    return;
  }
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (!m[at][j] || on[j]) continue;
    on[j] = true;
    stack.push_back(j);
    simple_paths(m, j, t, stack, on, out);
    stack.pop_back();
    on[j] = false;
  }
}

inline std::vector<std::vector<std::size_t>> all_simple_paths(const Matrix& m, std::size_t s, std::size_t t) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack{s};
  std::vector<bool> on(m.size(), false);
  on[s] = true;
  simple_paths(m, s, t, stack, on, out);
  return out;
}

// Random DAG: arcs only go from lower to higher rank under a shuffled ranking.
inline chainroute::Digraph random_dag(std::mt19937_64& rng, std::size_t n, double density) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  chainroute::Digraph d(labels, chainroute::Role::announcement);
  std::vector<chainroute::Vertex> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = static_cast<chainroute::Vertex>(i);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::bernoulli_distribution coin(density);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) d.add_arc(rank[i], rank[j]);
  return d;
}

}  // namespace oracle
