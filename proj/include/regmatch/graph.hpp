#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regmatch/rng.hpp"

namespace regmatch {

inline constexpr int kUnmatched = -1;

// d-regular bipartite (multi)graph in adjacency-array form. Rows are stored
// flat: row p occupies adjP[p*d .. p*d+d). adjQ is always materialized so
// both directions are O(1) per edge. Entry order within a row is arrival
// order; nothing may assume it is sorted.
struct BipartiteRegularGraph {
  int n = 0;
  int d = 0;
  bool multigraph = true;
  std::vector<int> adjP;  // n*d entries, Q indices
  std::vector<int> adjQ;  // n*d entries, P indices

  std::span<const int> row_p(int p) const {
    return {adjP.data() + static_cast<std::size_t>(p) * d,
            static_cast<std::size_t>(d)};
  }
  std::span<const int> row_q(int q) const {
    return {adjQ.data() + static_cast<std::size_t>(q) * d,
            static_cast<std::size_t>(d)};
  }
  long long edge_count() const { return static_cast<long long>(n) * d; }
};

// Builds a graph from flat P-side rows, deriving adjQ with a counting pass.
BipartiteRegularGraph make_graph(int n, int d, std::vector<int> adj_p,
                                 bool multigraph = true);

// nullopt if every invariant holds, otherwise the first violation found.
std::optional<std::string> validate(const BipartiteRegularGraph& g);

// Partial or perfect matching with both inverse arrays. slot_p[p] remembers
// which occurrence in row p is the matched edge; the walk needs this to
// exclude exactly one parallel copy at a supernode. -1 means "not recorded"
// (matchers that do not walk leave it unset).
struct Matching {
  std::vector<int> match_p;
  std::vector<int> match_q;
  std::vector<int> slot_p;
  int size = 0;

  Matching() = default;
  explicit Matching(int n_p, int n_q = -1)
      : match_p(n_p, kUnmatched),
        match_q(n_q < 0 ? n_p : n_q, kUnmatched),
        slot_p(n_p, -1) {}
};

std::optional<std::string> verify_matching(const BipartiteRegularGraph& g,
                                           const Matching& m,
                                           bool require_perfect);

// Union of d uniformly random permutations of [0,n). With simple=true,
// colliding rows are repaired by swapping entries between rows until no row
// repeats (at most 100*d attempts per row per permutation, then an error;
// only reachable for d close to n).
BipartiteRegularGraph gen_union_permutations(int n, int d, std::uint64_t seed,
                                             bool simple = false);

// Lower-bound instance family: partitions P1,P2,Q1,Q2 of size 2d, terminal t
// as left vertex 4d and terminal s as right vertex 4d, plus a hidden cross
// matching of size d from Q1 to P2. Everything else stays inside the
// (P1,Q1) and (P2,Q2) blocks.
struct CanonicalGraph {
  int d = 0;
  BipartiteRegularGraph graph;              // left = P + {t}, right = Q + {s}
  std::vector<std::pair<int, int>> hidden;  // (p in P2, q in Q1)

  int side() const { return 4 * d + 1; }
  int t_index() const { return 4 * d; }  // left side
  int s_index() const { return 4 * d; }  // right side
  bool in_p1(int p) const { return 0 <= p && p < 2 * d; }
  bool in_p2(int p) const { return 2 * d <= p && p < 4 * d; }
  bool in_q1(int q) const { return 0 <= q && q < 2 * d; }
  bool in_q2(int q) const { return 2 * d <= q && q < 4 * d; }
};

CanonicalGraph gen_canonical(int d, std::uint64_t seed);

// Structural check of the family shape on top of plain graph validation.
std::optional<std::string> validate_canonical(const CanonicalGraph& cg);

// Text formats (see README): graph files are "n d" then n rows of adjP and
// optionally n rows of adjQ; matching files are n lines "p q" or "p -1".
void write_graph(const BipartiteRegularGraph& g, const std::string& path);
BipartiteRegularGraph read_graph(const std::string& path);
void write_matching(const Matching& m, const std::string& path);
Matching read_matching(const std::string& path);

}  // namespace regmatch
