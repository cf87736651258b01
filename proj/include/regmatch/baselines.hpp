#pragma once

#include <utility>
#include <vector>

#include "regmatch/graph.hpp"

namespace regmatch {

// Irregular bipartite graph as plain adjacency lists, P -> Q. Used where the
// oracle matchers must accept non-regular inputs (e.g. the support of a
// doubly stochastic matrix).
struct BipartiteGraph {
  int n_p = 0;
  int n_q = 0;
  std::vector<std::vector<int>> adj;

  static BipartiteGraph from_regular(const BipartiteRegularGraph& g);
};

// Maximum matching; perfect on valid d-regular inputs.
Matching hopcroft_karp(const BipartiteGraph& g);
Matching hopcroft_karp(const BipartiteRegularGraph& g);

// Orients an Euler tour of the (even-degree) graph; edges traversed P->Q and
// Q->P form two edge-disjoint d/2-regular halves.
std::pair<BipartiteRegularGraph, BipartiteRegularGraph> euler_split(
    const BipartiteRegularGraph& g);

// Repeated halving down to a 1-regular graph, which is the matching.
// Requires d to be a power of two.
Matching euler_matching(const BipartiteRegularGraph& g);

}  // namespace regmatch
