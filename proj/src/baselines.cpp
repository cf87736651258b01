#include "regmatch/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace regmatch {

BipartiteGraph BipartiteGraph::from_regular(const BipartiteRegularGraph& g) {
  BipartiteGraph bg;
  bg.n_p = g.n;
  bg.n_q = g.n;
  bg.adj.resize(g.n);
  for (int p = 0; p < g.n; ++p) {
    auto row = g.row_p(p);
    bg.adj[p].assign(row.begin(), row.end());
  }
  return bg;
}

Matching hopcroft_karp(const BipartiteGraph& g) {
  constexpr int kInf = std::numeric_limits<int>::max();
  Matching m(g.n_p, g.n_q);
  std::vector<int> dist(g.n_p);
  std::vector<int> queue(g.n_p);

  auto bfs = [&]() {
    int head = 0, tail = 0;
    for (int p = 0; p < g.n_p; ++p) {
      if (m.match_p[p] == kUnmatched) {
        dist[p] = 0;
        queue[tail++] = p;
      } else {
        dist[p] = kInf;
      }
    }
    bool reachable = false;
    while (head < tail) {
      const int p = queue[head++];
      for (int q : g.adj[p]) {
        const int p2 = m.match_q[q];
        if (p2 == kUnmatched) {
          reachable = true;
        } else if (dist[p2] == kInf) {
          dist[p2] = dist[p] + 1;
          queue[tail++] = p2;
        }
      }
    }
    return reachable;
  };

  // Iterative DFS along the BFS layering, with per-phase edge cursors.
  std::vector<std::size_t> iter(g.n_p);
  std::vector<int> stack;
  auto dfs = [&](int root) {
    stack.assign(1, root);
    while (!stack.empty()) {
      const int p = stack.back();
      if (iter[p] == g.adj[p].size()) {
        dist[p] = kInf;  // dead end; never retry this phase
        stack.pop_back();
        continue;
      }
      const int q = g.adj[p][iter[p]++];
      const int p2 = m.match_q[q];
      if (p2 == kUnmatched) {
        // Flip the path recorded on the stack.
        int carry = q;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
          const int prev = m.match_p[*it];
          m.match_p[*it] = carry;
          m.match_q[carry] = *it;
          carry = prev;
        }
        ++m.size;
        return true;
      }
      if (dist[p2] == dist[p] + 1) stack.push_back(p2);
    }
    return false;
  };

  while (bfs()) {
    std::fill(iter.begin(), iter.end(), std::size_t{0});
    for (int p = 0; p < g.n_p; ++p)
      if (m.match_p[p] == kUnmatched) dfs(p);
  }
  return m;
}

Matching hopcroft_karp(const BipartiteRegularGraph& g) {
  return hopcroft_karp(BipartiteGraph::from_regular(g));
}

std::pair<BipartiteRegularGraph, BipartiteRegularGraph> euler_split(
    const BipartiteRegularGraph& g) {
  if (g.d % 2 != 0)
    throw std::invalid_argument("euler_split: degree must be even");
  const int n = g.n;
  const int d = g.d;
  const long long m = g.edge_count();

  // Vertices 0..n-1 are P, n..2n-1 are Q. Edge e = p*d+i joins p and adjP[e].
  std::vector<int> inc_q(m);  // Q-side incidence, grouped per q
  {
    std::vector<int> fill(n, 0);
    for (long long e = 0; e < m; ++e) {
      const int q = g.adjP[e];
      inc_q[static_cast<long long>(q) * d + fill[q]++] = static_cast<int>(e);
    }
  }
  auto edge_p = [&](int e) { return e / d; };
  auto other = [&](int v, int e) {
    return v < n ? n + g.adjP[e] : edge_p(e);
  };

  std::vector<char> used(m, 0);
  std::vector<int> it(2 * n, 0);
  auto next_edge = [&](int v) -> int {
    // Scan v's incidence list from its cursor for an unused edge.
    if (v < n) {
      while (it[v] < d) {
        const int e = v * d + it[v];
        if (!used[e]) return e;
        ++it[v];
      }
    } else {
      const int q = v - n;
      while (it[v] < d) {
        const int e = inc_q[static_cast<long long>(q) * d + it[v]];
        if (!used[e]) return e;
        ++it[v];
      }
    }
    return -1;
  };

  // Tour the graph; each traversal move leaves a vertex exactly as often as
  // it enters it, so orienting edges by their traversal direction halves
  // every degree exactly.
  std::vector<std::vector<int>> half1(n), half2(n);
  std::vector<int> stack;
  for (int start = 0; start < 2 * n; ++start) {
    if (next_edge(start) < 0) continue;
    stack.assign(1, start);
    while (!stack.empty()) {
      const int v = stack.back();
      const int e = next_edge(v);
      if (e < 0) {
        stack.pop_back();
        continue;
      }
      used[e] = 1;
      const int p = edge_p(e);
      const int q = g.adjP[e];
      if (v < n)
        half1[p].push_back(q);  // traversed P -> Q
      else
        half2[p].push_back(q);  // traversed Q -> P
      stack.push_back(other(v, e));
    }
  }

  auto build = [&](std::vector<std::vector<int>>& rows) {
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(n) * (d / 2));
    for (int p = 0; p < n; ++p) {
      if (rows[p].size() != static_cast<std::size_t>(d / 2))
        throw std::logic_error("euler_split: tour did not halve a degree");
      flat.insert(flat.end(), rows[p].begin(), rows[p].end());
    }
    return make_graph(n, d / 2, std::move(flat), g.multigraph);
  };
  return {build(half1), build(half2)};
}

Matching euler_matching(const BipartiteRegularGraph& g) {
  if (g.d < 1 || (g.d & (g.d - 1)) != 0)
    throw std::invalid_argument("euler_matching: d is not a power of two");
  BipartiteRegularGraph cur = g;
  while (cur.d > 1) cur = euler_split(cur).first;
  Matching m(g.n);
  for (int p = 0; p < g.n; ++p) {
    const int q = cur.row_p(p)[0];
    m.match_p[p] = q;
    m.match_q[q] = p;
    m.slot_p[p] = -1;
  }
  m.size = g.n;
  return m;
}

}  // namespace regmatch
