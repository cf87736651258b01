#include "regmatch/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace regmatch {

namespace {

std::vector<int> derive_adj_q(int n, int d, const std::vector<int>& adj_p) {
  std::vector<int> counts(n, 0);
  for (int q : adj_p) {
    if (q < 0 || q >= n) throw std::invalid_argument("adjacency index out of range");
    ++counts[q];
  }
  for (int q = 0; q < n; ++q)
    if (counts[q] != d)
      throw std::invalid_argument("Q-side vertex " + std::to_string(q) +
                                  " has degree " + std::to_string(counts[q]) +
                                  ", expected " + std::to_string(d));
  std::vector<int> fill(n, 0);
  std::vector<int> adj_q(adj_p.size());
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < d; ++i) {
      int q = adj_p[static_cast<std::size_t>(p) * d + i];
      adj_q[static_cast<std::size_t>(q) * d + fill[q]++] = p;
    }
  return adj_q;
}

}  // namespace

BipartiteRegularGraph make_graph(int n, int d, std::vector<int> adj_p,
                                 bool multigraph) {
  if (n < 0 || d < 0) throw std::invalid_argument("make_graph: negative n or d");
  if (adj_p.size() != static_cast<std::size_t>(n) * d)
    throw std::invalid_argument("make_graph: adjacency size is not n*d");
  BipartiteRegularGraph g;
  g.n = n;
  g.d = d;
  g.multigraph = multigraph;
  g.adjQ = derive_adj_q(n, d, adj_p);
  g.adjP = std::move(adj_p);
  return g;
}

std::optional<std::string> validate(const BipartiteRegularGraph& g) {
  if (g.n < 0 || g.d < 0) return "negative n or d";
  const std::size_t m = static_cast<std::size_t>(g.n) * g.d;
  if (g.adjP.size() != m)
    return "adjP holds " + std::to_string(g.adjP.size()) +
           " entries, expected n*d = " + std::to_string(m);
  if (g.adjQ.size() != m)
    return "adjQ holds " + std::to_string(g.adjQ.size()) +
           " entries, expected n*d = " + std::to_string(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (g.adjP[i] < 0 || g.adjP[i] >= g.n)
      return "adjP[" + std::to_string(i / g.d) + "][" + std::to_string(i % g.d) +
             "] = " + std::to_string(g.adjP[i]) + " out of range";
    if (g.adjQ[i] < 0 || g.adjQ[i] >= g.n)
      return "adjQ[" + std::to_string(i / g.d) + "][" + std::to_string(i % g.d) +
             "] = " + std::to_string(g.adjQ[i]) + " out of range";
  }
  if (!g.multigraph) {
    std::vector<int> row(g.d);
    for (int p = 0; p < g.n; ++p) {
      auto r = g.row_p(p);
      row.assign(r.begin(), r.end());
      std::sort(row.begin(), row.end());
      if (std::adjacent_find(row.begin(), row.end()) != row.end())
        return "adjP row " + std::to_string(p) + " repeats an index (graph not simple)";
    }
  }
  // Edge multiset symmetry: occurrences of q in adjP row p must equal
  // occurrences of p in adjQ row q. One counting pass per Q vertex.
  std::vector<std::vector<int>> expected(g.n);
  for (auto& v : expected) v.reserve(g.d);
  for (int p = 0; p < g.n; ++p)
    for (int q : g.row_p(p)) expected[q].push_back(p);
  std::vector<int> scratch(g.n, 0);
  for (int q = 0; q < g.n; ++q) {
    if (expected[q].size() != static_cast<std::size_t>(g.d))
      return "Q-side vertex " + std::to_string(q) + " has degree " +
             std::to_string(expected[q].size()) + " in adjP, expected " +
             std::to_string(g.d);
    for (int p : expected[q]) ++scratch[p];
    bool ok = true;
    for (int p : g.row_q(q))
      if (--scratch[p] < 0) ok = false;
    for (int p : expected[q]) scratch[p] = 0;  // reset the touched cells
    for (int p : g.row_q(q)) scratch[p] = 0;
    if (!ok) return "edge multiset symmetry broken at q = " + std::to_string(q);
  }
  return std::nullopt;
}

std::optional<std::string> verify_matching(const BipartiteRegularGraph& g,
                                           const Matching& m,
                                           bool require_perfect) {
  if (m.match_p.size() != static_cast<std::size_t>(g.n) ||
      m.match_q.size() != static_cast<std::size_t>(g.n))
    return "matching arrays do not match graph size";
  int matched = 0;
  for (int p = 0; p < g.n; ++p) {
    int q = m.match_p[p];
    if (q == kUnmatched) continue;
    if (q < 0 || q >= g.n)
      return "match_p[" + std::to_string(p) + "] out of range";
    if (m.match_q[q] != p)
      return "inverse mismatch: match_p[" + std::to_string(p) + "] = " +
             std::to_string(q) + " but match_q[" + std::to_string(q) + "] = " +
             std::to_string(m.match_q[q]);
    auto row = g.row_p(p);
    if (std::find(row.begin(), row.end(), q) == row.end())
      return "matched pair (" + std::to_string(p) + "," + std::to_string(q) +
             ") is not an edge";
    if (p < static_cast<int>(m.slot_p.size()) && m.slot_p[p] >= 0) {
      if (m.slot_p[p] >= g.d || row[m.slot_p[p]] != q)
        return "slot_p[" + std::to_string(p) + "] does not point at the matched edge";
    }
    ++matched;
  }
  for (int q = 0; q < g.n; ++q) {
    int p = m.match_q[q];
    if (p == kUnmatched) continue;
    if (p < 0 || p >= g.n) return "match_q[" + std::to_string(q) + "] out of range";
    if (m.match_p[p] != q)
      return "inverse mismatch: match_q[" + std::to_string(q) + "] = " +
             std::to_string(p) + " but match_p[" + std::to_string(p) + "] = " +
             std::to_string(m.match_p[p]);
  }
  if (m.size != matched)
    return "size field is " + std::to_string(m.size) + " but " +
           std::to_string(matched) + " pairs are matched";
  if (require_perfect && matched != g.n)
    return "matching has size " + std::to_string(matched) + " < n = " +
           std::to_string(g.n);
  return std::nullopt;
}

BipartiteRegularGraph gen_union_permutations(int n, int d, std::uint64_t seed,
                                             bool simple) {
  if (n < 1 || d < 1 || d > n)
    throw std::invalid_argument("gen_union_permutations: need 1 <= d <= n");
  Rng rng = make_rng(seed);
  std::vector<int> adj_p(static_cast<std::size_t>(n) * d);
  std::vector<int> perm(n);

  auto row_contains = [&](int p, int value, int upto) {
    const int* row = adj_p.data() + static_cast<std::size_t>(p) * d;
    for (int i = 0; i < upto; ++i)
      if (row[i] == value) return true;
    return false;
  };

  for (int k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    if (simple && k > 0) {
      // Swap-repair: give a colliding row another row's entry. A swap may
      // re-collide the donor row, so sweep until a pass is clean.
      const long long cap = 100LL * d;
      std::vector<long long> attempts(n, 0);
      std::uniform_int_distribution<int> pick(0, n - 1);
      bool dirty = true;
      while (dirty) {
        dirty = false;
        for (int p = 0; p < n; ++p) {
          while (row_contains(p, perm[p], k)) {
            if (++attempts[p] > cap)
              throw std::runtime_error(
                  "gen_union_permutations: simple-mode retry cap exceeded at row " +
                  std::to_string(p));
            int p2 = pick(rng);
            if (!row_contains(p, perm[p2], k)) {
              std::swap(perm[p], perm[p2]);
              dirty = true;
            }
          }
        }
      }
    }
    for (int p = 0; p < n; ++p) adj_p[static_cast<std::size_t>(p) * d + k] = perm[p];
  }
  return make_graph(n, d, std::move(adj_p), !simple);
}

namespace {

// Picks `count` distinct values from [lo, lo+range), uniformly, sorted.
std::vector<int> pick_distinct(int lo, int range, int count, Rng& rng) {
  std::vector<int> pool(range);
  std::iota(pool.begin(), pool.end(), lo);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

CanonicalGraph gen_canonical(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("gen_canonical: d must be positive");
  Rng rng = make_rng(seed);
  CanonicalGraph cg;
  cg.d = d;
  const int side = cg.side();
  const int t = cg.t_index();
  const int s = cg.s_index();

  std::vector<int> deg_l(side, 0), deg_r(side, 0);
  std::vector<std::pair<int, int>> edges;  // (left, right)
  auto add_edge = [&](int l, int r) {
    edges.emplace_back(l, r);
    ++deg_l[l];
    ++deg_r[r];
  };

  for (int p : pick_distinct(0, 2 * d, d, rng)) add_edge(p, s);
  for (int q : pick_distinct(2 * d, 2 * d, d, rng)) add_edge(t, q);

  auto cross_p = pick_distinct(2 * d, 2 * d, d, rng);  // in P2
  auto cross_q = pick_distinct(0, 2 * d, d, rng);      // in Q1
  for (int i = 0; i < d; ++i) {
    cg.hidden.emplace_back(cross_p[i], cross_q[i]);
    add_edge(cross_p[i], cross_q[i]);
  }

  // Fill each block to d-regularity by repeatedly pairing deficient vertices,
  // preferring pairs not yet adjacent so the result is usually simple.
  std::vector<char> used(static_cast<std::size_t>(side) * side, 0);
  for (auto [l, r] : edges) used[static_cast<std::size_t>(l) * side + r] = 1;
  for (int block = 0; block < 2; ++block) {
    const int lo = block * 2 * d;
    const int hi = lo + 2 * d;
    int p = lo;
    while (true) {
      while (p < hi && deg_l[p] == d) ++p;
      if (p == hi) break;
      int q_new = -1, q_any = -1;
      for (int q = lo; q < hi; ++q) {
        if (deg_r[q] == d) continue;
        if (q_any < 0) q_any = q;
        if (!used[static_cast<std::size_t>(p) * side + q]) {
          q_new = q;
          break;
        }
      }
      int q = q_new >= 0 ? q_new : q_any;
      if (q < 0)
        throw std::logic_error("gen_canonical: block degree totals out of balance");
      add_edge(p, q);
      used[static_cast<std::size_t>(p) * side + q] = 1;
    }
    for (int q = lo; q < hi; ++q)
      if (deg_r[q] != d)
        throw std::logic_error("gen_canonical: block degree totals out of balance");
  }

  std::vector<std::vector<int>> rows(side);
  for (auto& r : rows) r.reserve(d);
  for (auto [l, r] : edges) rows[l].push_back(r);
  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(side) * d);
  for (int l = 0; l < side; ++l) {
    if (rows[l].size() != static_cast<std::size_t>(d))
      throw std::logic_error("gen_canonical: left vertex degree != d");
    flat.insert(flat.end(), rows[l].begin(), rows[l].end());
  }
  cg.graph = make_graph(side, d, std::move(flat));
  return cg;
}

std::optional<std::string> validate_canonical(const CanonicalGraph& cg) {
  const int d = cg.d;
  if (d < 1) return "d must be positive";
  if (cg.graph.n != cg.side() || cg.graph.d != d)
    return "embedding has wrong dimensions";
  if (auto err = validate(cg.graph)) return "embedding invalid: " + *err;

  // t's row: d distinct Q2 vertices.
  {
    auto row = cg.graph.row_p(cg.t_index());
    std::vector<int> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return "t has parallel edges";
    for (int q : row)
      if (!cg.in_q2(q)) return "t adjacent to non-Q2 vertex " + std::to_string(q);
  }
  // s's row: d distinct P1 vertices.
  {
    auto row = cg.graph.row_q(cg.s_index());
    std::vector<int> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return "s has parallel edges";
    for (int p : row)
      if (!cg.in_p1(p)) return "s adjacent to non-P1 vertex " + std::to_string(p);
  }
  // Hidden matching: d edges, Q1 -> P2, distinct endpoints, present in graph.
  if (cg.hidden.size() != static_cast<std::size_t>(d))
    return "hidden matching has size " + std::to_string(cg.hidden.size());
  std::vector<char> seen_p(cg.side(), 0), seen_q(cg.side(), 0);
  for (auto [p, q] : cg.hidden) {
    if (!cg.in_p2(p) || !cg.in_q1(q))
      return "hidden edge (" + std::to_string(p) + "," + std::to_string(q) +
             ") does not cross Q1 -> P2";
    if (seen_p[p]++ || seen_q[q]++) return "hidden matching repeats an endpoint";
  }
  // Every P-Q edge stays inside its block except exactly the hidden edges.
  long long cross = 0;
  for (int p = 0; p < 4 * d; ++p) {
    for (int q : cg.graph.row_p(p)) {
      if (q == cg.s_index()) {
        if (!cg.in_p1(p)) return "s edge from non-P1 vertex";
        continue;
      }
      bool same_block = (cg.in_p1(p) && cg.in_q1(q)) || (cg.in_p2(p) && cg.in_q2(q));
      if (same_block) continue;
      if (!(cg.in_p2(p) && cg.in_q1(q)))
        return "edge (" + std::to_string(p) + "," + std::to_string(q) +
               ") crosses blocks in the wrong direction";
      if (std::find(cg.hidden.begin(), cg.hidden.end(), std::make_pair(p, q)) ==
          cg.hidden.end())
        return "cross edge (" + std::to_string(p) + "," + std::to_string(q) +
               ") is not in the hidden matching";
      ++cross;
    }
  }
  if (cross != d) return "expected d cross edges, found " + std::to_string(cross);
  return std::nullopt;
}

void write_graph(const BipartiteRegularGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << g.n << ' ' << g.d << '\n';
  for (int p = 0; p < g.n; ++p) {
    auto row = g.row_p(p);
    for (int i = 0; i < g.d; ++i) out << row[i] << (i + 1 == g.d ? '\n' : ' ');
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

BipartiteRegularGraph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": missing header line");
  int n = 0, d = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> d) || (hs >> extra))
      throw std::runtime_error(path + ":1: malformed header, expected \"n d\"");
  }
  if (n < 0 || d < 0) throw std::runtime_error(path + ":1: negative n or d");

  auto read_rows = [&](const char* which, int first_line) {
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(n) * d);
    for (int r = 0; r < n; ++r) {
      if (!std::getline(in, line))
        throw std::runtime_error(path + ": truncated file, missing " +
                                 std::string(which) + " row " + std::to_string(r));
      std::istringstream rs(line);
      int value = 0, got = 0;
      while (rs >> value) {
        if (got == d)
          throw std::runtime_error(path + ":" + std::to_string(first_line + r) +
                                   ": row has more than d = " + std::to_string(d) +
                                   " entries");
        if (value < 0 || value >= n)
          throw std::runtime_error(path + ":" + std::to_string(first_line + r) +
                                   ": index " + std::to_string(value) +
                                   " out of range [0," + std::to_string(n) + ")");
        flat.push_back(value);
        ++got;
      }
      if (got != d)
        throw std::runtime_error(path + ":" + std::to_string(first_line + r) +
                                 ": row has " + std::to_string(got) +
                                 " entries, expected d = " + std::to_string(d));
    }
    return flat;
  };

  std::vector<int> adj_p = read_rows("adjP", 2);

  // Optional adjQ block.
  std::streampos mark = in.tellg();
  bool has_more = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      has_more = true;
      break;
    }
  }
  BipartiteRegularGraph g;
  if (has_more) {
    in.clear();
    in.seekg(mark);
    std::vector<int> adj_q = read_rows("adjQ", 2 + n);
    g.n = n;
    g.d = d;
    g.adjP = std::move(adj_p);
    g.adjQ = std::move(adj_q);
  } else {
    g = make_graph(n, d, std::move(adj_p));
  }
  if (auto err = validate(g))
    throw std::runtime_error(path + ": invalid graph: " + *err);
  return g;
}

void write_matching(const Matching& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t p = 0; p < m.match_p.size(); ++p)
    out << p << ' ' << m.match_p[p] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matching read_matching(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<int> qs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    int p = 0, q = 0;
    if (!(ls >> p >> q))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected \"p q\"");
    if (p != static_cast<int>(qs.size()))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": rows must be in order 0..n-1");
    qs.push_back(q);
  }
  const int n = static_cast<int>(qs.size());
  Matching m(n);
  for (int p = 0; p < n; ++p) {
    int q = qs[p];
    if (q == kUnmatched) continue;
    if (q < 0 || q >= n)
      throw std::runtime_error(path + ": match target " + std::to_string(q) +
                               " out of range");
    if (m.match_q[q] != kUnmatched)
      throw std::runtime_error(path + ": Q vertex " + std::to_string(q) +
                               " matched twice");
    m.match_p[p] = q;
    m.match_q[q] = p;
    ++m.size;
  }
  return m;
}

}  // namespace regmatch
