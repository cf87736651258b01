#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "regmatch/graph.hpp"
#include "regmatch/walk.hpp"
#include "test_util.hpp"

using namespace regmatch;

namespace {

BipartiteRegularGraph k22() { return make_graph(2, 2, {0, 1, 0, 1}); }

Matching matching_from(std::vector<int> match_p, int n) {
  Matching m(n);
  for (int p = 0; p < n; ++p) {
    m.match_p[p] = match_p[p];
    if (match_p[p] != kUnmatched) {
      m.match_q[match_p[p]] = p;
      ++m.size;
    }
  }
  return m;
}

// Runs unbounded walks+augmentations until the matching reaches `target`.
Matching partial_matching(const BipartiteRegularGraph& g, int target,
                          std::uint64_t seed) {
  Matching m(g.n);
  Rng rng = make_rng(seed);
  MatchingWalker walker(g, m, rng);
  while (m.size < target) {
    auto out = walker.walk(-1);
    REQUIRE(out.success);
    walker.augment(out.path);
  }
  return m;
}

}  // namespace

TEST_CASE("budget formula") {
  for (int n : {1, 4, 100, 4096}) CHECK(budget(n, 0) == 6);
  CHECK(budget(4, 3) == 2 * 4 + 4);
  CHECK(budget(100, 99) == 2 * 100 + 4);
  CHECK(budget(4, 2) == 8);
  CHECK_THROWS_AS(budget(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(budget(4, -1), std::invalid_argument);
}

TEST_CASE("sample_out_edge: source is uniform over free P vertices") {
  auto g = k22();
  Matching m(2);
  Rng rng = make_rng(10);
  std::vector<long long> counts(2, 0);
  for (int i = 0; i < 40000; ++i) {
    auto st = sample_out_edge(g, m, HVertex::source(), rng);
    REQUIRE(st.v.kind == HKind::FreeP);
    ++counts[st.v.index];
  }
  CHECK(testutil::chi_square_gof(counts, {0.5, 0.5}) > 1e-3);
}

TEST_CASE("sample_out_edge: free Q always steps to the sink") {
  auto g = k22();
  Matching m(2);
  Rng rng = make_rng(11);
  for (int i = 0; i < 10; ++i) {
    auto st = sample_out_edge(g, m, HVertex::free_q(1), rng);
    CHECK(st.v == HVertex::sink());
  }
}

TEST_CASE("sample_out_edge: supernode excludes the matched occurrence") {
  auto g = k22();
  Matching m = matching_from({0, kUnmatched}, 2);
  m.slot_p[0] = 0;  // row 0 is [0, 1]; the matched edge (0,0) sits in slot 0
  Rng rng = make_rng(12);
  for (int i = 0; i < 200; ++i) {
    auto st = sample_out_edge(g, m, HVertex::super(0), rng);
    CHECK(st.v == HVertex::free_q(1));  // the only remaining out-edge
    CHECK(st.slot == 1);
  }
}

TEST_CASE("sample_out_edge rejects illegal states") {
  auto g = k22();
  Matching empty(2);
  Rng rng = make_rng(13);
  CHECK_THROWS_AS(sample_out_edge(g, empty, HVertex::sink(), rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_out_edge(g, empty, HVertex::super(0), rng),
                  std::invalid_argument);
  Matching full = matching_from({0, 1}, 2);
  CHECK_THROWS_AS(sample_out_edge(g, full, HVertex::source(), rng),
                  std::invalid_argument);
  auto g1 = make_graph(2, 1, {0, 1});
  Matching m1 = matching_from({0, kUnmatched}, 2);
  CHECK_THROWS_AS(sample_out_edge(g1, m1, HVertex::super(0), rng),
                  std::logic_error);
}

TEST_CASE("transition distribution matches the digraph definition exactly") {
  // On small instances, compare empirical frequencies of sample_out_edge from
  // every reachable vertex against the uniform-over-out-edges law.
  struct Case {
    int n, d, matched;
    std::uint64_t seed;
  };
  for (const Case& c : {Case{5, 3, 2, 100}, Case{6, 2, 3, 101}}) {
    auto g = gen_union_permutations(c.n, c.d, c.seed);
    Matching m = partial_matching(g, c.matched, c.seed + 1);

    std::vector<HVertex> states{HVertex::source()};
    for (int p = 0; p < g.n; ++p)
      if (m.match_p[p] == kUnmatched) states.push_back(HVertex::free_p(p));
    for (int q = 0; q < g.n; ++q)
      states.push_back(m.match_q[q] == kUnmatched ? HVertex::free_q(q)
                                                  : HVertex::super(q));

    Rng rng = make_rng(c.seed + 2);
    for (const HVertex& v : states) {
      auto edges = testutil::h_out_edges(g, m, v);
      REQUIRE_FALSE(edges.empty());
      auto buckets = testutil::multiset_of(edges);
      std::map<std::pair<int, int>, long long> counts;
      for (const auto& [key, mult] : buckets) counts[key] = 0;
      const int trials = 100000;
      for (int i = 0; i < trials; ++i) {
        auto st = sample_out_edge(g, m, v, rng);
        auto key = std::make_pair(static_cast<int>(st.v.kind), st.v.index);
        REQUIRE(buckets.count(key));  // always an out-neighbor
        ++counts[key];
      }
      std::vector<long long> obs;
      std::vector<double> probs;
      for (const auto& [key, mult] : buckets) {
        obs.push_back(counts[key]);
        probs.push_back(static_cast<double>(mult) / edges.size());
      }
      CHECK(testutil::chi_square_gof(obs, probs) > 1e-3);
    }
  }
}

TEST_CASE("truncated_walk on K22 with an empty matching") {
  auto g = k22();
  Matching m(2);
  Rng rng = make_rng(14);
  SUBCASE("budget 6 always succeeds in exactly 3 steps") {
    for (int i = 0; i < 50; ++i) {
      auto out = truncated_walk(g, m, 6, rng);
      REQUIRE(out.success);
      CHECK(out.steps_used == 3);
      REQUIRE(out.path.size() == 4);
      CHECK(out.path[0].v.kind == HKind::Source);
      CHECK(out.path[1].v.kind == HKind::FreeP);
      CHECK(out.path[2].v.kind == HKind::FreeQ);
      CHECK(out.path[3].v.kind == HKind::Sink);
    }
  }
  SUBCASE("budget below the 3-edge distance always fails") {
    for (int i = 0; i < 50; ++i) {
      auto out = truncated_walk(g, m, 2, rng);
      CHECK_FALSE(out.success);
      CHECK(out.steps_used == 2);
      CHECK(out.path.empty());
    }
  }
}

TEST_CASE("truncated walk with the phase budget succeeds at least half the time") {
  auto g = gen_union_permutations(64, 3, 200);
  Matching m = partial_matching(g, 63, 201);  // one augmentation left
  Rng rng = make_rng(202);
  const long long b = budget(64, 63);
  const int trials = 2000;
  int successes = 0;
  for (int i = 0; i < trials; ++i)
    if (truncated_walk(g, m, b, rng).success) ++successes;
  const double rate = static_cast<double>(successes) / trials;
  CHECK(rate >= 0.5 - 3.0 * std::sqrt(0.25 / trials));
}

TEST_CASE("walk lengths respect the hitting-time bound") {
  auto g = gen_union_permutations(64, 3, 300);
  auto mean_walk_length = [&](const Matching& frozen) {
    Matching copy = frozen;
    Rng rng = make_rng(301);
    MatchingWalker walker(g, copy, rng);
    long long total = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      auto out = walker.walk(-1);
      REQUIRE(out.success);
      total += out.steps_used;
    }
    return static_cast<double>(total) / trials;
  };
  CHECK(mean_walk_length(Matching(64)) <= (2.0 + 64.0 / 64.0) * 1.1);
  CHECK(mean_walk_length(partial_matching(g, 32, 302)) <=
        (2.0 + 64.0 / 32.0) * 1.1);
}

TEST_CASE("loop_erase leaves simple paths alone") {
  std::vector<WalkStep> path{{HVertex::source(), -1},
                             {HVertex::free_p(0), -1},
                             {HVertex::free_q(1), 0},
                             {HVertex::sink(), -1}};
  auto erased = loop_erase(path);
  REQUIRE(erased.size() == path.size());
  for (std::size_t i = 0; i < path.size(); ++i) CHECK(erased[i].v == path[i].v);
}

TEST_CASE("loop_erase removes a supernode cycle") {
  std::vector<WalkStep> path{{HVertex::source(), -1}, {HVertex::free_p(0), -1},
                             {HVertex::super(2), 0},  {HVertex::super(3), 1},
                             {HVertex::super(2), 0},  {HVertex::free_q(1), 2},
                             {HVertex::sink(), -1}};
  auto erased = loop_erase(path);
  REQUIRE(erased.size() == 5);
  CHECK(erased[0].v == HVertex::source());
  CHECK(erased[1].v == HVertex::free_p(0));
  CHECK(erased[2].v == HVertex::super(2));
  CHECK(erased[3].v == HVertex::free_q(1));
  CHECK(erased[4].v == HVertex::sink());
}

TEST_CASE("loop_erase rejects malformed sequences") {
  CHECK_THROWS_AS(loop_erase(std::vector<WalkStep>{}), std::invalid_argument);
  CHECK_THROWS_AS(
      loop_erase(std::vector<WalkStep>{{HVertex::source(), -1},
                                       {HVertex::sink(), -1}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      loop_erase(std::vector<WalkStep>{{HVertex::source(), -1},
                                       {HVertex::free_p(0), -1},
                                       {HVertex::free_q(0), 0}}),
      std::invalid_argument);
}

TEST_CASE("successful walks return simple digraph paths") {
  auto g = gen_union_permutations(16, 3, 400);
  Matching m = partial_matching(g, 8, 401);
  Matching copy = m;
  Rng rng = make_rng(402);
  MatchingWalker walker(g, copy, rng);
  for (int i = 0; i < 200; ++i) {
    auto out = walker.walk(-1);
    REQUIRE(out.success);
    const auto& path = out.path;
    REQUIRE(path.size() >= 4);
    CHECK(path.front().v.kind == HKind::Source);
    CHECK(path[1].v.kind == HKind::FreeP);
    CHECK(path[path.size() - 2].v.kind == HKind::FreeQ);
    CHECK(path.back().v.kind == HKind::Sink);
    std::set<std::pair<int, int>> seen;
    for (const auto& st : path)
      CHECK(seen.insert({static_cast<int>(st.v.kind), st.v.index}).second);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto outs = testutil::h_out_edges(g, copy, path[i].v);
      CHECK(std::count(outs.begin(), outs.end(), path[i + 1].v) > 0);
    }
    // Already loop-erased: re-erasing is the identity.
    auto re = loop_erase(path);
    CHECK(re.size() == path.size());
  }
}

TEST_CASE("augment applies the direct rewiring") {
  auto g = k22();
  SUBCASE("length-0 supernode chain") {
    Matching m(2);
    std::vector<WalkStep> path{{HVertex::source(), -1},
                               {HVertex::free_p(0), -1},
                               {HVertex::free_q(1), -1},
                               {HVertex::sink(), -1}};
    augment(g, m, path);
    CHECK(m.match_p == std::vector<int>{1, kUnmatched});
    CHECK(m.size == 1);
    CHECK_FALSE(verify_matching(g, m, false).has_value());
  }
  SUBCASE("one supernode on the path") {
    Matching m = matching_from({0, kUnmatched}, 2);
    std::vector<WalkStep> path{{HVertex::source(), -1},
                               {HVertex::free_p(1), -1},
                               {HVertex::super(0), -1},
                               {HVertex::free_q(1), -1},
                               {HVertex::sink(), -1}};
    augment(g, m, path);
    CHECK(m.match_p == std::vector<int>{1, 0});
    CHECK(m.match_q == std::vector<int>{1, 0});
    CHECK(m.size == 2);
    CHECK_FALSE(verify_matching(g, m, true).has_value());
  }
}

TEST_CASE("augment rejects invalid paths") {
  auto g = k22();
  Matching m = matching_from({0, kUnmatched}, 2);
  // FreeP(0) is matched, not free.
  CHECK_THROWS_AS(
      augment(g, m, std::vector<WalkStep>{{HVertex::source(), -1},
                                          {HVertex::free_p(0), -1},
                                          {HVertex::free_q(1), -1},
                                          {HVertex::sink(), -1}}),
      std::invalid_argument);
  // Super(1) is unmatched.
  CHECK_THROWS_AS(
      augment(g, m, std::vector<WalkStep>{{HVertex::source(), -1},
                                          {HVertex::free_p(1), -1},
                                          {HVertex::super(1), -1},
                                          {HVertex::free_q(1), -1},
                                          {HVertex::sink(), -1}}),
      std::invalid_argument);
  // Path uses a non-edge.
  auto sparse = make_graph(3, 1, {0, 1, 2});
  Matching m3(3);
  CHECK_THROWS_AS(
      augment(sparse, m3, std::vector<WalkStep>{{HVertex::source(), -1},
                                                {HVertex::free_p(0), -1},
                                                {HVertex::free_q(2), -1},
                                                {HVertex::sink(), -1}}),
      std::invalid_argument);
}

TEST_CASE("augment rejects non-simple paths") {
  auto g = gen_union_permutations(3, 3, 9, /*simple=*/true);  // K33
  Matching m(3);
  Rng rng = make_rng(10);
  MatchingWalker warmup(g, m, rng);
  while (m.size < 2) {
    auto out = warmup.walk(-1);
    warmup.augment(out.path);
  }
  int free_p = 0, free_q = 0;
  while (m.match_p[free_p] != kUnmatched) ++free_p;
  while (m.match_q[free_q] != kUnmatched) ++free_q;
  int q0 = m.match_p[(free_p + 1) % 3] == kUnmatched ? m.match_p[(free_p + 2) % 3]
                                                     : m.match_p[(free_p + 1) % 3];
  std::vector<WalkStep> path{{HVertex::source(), -1}, {HVertex::free_p(free_p), -1},
                             {HVertex::super(q0), -1}, {HVertex::super(q0), -1},
                             {HVertex::free_q(free_q), -1}, {HVertex::sink(), -1}};
  CHECK_THROWS_AS(augment(g, m, path), std::invalid_argument);
}

TEST_CASE("augment grows the matching by exactly one, always") {
  auto g = gen_union_permutations(12, 4, 500);
  Matching m(12);
  Rng rng = make_rng(501);
  MatchingWalker walker(g, m, rng);
  for (int expected = 1; expected <= 12; ++expected) {
    auto out = walker.walk(-1);
    REQUIRE(out.success);
    walker.augment(out.path);
    CHECK(m.size == expected);
    CHECK_FALSE(verify_matching(g, m, false).has_value());
  }
}

TEST_CASE("find_perfect_matching on K22") {
  auto g = k22();
  Rng rng = make_rng(600);
  auto res = find_perfect_matching(g, rng);
  CHECK(res.matching.size == 2);
  CHECK_FALSE(verify_matching(g, res.matching, true).has_value());
  CHECK(res.stats.augmentations == 2);
}

TEST_CASE("find_perfect_matching short-circuits d=1") {
  auto g = make_graph(3, 1, {2, 0, 1});
  Rng rng = make_rng(601);
  auto res = find_perfect_matching(g, rng);
  CHECK(res.matching.match_p == std::vector<int>{2, 0, 1});
  CHECK(res.stats.total_steps == 0);
  CHECK(res.stats.augmentations == 0);
  CHECK_FALSE(verify_matching(g, res.matching, true).has_value());
}

TEST_CASE("find_perfect_matching rejects invalid graphs") {
  BipartiteRegularGraph g;
  g.n = 2;
  g.d = 1;
  g.adjP = {0, 0};  // q=1 has degree 0
  g.adjQ = {0, 1};
  Rng rng = make_rng(602);
  CHECK_THROWS_AS(find_perfect_matching(g, rng), std::invalid_argument);
}

TEST_CASE("twenty seeds at n=256 d=8: perfect, and steps within the bound") {
  const int n = 256, d = 8;
  const double bound = 8.0 * n + 4.0 * n * testutil::harmonic(n);
  long long total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = gen_union_permutations(n, d, seed);
    Rng rng = make_rng(seed * 7 + 1);
    auto res = find_perfect_matching(g, rng);
    CHECK_FALSE(verify_matching(g, res.matching, true).has_value());
    CHECK(res.stats.augmentations == n);
    for (int j = 0; j < n; ++j) {
      const auto& ph = res.stats.phases[j];
      CHECK(ph.budget == budget(n, j));
      CHECK(ph.steps <= (ph.restarts + 1) * ph.budget);
    }
    total += res.stats.total_steps;
  }
  CHECK(static_cast<double>(total) / 20.0 <= bound);
}

TEST_CASE("identical seeds give identical matchings and stats") {
  auto g = gen_union_permutations(64, 4, 700);
  Rng rng1 = make_rng(701), rng2 = make_rng(701);
  auto a = find_perfect_matching(g, rng1);
  auto b = find_perfect_matching(g, rng2);
  CHECK(a.matching.match_p == b.matching.match_p);
  CHECK(a.stats.total_steps == b.stats.total_steps);
  CHECK(a.stats.total_restarts == b.stats.total_restarts);
}

TEST_CASE("untruncated mode never restarts") {
  auto g = gen_union_permutations(64, 3, 800);
  Rng rng = make_rng(801);
  auto res = find_perfect_matching(g, rng, /*truncated=*/false);
  CHECK_FALSE(verify_matching(g, res.matching, true).has_value());
  CHECK(res.stats.total_restarts == 0);
  for (const auto& ph : res.stats.phases) CHECK(ph.budget == -1);
}
