#include <chrono>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "regmatch/prefix_weight.hpp"
#include "regmatch/rng.hpp"
#include "test_util.hpp"

using namespace regmatch;

namespace {

// Linear-scan reference with identical semantics.
template <typename W>
struct NaiveIndex {
  std::vector<W> w;
  W total() const { return std::accumulate(w.begin(), w.end(), W(0)); }
  std::size_t find(W r) const {
    W acc = W(0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (r < acc + w[i] && w[i] > W(0)) return i;
      acc += w[i];
    }
    throw std::out_of_range("naive find: r past total");
  }
  std::size_t find_excluding(std::size_t ex, W r) const {
    W prefix_ex = W(0);
    for (std::size_t i = 0; i < ex; ++i) prefix_ex += w[i];
    if (r >= prefix_ex) r += w[ex];
    return find(r);
  }
};

}  // namespace

TEST_CASE("build totals") {
  CHECK(PrefixWeightIndex<double>({1.0}).total() == doctest::Approx(1.0));
  CHECK(PrefixWeightIndex<double>({0.2, 0.3, 0.5}).total() == doctest::Approx(1.0));
  CHECK(PrefixWeightIndex<long long>({2, 3, 5}).total() == 10);
}

TEST_CASE("build total matches an independent pass at 1e5 weights") {
  Rng rng = make_rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(100000);
  long double exact = 0.0L;
  for (auto& x : w) {
    x = unit(rng);
    exact += x;
  }
  PrefixWeightIndex<double> idx(w);
  const double rel = std::fabs(static_cast<double>(
      (static_cast<long double>(idx.total()) - exact) / exact));
  CHECK(rel <= std::ldexp(1.0, -40));
}

TEST_CASE("build rejects negative weights") {
  CHECK_THROWS_AS(PrefixWeightIndex<double>({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("find_by_cumulative picks the covering position") {
  PrefixWeightIndex<double> idx({0.2, 0.3, 0.5});
  CHECK(idx.find_by_cumulative(0.4) == 1);
  CHECK(idx.find_by_cumulative(0.0) == 0);
  CHECK(idx.find_by_cumulative(0.19) == 0);
  CHECK(idx.find_by_cumulative(0.5) == 2);
  CHECK(idx.find_by_cumulative(0.999) == 2);
  CHECK_THROWS_AS(idx.find_by_cumulative(1.0), std::invalid_argument);
  CHECK_THROWS_AS(idx.find_by_cumulative(-0.1), std::invalid_argument);

  PrefixWeightIndex<long long> ints({1, 2, 3});
  CHECK(ints.find_by_cumulative(0) == 0);
  CHECK(ints.find_by_cumulative(1) == 1);
  CHECK(ints.find_by_cumulative(2) == 1);
  CHECK(ints.find_by_cumulative(3) == 2);
  CHECK(ints.find_by_cumulative(5) == 2);
}

TEST_CASE("zero-weight positions are never sampled") {
  PrefixWeightIndex<double> idx({0.0, 1.0, 0.0});
  Rng rng = make_rng(1);
  for (int i = 0; i < 2000; ++i) CHECK(idx.sample(rng) == 1);
}

TEST_CASE("sample frequencies follow the weights") {
  PrefixWeightIndex<double> idx({1.0, 2.0, 3.0});
  Rng rng = make_rng(2);
  std::vector<long long> counts(3, 0);
  for (int i = 0; i < 100000; ++i) ++counts[idx.sample(rng)];
  CHECK(testutil::chi_square_gof(counts, {1.0 / 6, 2.0 / 6, 3.0 / 6}) > 1e-3);
}

TEST_CASE("update and erase adjust totals and live set") {
  PrefixWeightIndex<long long> idx({1, 2, 3});
  idx.erase(2);
  CHECK(idx.total() == 3);
  Rng rng = make_rng(3);
  for (int i = 0; i < 5000; ++i) CHECK(idx.sample(rng) != 2);
  idx.update(0, 5);
  CHECK(idx.total() == 3 - 1 + 5);

  PrefixWeightIndex<double> fidx({1.0, 2.0, 3.0});
  fidx.update(0, 5.0);
  CHECK(fidx.total() == doctest::Approx(10.0));
  CHECK_THROWS_AS(fidx.update(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fidx.update(0, -1.0), std::invalid_argument);
}

TEST_CASE("interleaved operations agree with the linear-scan oracle exactly") {
  Rng rng = make_rng(4);
  for (int round = 0; round < 20; ++round) {
    const int size = 1 + static_cast<int>(rng() % 64);
    std::vector<long long> init(size);
    for (auto& x : init) x = static_cast<long long>(rng() % 9);
    if (std::accumulate(init.begin(), init.end(), 0LL) == 0) init[0] = 1;
    PrefixWeightIndex<long long> idx(init);
    NaiveIndex<long long> naive{init};
    for (int op = 0; op < 500; ++op) {
      const int what = static_cast<int>(rng() % 4);
      if (what == 0) {
        const std::size_t pos = rng() % size;
        const long long w = static_cast<long long>(rng() % 9);
        idx.update(pos, w);
        naive.w[pos] = w;
      } else if (what == 1 && naive.total() > 0) {
        const long long r = static_cast<long long>(rng() % naive.total());
        CHECK(idx.find_by_cumulative(r) == naive.find(r));
      } else if (what == 2) {
        const std::size_t pos = rng() % size;
        long long prefix = 0;
        for (std::size_t i = 0; i < pos; ++i) prefix += naive.w[i];
        CHECK(idx.prefix(pos) == prefix);
      } else {
        const std::size_t ex = rng() % size;
        const long long rest = naive.total() - naive.w[ex];
        if (rest <= 0) continue;
        const long long r = static_cast<long long>(rng() % rest);
        const std::size_t got = idx.find_by_cumulative_excluding(ex, r);
        CHECK(got == naive.find_excluding(ex, r));
        CHECK(got != ex);
      }
      CHECK(idx.total() == naive.total());
    }
  }
}

TEST_CASE("sample_excluding renormalizes over the remaining weights") {
  PrefixWeightIndex<double> idx({1.0, 2.0, 3.0});
  Rng rng = make_rng(5);
  std::vector<long long> counts(3, 0);
  for (int i = 0; i < 100000; ++i) ++counts[idx.sample_excluding(1, rng)];
  CHECK(counts[1] == 0);
  CHECK(testutil::chi_square_gof(counts, {0.25, 0.0, 0.75}) > 1e-3);
}

TEST_CASE("sample_excluding with a dominant excluded weight") {
  PrefixWeightIndex<double> idx({0.99, 0.01});
  Rng rng = make_rng(6);
  for (int i = 0; i < 5000; ++i) CHECK(idx.sample_excluding(0, rng) == 1);
}

TEST_CASE("sample_excluding matches a rejection-sampling oracle") {
  Rng rng = make_rng(7);
  std::vector<double> w(8);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (auto& x : w) x = unit(rng);
  const std::size_t excluded = 3;
  PrefixWeightIndex<double> idx(w);

  double rest = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (i != excluded) rest += w[i];
  std::vector<double> expected(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (i != excluded) expected[i] = w[i] / rest;

  std::vector<long long> mine(w.size(), 0), oracle(w.size(), 0);
  std::uniform_real_distribution<double> pick(0.0, std::accumulate(w.begin(), w.end(), 0.0));
  for (int i = 0; i < 100000; ++i) {
    ++mine[idx.sample_excluding(excluded, rng)];
    // rejection oracle: weighted linear scan, redraw on the excluded position
    for (;;) {
      double r = pick(rng);
      std::size_t pos = 0;
      double acc = 0.0;
      for (; pos + 1 < w.size(); ++pos) {
        if (r < acc + w[pos]) break;
        acc += w[pos];
      }
      if (pos != excluded) {
        ++oracle[pos];
        break;
      }
    }
  }
  CHECK(mine[excluded] == 0);
  CHECK(testutil::chi_square_gof(mine, expected) > 1e-3);
  CHECK(testutil::chi_square_gof(oracle, expected) > 1e-3);
}

TEST_CASE("sampling an empty index is an error") {
  PrefixWeightIndex<double> idx(std::vector<double>{0.0, 0.0});
  Rng rng = make_rng(8);
  CHECK_THROWS_AS(idx.sample(rng), std::invalid_argument);
  PrefixWeightIndex<double> one(std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(one.sample_excluding(0, rng), std::invalid_argument);
}

TEST_CASE("integer mode checks for overflow") {
  const long long big = (1LL << 62);
  CHECK_THROWS_AS(PrefixWeightIndex<long long>({big, big}), std::overflow_error);
}

TEST_CASE("build work scales linearly, not quadratically") {
  auto build_time = [](std::size_t n) {
    std::vector<double> w(n, 1.0);
    double best = 1e100;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      PrefixWeightIndex<double> idx(w);
      const auto t1 = std::chrono::steady_clock::now();
      if (idx.total() <= 0) FAIL("bad build");
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double small = build_time(std::size_t{1} << 19);
  const double large = build_time(std::size_t{1} << 20);
  CHECK(large <= 3.0 * small + 1e-3);  // slack absorbs timer noise
}
