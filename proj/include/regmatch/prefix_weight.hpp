#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace regmatch {

// Cumulative-weight index over a fixed arrival order: a Fenwick layout
// superimposed on the array, so keys are positions and construction is one
// linear pass (no sorting). Weighted sampling, prefix search, point update
// and deletion are all logarithmic. Deletion is update-to-zero; zero-weight
// positions are never returned by any search.
//
// W = double uses compensated accumulation for the running total; integral W
// is exact and add/overflow checked.
template <typename W>
class PrefixWeightIndex {
  static_assert(std::is_floating_point_v<W> || std::is_integral_v<W>);

 public:
  PrefixWeightIndex() = default;

  explicit PrefixWeightIndex(std::vector<W> weights) : w_(std::move(weights)) {
    const std::size_t n = w_.size();
    tree_.assign(n + 1, W(0));
    for (std::size_t i = 1; i <= n; ++i) {
      if (w_[i - 1] < W(0))
        throw std::invalid_argument("PrefixWeightIndex: negative weight");
      tree_[i] = checked_add(tree_[i], w_[i - 1]);
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n) tree_[parent] = checked_add(tree_[parent], tree_[i]);
      add_to_total(w_[i - 1]);
    }
    top_ = n ? std::bit_floor(n) : 0;
  }

  std::size_t size() const { return w_.size(); }
  W total() const { return total_; }
  W weight(std::size_t i) const {
    check_index(i);
    return w_[i];
  }

  // Sum of weights strictly before position i (i may equal size()).
  W prefix(std::size_t i) const {
    if (i > size()) throw std::invalid_argument("prefix: index out of range");
    W sum = W(0);
    for (; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

  void update(std::size_t i, W new_weight) {
    check_index(i);
    if (new_weight < W(0))
      throw std::invalid_argument("update: negative weight");
    const W delta = new_weight - w_[i];
    w_[i] = new_weight;
    for (std::size_t j = i + 1; j <= size(); j += j & (~j + 1))
      tree_[j] = checked_add(tree_[j], delta);
    add_to_total(delta);
  }

  void erase(std::size_t i) { update(i, W(0)); }

  // The unique position i with prefix(i) <= r < prefix(i) + weight(i).
  std::size_t find_by_cumulative(W r) const {
    if (!(r >= W(0)) || r >= total_ || total_ <= W(0))
      throw std::invalid_argument("find_by_cumulative: r outside [0, total)");
    std::size_t pos = 0;
    W rem = r;
    for (std::size_t pw = top_; pw; pw >>= 1) {
      const std::size_t next = pos + pw;
      if (next <= size() && tree_[next] <= rem) {
        rem -= tree_[next];
        pos = next;
      }
    }
    // pos counts the positions whose cumulative weight is <= r. Exact in
    // integer mode; the float repair below only matters within rounding of a
    // boundary.
    if (pos >= size() || w_[pos] <= W(0)) {
      std::size_t back = pos >= size() ? size() : pos;
      while (back > 0 && w_[back - 1] <= W(0)) --back;
      if (back == 0) throw std::logic_error("find_by_cumulative: no live weight");
      return back - 1;
    }
    return pos;
  }

  // Weighted position over all live entries except `excluded`: draw in the
  // reduced range and shift past the excluded block. Exact, no rejection.
  std::size_t find_by_cumulative_excluding(std::size_t excluded, W r) const {
    check_index(excluded);
    const W rest = total_ - w_[excluded];
    if (rest <= W(0))
      throw std::invalid_argument(
          "find_by_cumulative_excluding: no weight outside excluded position");
    if (!(r >= W(0)) || r >= rest)
      throw std::invalid_argument(
          "find_by_cumulative_excluding: r outside [0, total - w[excluded])");
    if (r >= prefix(excluded)) r += w_[excluded];
    std::size_t pos = find_by_cumulative(r);
    if (pos == excluded) {
      // Reachable only through float rounding at the block boundary.
      std::size_t fwd = pos + 1;
      while (fwd < size() && w_[fwd] <= W(0)) ++fwd;
      if (fwd < size()) return fwd;
      while (pos > 0 && w_[pos - 1] <= W(0)) --pos;
      if (pos == 0) throw std::logic_error("find_by_cumulative_excluding: stuck");
      return pos - 1;
    }
    return pos;
  }

  template <class G>
  std::size_t sample(G& rng) const {
    if (total_ <= W(0))
      throw std::invalid_argument("sample: no live weight to sample");
    return find_by_cumulative(draw(rng, total_));
  }

  template <class G>
  std::size_t sample_excluding(std::size_t excluded, G& rng) const {
    check_index(excluded);
    const W rest = total_ - w_[excluded];
    if (rest <= W(0))
      throw std::invalid_argument(
          "sample_excluding: no weight outside excluded position");
    return find_by_cumulative_excluding(excluded, draw(rng, rest));
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= size()) throw std::invalid_argument("position out of range");
  }

  static W checked_add(W a, W b) {
    if constexpr (std::is_integral_v<W>) {
      W r;
      if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("PrefixWeightIndex: weight sum overflow");
      return r;
    } else {
      return a + b;
    }
  }

  void add_to_total(W delta) {
    if constexpr (std::is_integral_v<W>) {
      total_ = checked_add(total_, delta);
    } else {
      // Kahan step; keeps the running total within a few ulps of the true sum.
      const W y = delta - comp_;
      const W t = total_ + y;
      comp_ = (t - total_) - y;
      total_ = t;
    }
  }

  template <class G>
  static W draw(G& rng, W bound) {
    if constexpr (std::is_integral_v<W>) {
      return std::uniform_int_distribution<W>(0, bound - 1)(rng);
    } else {
      std::uniform_real_distribution<W> dist(W(0), bound);
      W r = dist(rng);
      while (r >= bound) r = dist(rng);  // guard the half-open contract
      return r;
    }
  }

  std::vector<W> w_;
  std::vector<W> tree_;  // 1-based Fenwick array
  std::size_t top_ = 0;  // largest power of two <= size()
  W total_ = W(0);
  W comp_ = W(0);
};

}  // namespace regmatch
