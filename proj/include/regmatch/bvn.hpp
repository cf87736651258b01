#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "regmatch/prefix_weight.hpp"
#include "regmatch/walk.hpp"

namespace regmatch {

template <typename W>
struct Triplet {
  int row = 0;
  int col = 0;
  W weight = W(0);
};

template <typename W>
struct BvnDecomposition {
  struct Term {
    W lambda = W(0);
    std::vector<int> perm;  // perm[p] = column matched to row p
  };
  std::vector<Term> terms;
  W residual = W(0);  // common row sum remaining after the last term
};

// Doubly stochastic matrix viewed as a weighted regular bipartite multigraph:
// per-row prefix-weight indices superimposed on the entry arrival order, plus
// column sums for validation. Entries reaching zero are deleted and never
// sampled again. W = double (tolerance-based) or long long (exact; all row
// sums equal a common integer D).
template <typename W>
class DoublyStochasticMatrix {
 public:
  // Absolute deletion threshold in float mode; exact zero in integer mode.
  static constexpr double kZeroEps = 1e-12;

  static DoublyStochasticMatrix load(int n, const std::vector<Triplet<W>>& entries);

  int n() const { return n_; }
  long long live_entries() const { return live_; }
  W mass() const { return mass_; }
  W common_sum() const { return n_ ? mass_ / W(n_) : W(0); }
  W row_sum(int p) const { return rows_[p].total(); }
  W col_sum(int q) const { return colsum_[q]; }
  int entry_col(int p, std::size_t slot) const { return cols_[p][slot]; }
  W entry_weight(int p, std::size_t slot) const { return rows_[p].weight(slot); }
  std::size_t row_entries(int p) const { return cols_[p].size(); }

  std::vector<Triplet<W>> live_triplets() const {
    std::vector<Triplet<W>> out;
    out.reserve(static_cast<std::size_t>(live_));
    for (int p = 0; p < n_; ++p)
      for (std::size_t i = 0; i < cols_[p].size(); ++i)
        if (rows_[p].weight(i) > W(0))
          out.push_back({p, cols_[p][i], rows_[p].weight(i)});
    return out;
  }

  // Perfect matching inside the current support via the weighted walk.
  Matching find_support_matching(Rng& rng) const;

  // One Birkhoff step: find a support matching, peel off its bottleneck
  // weight, delete entries that reach zero.
  typename BvnDecomposition<W>::Term extract_matching(Rng& rng);

  // Up to k terms (SIZE_MAX = run to empty).
  BvnDecomposition<W> decompose(std::size_t k, Rng& rng);

 private:
  template <typename>
  friend class SupportWalker;

  int n_ = 0;
  std::vector<std::vector<int>> cols_;        // arrival order columns per row
  std::vector<PrefixWeightIndex<W>> rows_;    // weights aligned with cols_
  std::vector<W> colsum_;
  W mass_ = W(0);
  long long live_ = 0;
};

using MatrixVariant =
    std::variant<DoublyStochasticMatrix<double>, DoublyStochasticMatrix<long long>>;

// Matrix file: "n m mode" header (mode "float" or "int"), then m lines
// "row col weight". Decomposition file: one line per term,
// "lambda p(0) ... p(n-1)".
MatrixVariant read_matrix(const std::string& path);
void write_matrix_float(int n, const std::vector<Triplet<double>>& entries,
                        const std::string& path);
void write_matrix_int(int n, const std::vector<Triplet<long long>>& entries,
                      const std::string& path);
void write_decomposition(const BvnDecomposition<double>& dec, const std::string& path);
void write_decomposition(const BvnDecomposition<long long>& dec,
                         const std::string& path);

// Random convex combination of `perms` permutation matrices (float) or sum of
// `d` permutation matrices with unit coefficients (integer, common sum D=d).
std::vector<Triplet<double>> gen_random_doubly_stochastic(int n, int perms,
                                                          std::uint64_t seed);
std::vector<Triplet<long long>> gen_integer_doubly_stochastic(int n, int d,
                                                              std::uint64_t seed);

// ---- implementation ----

namespace detail {

template <typename W>
bool sums_close(W a, W b, int n) {
  if constexpr (std::is_integral_v<W>) {
    (void)n;
    return a == b;
  } else {
    return std::abs(a - b) <= 1e-9 * n;
  }
}

template <typename W>
std::string weight_str(W w) {
  if constexpr (std::is_integral_v<W>) {
    return std::to_string(w);
  } else {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
  }
}

}  // namespace detail

template <typename W>
DoublyStochasticMatrix<W> DoublyStochasticMatrix<W>::load(
    int n, const std::vector<Triplet<W>>& entries) {
  if (n < 1) throw std::invalid_argument("load: n must be positive");
  if (entries.empty()) throw std::invalid_argument("load: matrix has no entries");
  DoublyStochasticMatrix<W> mx;
  mx.n_ = n;
  mx.cols_.resize(n);
  mx.colsum_.assign(n, W(0));
  std::vector<std::vector<W>> row_weights(n);
  std::vector<W> rowsum(n, W(0));
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw std::invalid_argument("load: entry (" + std::to_string(t.row) + "," +
                                  std::to_string(t.col) + ") out of range");
    if (!(t.weight > W(0)))
      throw std::invalid_argument("load: entry (" + std::to_string(t.row) + "," +
                                  std::to_string(t.col) + ") has non-positive weight");
    mx.cols_[t.row].push_back(t.col);
    row_weights[t.row].push_back(t.weight);
    rowsum[t.row] += t.weight;
    mx.colsum_[t.col] += t.weight;
    mx.mass_ += t.weight;
    ++mx.live_;
  }
  for (int p = 0; p < n; ++p) {
    std::vector<int> sorted = mx.cols_[p];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("load: duplicate entry in row " + std::to_string(p));
  }
  const W common = mx.mass_ / W(n);
  for (int p = 0; p < n; ++p)
    if (!detail::sums_close(rowsum[p], common, n))
      throw std::invalid_argument(
          "load: not doubly stochastic: row " + std::to_string(p) + " sums to " +
          detail::weight_str(rowsum[p]) + ", expected " + detail::weight_str(common) +
          " (deviation " + detail::weight_str(rowsum[p] - common) + ")");
  for (int q = 0; q < n; ++q)
    if (!detail::sums_close(mx.colsum_[q], common, n))
      throw std::invalid_argument(
          "load: not doubly stochastic: column " + std::to_string(q) + " sums to " +
          detail::weight_str(mx.colsum_[q]) + ", expected " +
          detail::weight_str(common) + " (deviation " +
          detail::weight_str(mx.colsum_[q] - common) + ")");
  mx.rows_.reserve(n);
  for (int p = 0; p < n; ++p)
    mx.rows_.emplace_back(std::move(row_weights[p]));
  return mx;
}

// Weighted walk engine: identical structure to MatchingWalker, except FreeP
// rows are sampled weight-proportionally and a supernode samples its mate's
// row with the matched entry excluded outright (a matched entry may carry
// nearly the whole row, so rejection would not do).
template <typename W>
class SupportWalker {
 public:
  SupportWalker(const DoublyStochasticMatrix<W>& mx, Matching& m, Rng& rng)
      : mx_(mx), m_(m), rng_(rng) {
    free_pos_.assign(mx.n(), -1);
    for (int p = 0; p < mx.n(); ++p) {
      if (m.match_p[p] == kUnmatched) {
        free_pos_[p] = static_cast<int>(free_rows_.size());
        free_rows_.push_back(p);
      }
    }
    super_pos_.assign(mx.n(), -1);
  }

  WalkStep sample_out_edge(HVertex v) {
    switch (v.kind) {
      case HKind::Source: {
        if (free_rows_.empty())
          throw std::invalid_argument("sample_out_edge: matching is already perfect");
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(free_rows_.size()) - 1);
        return {HVertex::free_p(free_rows_[pick(rng_)]), -1};
      }
      case HKind::FreeP: {
        const int p = v.index;
        const std::size_t slot = mx_.rows_[p].sample(rng_);
        const int q = mx_.cols_[p][slot];
        return {m_.match_q[q] == kUnmatched ? HVertex::free_q(q) : HVertex::super(q),
                static_cast<int>(slot)};
      }
      case HKind::Super: {
        const int q = v.index;
        const int u = m_.match_q[q];
        if (u == kUnmatched)
          throw std::invalid_argument("sample_out_edge: supernode on unmatched column");
        const std::size_t slot =
            mx_.rows_[u].sample_excluding(static_cast<std::size_t>(m_.slot_p[u]), rng_);
        const int q2 = mx_.cols_[u][slot];
        return {m_.match_q[q2] == kUnmatched ? HVertex::free_q(q2)
                                             : HVertex::super(q2),
                static_cast<int>(slot)};
      }
      case HKind::FreeQ:
        return {HVertex::sink(), -1};
      case HKind::Sink:
        throw std::invalid_argument("sample_out_edge: the sink has no out-edges");
    }
    throw std::logic_error("sample_out_edge: bad vertex kind");
  }

  WalkOutcome walk(long long max_steps) {
    return detail::run_loop_erased_walk(
        max_steps, super_pos_, [this](HVertex v) { return sample_out_edge(v); });
  }

  void augment(std::span<const WalkStep> path) {
    detail::apply_augmentation(
        m_, path,
        [this](int row, int target, int hint) {
          if (hint >= 0) {
            if (hint >= static_cast<int>(mx_.cols_[row].size()) ||
                mx_.cols_[row][hint] != target ||
                !(mx_.rows_[row].weight(hint) > W(0)))
              throw std::invalid_argument(
                  "augment: slot does not match a live entry");
            return hint;
          }
          for (std::size_t i = 0; i < mx_.cols_[row].size(); ++i)
            if (mx_.cols_[row][i] == target && mx_.rows_[row].weight(i) > W(0))
              return static_cast<int>(i);
          throw std::invalid_argument("augment: path uses a dead or missing entry");
        },
        /*trusted_simple=*/true);
    const int p0 = path[1].v.index;
    const int at = free_pos_[p0];
    free_pos_[free_rows_.back()] = at;
    std::swap(free_rows_[at], free_rows_.back());
    free_rows_.pop_back();
    free_pos_[p0] = -1;
  }

  int matching_size() const { return m_.size; }

 private:
  const DoublyStochasticMatrix<W>& mx_;
  Matching& m_;
  Rng& rng_;
  std::vector<int> free_rows_, free_pos_, super_pos_;
};

template <typename W>
Matching DoublyStochasticMatrix<W>::find_support_matching(Rng& rng) const {
  if (!(mass_ > W(0)))
    throw std::invalid_argument("find_support_matching: matrix has no mass left");
  Matching m(n_);
  SupportWalker<W> engine(*this, m, rng);
  // Every valid doubly stochastic matrix has a perfect matching in its
  // support, so exhausting this cap means a broken invariant, not bad luck.
  detail::drive_to_perfect(engine, n_, /*truncated=*/true, untruncated_step_cap(n_));
  return m;
}

template <typename W>
typename BvnDecomposition<W>::Term DoublyStochasticMatrix<W>::extract_matching(
    Rng& rng) {
  Matching m = find_support_matching(rng);
  typename BvnDecomposition<W>::Term term;
  term.perm.resize(n_);
  W lambda = std::numeric_limits<W>::max();
  for (int p = 0; p < n_; ++p) {
    term.perm[p] = m.match_p[p];
    lambda = std::min(lambda, rows_[p].weight(m.slot_p[p]));
  }
  term.lambda = lambda;
  for (int p = 0; p < n_; ++p) {
    const std::size_t slot = static_cast<std::size_t>(m.slot_p[p]);
    W left = rows_[p].weight(slot) - lambda;
    bool dead;
    if constexpr (std::is_integral_v<W>)
      dead = left == W(0);
    else
      dead = left <= W(kZeroEps);
    if (dead) {
      rows_[p].erase(slot);
      --live_;
    } else {
      rows_[p].update(slot, left);
    }
    colsum_[m.match_p[p]] -= lambda;
  }
  mass_ -= lambda * W(n_);
  return term;
}

template <typename W>
BvnDecomposition<W> DoublyStochasticMatrix<W>::decompose(std::size_t k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("decompose: k must be >= 1");
  BvnDecomposition<W> dec;
  while (dec.terms.size() < k && live_ > 0) {
    if constexpr (!std::is_integral_v<W>) {
      // Once the common row sum is down at the deletion-threshold scale, the
      // leftover entries are resolution noise, no longer reliably doubly
      // stochastic; they stay behind as the residual.
      if (common_sum() <= W(kZeroEps) * W(n_)) break;
    }
    dec.terms.push_back(extract_matching(rng));
  }
  dec.residual = common_sum();
  return dec;
}

}  // namespace regmatch
