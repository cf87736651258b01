#include "regmatch/walk.hpp"

#include <algorithm>
#include <cmath>

namespace regmatch {

std::string to_string(const HVertex& v) {
  switch (v.kind) {
    case HKind::Source: return "Source";
    case HKind::Sink: return "Sink";
    case HKind::FreeP: return "FreeP(" + std::to_string(v.index) + ")";
    case HKind::FreeQ: return "FreeQ(" + std::to_string(v.index) + ")";
    case HKind::Super: return "Super(" + std::to_string(v.index) + ")";
  }
  return "?";
}

long long budget(int n, int j) {
  if (n < 1 || j < 0 || j >= n)
    throw std::invalid_argument("budget: need 0 <= j < n");
  const long long k = n - j;
  return 4 + (2LL * n + k - 1) / k;  // 4 + ceil(2n/k)
}

std::vector<WalkStep> loop_erase(std::span<const WalkStep> steps) {
  if (steps.empty() || steps.front().v.kind != HKind::Source ||
      steps.back().v.kind != HKind::Sink)
    throw std::invalid_argument("loop_erase: sequence must run Source..Sink");
  std::vector<WalkStep> stack;
  std::vector<int> pos;  // grows on demand; -1 = not on stack
  auto pos_of = [&](int q) -> int& {
    if (q >= static_cast<int>(pos.size())) pos.resize(q + 1, -1);
    return pos[q];
  };
  HKind prev = HKind::Sink;  // placeholder, overwritten below
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const WalkStep& st = steps[i];
    if (i == 0) {
      stack.push_back(st);
      prev = st.v.kind;
      continue;
    }
    bool legal = false;
    switch (prev) {
      case HKind::Source: legal = st.v.kind == HKind::FreeP; break;
      case HKind::FreeP:
      case HKind::Super:
        legal = st.v.kind == HKind::Super || st.v.kind == HKind::FreeQ;
        break;
      case HKind::FreeQ: legal = st.v.kind == HKind::Sink; break;
      case HKind::Sink: legal = false; break;
    }
    if (!legal || st.v.index < (st.v.kind == HKind::Sink ? -1 : 0))
      throw std::invalid_argument("loop_erase: illegal transition into " +
                                  to_string(st.v));
    if (st.v.kind == HKind::Super) {
      int& at = pos_of(st.v.index);
      if (at >= 0) {
        for (std::size_t j = at + 1; j < stack.size(); ++j)
          if (stack[j].v.kind == HKind::Super) pos[stack[j].v.index] = -1;
        stack.resize(at + 1);
        prev = HKind::Super;
        continue;
      }
      at = static_cast<int>(stack.size());
    }
    stack.push_back(st);
    prev = st.v.kind;
  }
  return stack;
}

namespace {

// Maps a (row, target, slot hint) triple to the designated adjacency slot.
auto graph_slot_resolver(const BipartiteRegularGraph& g) {
  return [&g](int row, int target, int hint) {
    auto r = g.row_p(row);
    if (hint >= 0) {
      if (hint >= g.d || r[hint] != target)
        throw std::invalid_argument("augment: slot does not match path edge");
      return hint;
    }
    auto it = std::find(r.begin(), r.end(), target);
    if (it == r.end())
      throw std::invalid_argument("augment: path uses a non-edge");
    return static_cast<int>(it - r.begin());
  };
}

}  // namespace

MatchingWalker::MatchingWalker(const BipartiteRegularGraph& g, Matching& m,
                               Rng& rng)
    : g_(g), m_(m), rng_(rng) {
  if (g.d < 1) throw std::invalid_argument("MatchingWalker: graph has d < 1");
  if (m.match_p.size() != static_cast<std::size_t>(g.n) ||
      m.match_q.size() != static_cast<std::size_t>(g.n))
    throw std::invalid_argument("MatchingWalker: matching does not fit graph");
  free_pos_.assign(g.n, -1);
  for (int p = 0; p < g.n; ++p) {
    if (m.match_p[p] == kUnmatched) {
      free_pos_[p] = static_cast<int>(free_p_.size());
      free_p_.push_back(p);
    }
  }
  super_pos_.assign(g.n, -1);
}

WalkStep MatchingWalker::sample_out_edge(HVertex v) {
  const int d = g_.d;
  switch (v.kind) {
    case HKind::Source: {
      if (free_p_.empty())
        throw std::invalid_argument("sample_out_edge: matching is already perfect");
      std::uniform_int_distribution<int> pick(0, static_cast<int>(free_p_.size()) - 1);
      return {HVertex::free_p(free_p_[pick(rng_)]), -1};
    }
    case HKind::FreeP: {
      const int p = v.index;
      if (p < 0 || p >= g_.n || m_.match_p[p] != kUnmatched)
        throw std::invalid_argument("sample_out_edge: " + to_string(v) +
                                    " is not a free P vertex");
      std::uniform_int_distribution<int> pick(0, d - 1);
      const int i = pick(rng_);
      const int q = g_.row_p(p)[i];
      return {m_.match_q[q] == kUnmatched ? HVertex::free_q(q) : HVertex::super(q), i};
    }
    case HKind::Super: {
      const int q = v.index;
      if (q < 0 || q >= g_.n || m_.match_q[q] == kUnmatched)
        throw std::invalid_argument("sample_out_edge: " + to_string(v) +
                                    " is not a matched Q vertex");
      if (d == 1)
        throw std::logic_error(
            "sample_out_edge: supernode with d = 1 has no out-edges (d = 1 "
            "inputs are short-circuited upstream)");
      const int u = m_.match_q[q];
      int matched_slot = m_.slot_p[u];
      if (matched_slot < 0) {
        // Matching built without slot bookkeeping; designate the first
        // occurrence once and reuse it.
        auto row = g_.row_p(u);
        matched_slot = static_cast<int>(std::find(row.begin(), row.end(), q) -
                                        row.begin());
        m_.slot_p[u] = matched_slot;
      }
      std::uniform_int_distribution<int> pick(0, d - 1);
      int i;
      do {
        i = pick(rng_);
      } while (i == matched_slot);
      const int q2 = g_.row_p(u)[i];
      return {m_.match_q[q2] == kUnmatched ? HVertex::free_q(q2) : HVertex::super(q2),
              i};
    }
    case HKind::FreeQ: {
      const int q = v.index;
      if (q < 0 || q >= g_.n || m_.match_q[q] != kUnmatched)
        throw std::invalid_argument("sample_out_edge: " + to_string(v) +
                                    " is not a free Q vertex");
      return {HVertex::sink(), -1};
    }
    case HKind::Sink:
      throw std::invalid_argument("sample_out_edge: the sink has no out-edges");
  }
  throw std::logic_error("sample_out_edge: bad vertex kind");
}

WalkOutcome MatchingWalker::walk(long long max_steps) {
  if (free_p_.empty())
    throw std::invalid_argument("walk: matching is already perfect");
  return detail::run_loop_erased_walk(
      max_steps, super_pos_, [this](HVertex v) { return sample_out_edge(v); });
}

void MatchingWalker::augment(std::span<const WalkStep> path) {
  detail::apply_augmentation(m_, path, graph_slot_resolver(g_),
                             /*trusted_simple=*/true);
  const int p0 = path[1].v.index;
  const int at = free_pos_[p0];
  free_pos_[free_p_.back()] = at;
  std::swap(free_p_[at], free_p_.back());
  free_p_.pop_back();
  free_pos_[p0] = -1;
}

WalkStep sample_out_edge(const BipartiteRegularGraph& g, const Matching& m,
                         HVertex v, Rng& rng) {
  Matching copy = m;
  MatchingWalker walker(g, copy, rng);
  return walker.sample_out_edge(v);
}

WalkOutcome truncated_walk(const BipartiteRegularGraph& g, const Matching& m,
                           long long b, Rng& rng) {
  if (b < 1) throw std::invalid_argument("truncated_walk: budget must be >= 1");
  Matching copy = m;
  MatchingWalker walker(g, copy, rng);
  return walker.walk(b);
}

void augment(const BipartiteRegularGraph& g, Matching& m,
             std::span<const WalkStep> path) {
  detail::apply_augmentation(m, path, graph_slot_resolver(g));
}

long long untruncated_step_cap(int n) {
  const long long log_ceil =
      n > 1 ? static_cast<long long>(std::ceil(std::log(static_cast<double>(n))))
            : 0;
  return 10000LL * n * (log_ceil + 1);
}

FindResult find_perfect_matching(const BipartiteRegularGraph& g, Rng& rng,
                                 bool truncated, bool validate_input) {
  if (validate_input)
    if (auto err = validate(g))
      throw std::invalid_argument("find_perfect_matching: invalid graph: " + *err);
  FindResult result{Matching(g.n), {}};
  if (g.n == 0) return result;
  if (g.d == 1) {
    // A 1-regular graph is its own perfect matching.
    for (int p = 0; p < g.n; ++p) {
      const int q = g.row_p(p)[0];
      result.matching.match_p[p] = q;
      result.matching.match_q[q] = p;
      result.matching.slot_p[p] = 0;
    }
    result.matching.size = g.n;
    return result;
  }
  MatchingWalker engine(g, result.matching, rng);
  const long long cap = truncated ? -1 : untruncated_step_cap(g.n);
  result.stats = detail::drive_to_perfect(engine, g.n, truncated, cap);
  return result;
}

}  // namespace regmatch
