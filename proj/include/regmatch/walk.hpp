#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "regmatch/graph.hpp"
#include "regmatch/rng.hpp"

namespace regmatch {

// Vertex of the implicit augmenting-walk digraph: a source feeding the free
// P vertices, the free vertices of either side, matched pairs contracted to
// supernodes (keyed by their Q endpoint), and a sink behind the free Q
// vertices. The digraph itself is never materialized; transitions sample the
// adjacency arrays directly.
enum class HKind : std::uint8_t { Source, FreeP, Super, FreeQ, Sink };

struct HVertex {
  HKind kind = HKind::Source;
  int index = -1;  // p for FreeP, q for Super/FreeQ, unused otherwise

  static HVertex source() { return {HKind::Source, -1}; }
  static HVertex sink() { return {HKind::Sink, -1}; }
  static HVertex free_p(int p) { return {HKind::FreeP, p}; }
  static HVertex free_q(int q) { return {HKind::FreeQ, q}; }
  static HVertex super(int q) { return {HKind::Super, q}; }
  friend bool operator==(const HVertex&, const HVertex&) = default;
};

std::string to_string(const HVertex& v);

// One walk step: the vertex entered plus the adjacency slot that was sampled
// to enter it (a slot of the previous vertex's row; -1 for the slotless
// Source->FreeP and FreeQ->Sink bundles).
struct WalkStep {
  HVertex v;
  int slot = -1;
};

struct WalkOutcome {
  bool success = false;
  std::vector<WalkStep> path;  // loop-erased Source..Sink path, success only
  long long steps_used = 0;
};

struct PhaseStats {
  long long budget = 0;  // -1 for untruncated phases
  long long restarts = 0;
  long long steps = 0;
};

struct WalkStats {
  std::vector<PhaseStats> phases;
  long long total_steps = 0;
  long long total_restarts = 0;
  long long augmentations = 0;
};

// Step budget for the j-th augmentation: ceil(2*(2 + n/(n-j))).
long long budget(int n, int j);

// Removes loops from a raw step sequence (Source..Sink). Only supernodes can
// repeat, so the erasure keys on the Super's Q index: on a revisit the stack
// is cut back to the first occurrence.
std::vector<WalkStep> loop_erase(std::span<const WalkStep> steps);

// Walk engine bound to one graph, one matching and one generator. walk()
// performs loop erasure online, so a successful outcome already carries a
// simple path; augment() applies it and keeps the free-vertex pool current.
class MatchingWalker {
 public:
  MatchingWalker(const BipartiteRegularGraph& g, Matching& m, Rng& rng);

  // Each call costs exactly one step, including the deterministic
  // FreeQ->Sink hop.
  WalkStep sample_out_edge(HVertex v);

  // max_steps < 0 means unbounded.
  WalkOutcome walk(long long max_steps);

  void augment(std::span<const WalkStep> path);

  int matching_size() const { return m_.size; }

 private:
  const BipartiteRegularGraph& g_;
  Matching& m_;
  Rng& rng_;
  std::vector<int> free_p_;    // unmatched P vertices, unordered pool
  std::vector<int> free_pos_;  // position of p in free_p_, -1 if matched
  std::vector<int> super_pos_; // walk scratch: stack position per Q index
};

// One-shot conveniences over MatchingWalker; the matching is copied where the
// operation must not mutate it.
WalkStep sample_out_edge(const BipartiteRegularGraph& g, const Matching& m,
                         HVertex v, Rng& rng);
WalkOutcome truncated_walk(const BipartiteRegularGraph& g, const Matching& m,
                           long long b, Rng& rng);
void augment(const BipartiteRegularGraph& g, Matching& m,
             std::span<const WalkStep> path);

struct FindResult {
  Matching matching;
  WalkStats stats;
};

// Full driver: repeated truncated walks with budget(n, j), or untruncated
// walks under a generous global step cap whose breach signals a bug.
// validate_input=false skips the O(m) input check for callers that already
// validated (e.g. a freshly generated or file-checked graph on a timed path).
FindResult find_perfect_matching(const BipartiteRegularGraph& g, Rng& rng,
                                 bool truncated = true,
                                 bool validate_input = true);

long long untruncated_step_cap(int n);

namespace detail {

// Random walk with online loop erasure. super_pos must be sized past every Q
// index and hold -1 everywhere; it is restored before returning.
template <class SampleFn>
WalkOutcome run_loop_erased_walk(long long max_steps,
                                 std::vector<int>& super_pos,
                                 SampleFn&& sample) {
  WalkOutcome out;
  auto& path = out.path;
  path.push_back({HVertex::source(), -1});
  auto cleanup = [&] {
    for (const auto& st : path)
      if (st.v.kind == HKind::Super) super_pos[st.v.index] = -1;
  };
  while (path.back().v.kind != HKind::Sink) {
    if (max_steps >= 0 && out.steps_used >= max_steps) {
      cleanup();
      path.clear();
      return out;
    }
    WalkStep next = sample(path.back().v);
    ++out.steps_used;
    if (next.v.kind == HKind::Super && super_pos[next.v.index] >= 0) {
      std::size_t keep = static_cast<std::size_t>(super_pos[next.v.index]) + 1;
      for (std::size_t i = keep; i < path.size(); ++i)
        if (path[i].v.kind == HKind::Super) super_pos[path[i].v.index] = -1;
      path.resize(keep);
    } else {
      if (next.v.kind == HKind::Super)
        super_pos[next.v.index] = static_cast<int>(path.size());
      path.push_back(next);
    }
  }
  cleanup();
  out.success = true;
  return out;
}

// Phase loop shared by the regular and the weighted matcher. In truncated
// mode each phase retries walks of budget(n, j) until one succeeds; in
// untruncated mode a single unbounded walk runs per phase. global_cap < 0
// disables the cap, otherwise crossing it throws (it indicates a bug, not an
// expected outcome).
template <class Engine>
WalkStats drive_to_perfect(Engine& eng, int n, bool truncated,
                           long long global_cap) {
  WalkStats stats;
  while (eng.matching_size() < n) {
    PhaseStats ph;
    ph.budget = truncated ? budget(n, eng.matching_size()) : -1;
    for (;;) {
      long long allowed = ph.budget;
      if (global_cap >= 0) {
        long long left = global_cap - stats.total_steps - ph.steps;
        if (left <= 0)
          throw std::runtime_error(
              "internal error: walk step cap exceeded (bug or invalid input)");
        allowed = allowed < 0 ? left : std::min(allowed, left);
      }
      WalkOutcome out = eng.walk(allowed);
      ph.steps += out.steps_used;
      if (out.success) {
        eng.augment(out.path);
        break;
      }
      // An untruncated walk can only fail by hitting the global cap.
      if (!truncated)
        throw std::runtime_error(
            "internal error: walk step cap exceeded (bug or invalid input)");
      ++ph.restarts;
    }
    stats.total_steps += ph.steps;
    stats.total_restarts += ph.restarts;
    ++stats.augmentations;
    stats.phases.push_back(ph);
  }
  return stats;
}

// Shared augmentation: validates the path shape against the matching, then
// rewires. resolve(row, target, slot_hint) must return the adjacency slot of
// `target` in `row`'s arrival array (validating slot_hint if >= 0) and is the
// only graph-representation-specific piece. trusted_simple skips the
// duplicate scan for walk-engine paths, which are simple by construction.
template <class ResolveFn>
void apply_augmentation(Matching& m, std::span<const WalkStep> path,
                        ResolveFn&& resolve, bool trusted_simple = false) {
  if (path.size() < 4 || path.front().v.kind != HKind::Source ||
      path.back().v.kind != HKind::Sink ||
      path[1].v.kind != HKind::FreeP ||
      path[path.size() - 2].v.kind != HKind::FreeQ)
    throw std::invalid_argument("augment: malformed path shape");
  const int p0 = path[1].v.index;
  if (p0 < 0 || p0 >= static_cast<int>(m.match_p.size()) ||
      m.match_p[p0] != kUnmatched)
    throw std::invalid_argument("augment: path does not start at a free P vertex");
  const int q_last = path[path.size() - 2].v.index;
  if (q_last < 0 || q_last >= static_cast<int>(m.match_q.size()) ||
      m.match_q[q_last] != kUnmatched)
    throw std::invalid_argument("augment: path does not end at a free Q vertex");

  // New pairs (row, q, slot), with supernode mates resolved before mutation.
  std::vector<int> rows, qs, slots;
  int prev_row = p0;
  for (std::size_t i = 2; i + 1 < path.size(); ++i) {
    const auto& st = path[i];
    const int q = st.v.index;
    if (st.v.kind == HKind::Super) {
      if (q < 0 || q >= static_cast<int>(m.match_q.size()) ||
          m.match_q[q] == kUnmatched)
        throw std::invalid_argument("augment: supernode on an unmatched Q vertex");
    } else if (st.v.kind != HKind::FreeQ) {
      throw std::invalid_argument("augment: unexpected vertex kind inside path");
    }
    rows.push_back(prev_row);
    qs.push_back(q);
    slots.push_back(resolve(prev_row, q, st.slot));
    if (st.v.kind == HKind::Super) prev_row = m.match_q[q];
  }
  if (!trusted_simple) {
    std::vector<int> sorted = qs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("augment: path is not simple");
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.match_p[rows[i]] = qs[i];
    m.match_q[qs[i]] = rows[i];
    m.slot_p[rows[i]] = slots[i];
  }
  ++m.size;
}

}  // namespace detail
}  // namespace regmatch
