#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regmatch/graph.hpp"

namespace regmatch {

enum class GameMode { Evasive, NonEvasive };
enum class GSide : std::uint8_t { P, Q };

struct GVertex {
  GSide side = GSide::P;
  int index = 0;  // in [0, 4d); the terminals are not queryable
  friend bool operator==(const GVertex&, const GVertex&) = default;
};

struct ProbeRecord {
  long long probe = 0;  // 1-based probe number
  GVertex u;
  int v = -1;                // answered neighbor, opposite-side index
  bool nonevasive = false;   // answered from the committed graph
  bool hidden_edge = false;  // reveals an edge of the hidden cross matching
};

// The probe game against an adaptive adversary. Probing vertex u reveals one
// more neighbor. While evasive, answers are chosen to keep the revealed graph
// a subgraph of some member of the canonical family without committing to a
// hidden matching; once a further evasive answer would make that impossible,
// a concrete canonical graph is committed and all later answers come from it.
// The terminals' edges (s into P1, t into Q2, lowest indices) are revealed up
// front at no cost.
class AdversaryGame {
 public:
  explicit AdversaryGame(int d);

  int d() const { return d_; }
  int per_side() const { return 4 * d_; }
  GameMode mode() const { return mode_; }
  long long probe_count() const { return probes_; }
  long long switch_probe() const { return switch_probe_; }        // -1 while evasive
  long long first_reveal_probe() const { return first_reveal_; }  // -1 until hit

  // Answers one probe; throws if u is saturated (prober contract violation).
  int answer_query(GVertex u);

  const std::vector<int>& revealed(GVertex u) const;
  int degree(GVertex u) const;  // includes terminal edges
  const std::vector<int>& s_neighbors() const { return s_nbrs_; }
  const std::vector<int>& t_neighbors() const { return t_nbrs_; }
  const std::vector<ProbeRecord>& transcript() const { return transcript_; }

  // The committed graph, or a completion of the current revealed state if the
  // game is still evasive (callable at any point; the revealed graph always
  // extends to a canonical member while evasive).
  CanonicalGraph complete_canonical() const;
  const CanonicalGraph* committed() const {
    return committed_ ? &*committed_ : nullptr;
  }

 private:
  struct Completion {
    CanonicalGraph graph;
    std::vector<std::vector<int>> fresh_p, fresh_q;  // per-vertex unrevealed edges
  };

  int evasive_candidate(GVertex u) const;  // -1 if no legal evasive answer
  void record(GVertex u, int v);
  Completion build_completion(std::optional<GVertex> avoid) const;
  void commit(GVertex pending);

  int d_ = 0;
  GameMode mode_ = GameMode::Evasive;
  long long probes_ = 0;
  long long switch_probe_ = -1;
  long long first_reveal_ = -1;
  std::vector<std::vector<int>> n_p_, n_q_;  // revealed P-Q neighbor lists
  std::vector<int> deg_p_, deg_q_;           // includes terminal edges
  std::vector<char> adj_;                    // revealed P-Q incidence matrix
  std::vector<int> s_nbrs_, t_nbrs_;
  int free_q1_ = 0, free_p2_ = 0;
  std::optional<CanonicalGraph> committed_;
  std::vector<std::vector<int>> pending_p_, pending_q_;  // unrevealed answers
  std::vector<std::size_t> pending_at_p_, pending_at_q_;
  std::vector<ProbeRecord> transcript_;
};

// A deterministic probe strategy. next() returns the vertex to probe, or
// nullopt to halt claiming a perfect matching has been found.
class Prober {
 public:
  virtual ~Prober() = default;
  virtual std::optional<GVertex> next(const AdversaryGame& game) = 0;
  virtual const char* name() const = 0;
};

// Reads adjacency arrays front to back, vertex by vertex.
class SequentialScanProber : public Prober {
 public:
  std::optional<GVertex> next(const AdversaryGame& game) override;
  const char* name() const override { return "scan"; }
};

// Grows a matching on the revealed graph by DFS augmentation and probes the
// lowest-index unmatched unsaturated vertex.
class GreedyAugmentingProber : public Prober {
 public:
  std::optional<GVertex> next(const AdversaryGame& game) override;
  const char* name() const override { return "greedy"; }

 private:
  void sync(const AdversaryGame& game);
  bool try_augment(int root);

  bool initialized_ = false;
  int d_ = 0;
  std::size_t seen_ = 0;  // transcript entries already folded in
  std::vector<std::vector<int>> adj_;  // left (P + t) -> right (Q + s)
  std::vector<int> match_l_, match_r_;
  std::vector<char> visited_;
};

struct GameResult {
  long long probes_before_reveal = 0;  // probes answered before the first
                                       // hidden-matching edge came back
  std::vector<ProbeRecord> transcript;
  CanonicalGraph committed;
};

// Drives the prober until a hidden edge is revealed (or it halts). Throws on
// prober contract violations, reporting the transcript position.
GameResult run_game(Prober& prober, int d);

}  // namespace regmatch
