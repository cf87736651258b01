#include "regmatch/adversary.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace regmatch {

namespace {

std::string vertex_str(GVertex u) {
  return (u.side == GSide::P ? "P" : "Q") + std::to_string(u.index);
}

}  // namespace

AdversaryGame::AdversaryGame(int d) : d_(d) {
  if (d < 1) throw std::invalid_argument("AdversaryGame: d must be positive");
  const int side = 4 * d;
  n_p_.resize(side);
  n_q_.resize(side);
  deg_p_.assign(side, 0);
  deg_q_.assign(side, 0);
  adj_.assign(static_cast<std::size_t>(side) * side, 0);
  free_q1_ = 2 * d;
  free_p2_ = 2 * d;
  // Terminal edges revealed for free: s to the lowest d vertices of P1, t to
  // the lowest d vertices of Q2. They count toward degrees.
  for (int p = 0; p < d; ++p) {
    s_nbrs_.push_back(p);
    ++deg_p_[p];
  }
  for (int q = 2 * d; q < 3 * d; ++q) {
    t_nbrs_.push_back(q);
    ++deg_q_[q];
  }
}

const std::vector<int>& AdversaryGame::revealed(GVertex u) const {
  if (u.index < 0 || u.index >= per_side())
    throw std::invalid_argument("revealed: vertex out of range");
  return u.side == GSide::P ? n_p_[u.index] : n_q_[u.index];
}

int AdversaryGame::degree(GVertex u) const {
  if (u.index < 0 || u.index >= per_side())
    throw std::invalid_argument("degree: vertex out of range");
  return u.side == GSide::P ? deg_p_[u.index] : deg_q_[u.index];
}

int AdversaryGame::evasive_candidate(GVertex u) const {
  // Lowest-index free vertex on the opposite side of u's block that has not
  // been revealed as adjacent to u ("arbitrary" in the strategy; fixing it
  // keeps runs reproducible).
  const int lo = u.index < 2 * d_ ? 0 : 2 * d_;
  const int hi = lo + 2 * d_;
  const int side = per_side();
  for (int v = lo; v < hi; ++v) {
    const bool free_v = (u.side == GSide::P ? deg_q_[v] : deg_p_[v]) < d_;
    if (!free_v) continue;
    const bool known = u.side == GSide::P
                           ? adj_[static_cast<std::size_t>(u.index) * side + v]
                           : adj_[static_cast<std::size_t>(v) * side + u.index];
    if (!known) return v;
  }
  return -1;
}

void AdversaryGame::record(GVertex u, int v) {
  const int side = per_side();
  const int p = u.side == GSide::P ? u.index : v;
  const int q = u.side == GSide::P ? v : u.index;
  n_p_[p].push_back(q);
  n_q_[q].push_back(p);
  adj_[static_cast<std::size_t>(p) * side + q] = 1;
  ++deg_p_[p];
  ++deg_q_[q];
  if (deg_q_[q] == d_ && q < 2 * d_) --free_q1_;
  if (deg_p_[p] == d_ && p >= 2 * d_) --free_p2_;
}

AdversaryGame::Completion AdversaryGame::build_completion(
    std::optional<GVertex> avoid) const {
  Completion result;
  CanonicalGraph& cg = result.graph;
  cg.d = d_;
  const int side = cg.side();  // 4d + 1
  const int t = cg.t_index();
  const int s = cg.s_index();

  std::vector<int> deg_l(side, 0), deg_r(side, 0);
  std::vector<char> used(static_cast<std::size_t>(side) * side, 0);
  std::vector<std::vector<int>> rows(side);
  result.fresh_p.resize(4 * d_);
  result.fresh_q.resize(4 * d_);
  auto add_edge = [&](int l, int r, bool fresh) {
    rows[l].push_back(r);
    used[static_cast<std::size_t>(l) * side + r] = 1;
    ++deg_l[l];
    ++deg_r[r];
    if (fresh && l < 4 * d_ && r < 4 * d_) {
      result.fresh_p[l].push_back(r);
      result.fresh_q[r].push_back(l);
    }
  };

  // Terminal edges first: they were revealed before any probe.
  for (int p : s_nbrs_) add_edge(p, s, false);
  for (int q : t_nbrs_) add_edge(t, q, false);
  // Already-revealed probe answers, in reveal order per vertex.
  for (int p = 0; p < 4 * d_; ++p)
    for (int q : n_p_[p]) add_edge(p, q, false);

  // Hidden matching: lowest-index free vertices on each side, skipping the
  // vertex whose pending probe triggered this completion so its very next
  // answer cannot be a hidden edge.
  std::vector<int> pick_q, pick_p;
  for (int q = 0; q < 2 * d_ && static_cast<int>(pick_q.size()) < d_; ++q) {
    if (deg_r[q] >= d_) continue;
    if (avoid && avoid->side == GSide::Q && avoid->index == q) continue;
    pick_q.push_back(q);
  }
  for (int p = 2 * d_; p < 4 * d_ && static_cast<int>(pick_p.size()) < d_; ++p) {
    if (deg_l[p] >= d_) continue;
    if (avoid && avoid->side == GSide::P && avoid->index == p) continue;
    pick_p.push_back(p);
  }
  if (static_cast<int>(pick_q.size()) < d_ || static_cast<int>(pick_p.size()) < d_)
    throw std::logic_error(
        "build_completion: fewer than d free vertices available for the hidden "
        "matching (evasive invariant broken)");
  for (int i = 0; i < d_; ++i) {
    cg.hidden.emplace_back(pick_p[i], pick_q[i]);
    add_edge(pick_p[i], pick_q[i], true);
  }

  // Fill both blocks to d-regularity: repeatedly pair the lowest deficient
  // vertices, preferring pairs that are not yet adjacent.
  for (int block = 0; block < 2; ++block) {
    const int lo = block * 2 * d_;
    const int hi = lo + 2 * d_;
    int p = lo;
    while (true) {
      while (p < hi && deg_l[p] == d_) ++p;
      if (p == hi) break;
      int q_new = -1, q_any = -1;
      for (int q = lo; q < hi; ++q) {
        if (deg_r[q] == d_) continue;
        if (q_any < 0) q_any = q;
        if (!used[static_cast<std::size_t>(p) * side + q]) {
          q_new = q;
          break;
        }
      }
      const int q = q_new >= 0 ? q_new : q_any;
      if (q < 0)
        throw std::logic_error("build_completion: block degrees out of balance");
      add_edge(p, q, true);
    }
    for (int q = lo; q < hi; ++q)
      if (deg_r[q] != d_)
        throw std::logic_error("build_completion: block degrees out of balance");
  }

  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(side) * d_);
  for (int l = 0; l < side; ++l) {
    if (rows[l].size() != static_cast<std::size_t>(d_))
      throw std::logic_error("build_completion: left degree != d");
    flat.insert(flat.end(), rows[l].begin(), rows[l].end());
  }
  cg.graph = make_graph(side, d_, std::move(flat));
  return result;
}

void AdversaryGame::commit(GVertex pending) {
  std::optional<GVertex> avoid;
  if ((pending.side == GSide::Q && pending.index < 2 * d_) ||
      (pending.side == GSide::P && pending.index >= 2 * d_))
    avoid = pending;
  Completion completion = build_completion(avoid);
  committed_ = std::move(completion.graph);
  pending_p_ = std::move(completion.fresh_p);
  pending_q_ = std::move(completion.fresh_q);
  pending_at_p_.assign(pending_p_.size(), 0);
  pending_at_q_.assign(pending_q_.size(), 0);
  mode_ = GameMode::NonEvasive;
  switch_probe_ = probes_;
}

int AdversaryGame::answer_query(GVertex u) {
  if (u.index < 0 || u.index >= per_side())
    throw std::invalid_argument("answer_query: vertex out of range");
  if (degree(u) >= d_)
    throw std::invalid_argument("answer_query: probe on saturated vertex " +
                                vertex_str(u));
  ++probes_;

  if (mode_ == GameMode::Evasive) {
    const int v = evasive_candidate(u);
    bool would_violate = v < 0;
    if (v >= 0) {
      // The one vertex of Q1 u P2 whose degree this answer raises.
      if (u.side == GSide::P && u.index < 2 * d_)
        would_violate = deg_q_[v] + 1 == d_ && free_q1_ == d_ + 1;
      else if (u.side == GSide::Q && u.index < 2 * d_)
        would_violate = deg_q_[u.index] + 1 == d_ && free_q1_ == d_ + 1;
      else if (u.side == GSide::P)
        would_violate = deg_p_[u.index] + 1 == d_ && free_p2_ == d_ + 1;
      else
        would_violate = deg_p_[v] + 1 == d_ && free_p2_ == d_ + 1;
    }
    if (!would_violate) {
      record(u, v);
      transcript_.push_back({probes_, u, v, false, false});
      return v;
    }
    commit(u);
  }

  auto& pending = u.side == GSide::P ? pending_p_[u.index] : pending_q_[u.index];
  auto& at = u.side == GSide::P ? pending_at_p_[u.index] : pending_at_q_[u.index];
  if (at >= pending.size())
    throw std::logic_error("answer_query: committed graph has no unrevealed "
                           "neighbor left at " + vertex_str(u));
  const int v = pending[at++];
  record(u, v);
  const int p = u.side == GSide::P ? u.index : v;
  const int q = u.side == GSide::P ? v : u.index;
  const bool hidden =
      std::find(committed_->hidden.begin(), committed_->hidden.end(),
                std::make_pair(p, q)) != committed_->hidden.end();
  if (hidden && first_reveal_ < 0) first_reveal_ = probes_;
  transcript_.push_back({probes_, u, v, true, hidden});
  return v;
}

CanonicalGraph AdversaryGame::complete_canonical() const {
  if (committed_) return *committed_;
  return build_completion(std::nullopt).graph;
}

std::optional<GVertex> SequentialScanProber::next(const AdversaryGame& game) {
  for (int p = 0; p < game.per_side(); ++p)
    if (game.degree({GSide::P, p}) < game.d()) return GVertex{GSide::P, p};
  for (int q = 0; q < game.per_side(); ++q)
    if (game.degree({GSide::Q, q}) < game.d()) return GVertex{GSide::Q, q};
  return std::nullopt;
}

void GreedyAugmentingProber::sync(const AdversaryGame& game) {
  const int d = game.d();
  const int left = 4 * d + 1;  // P plus t
  if (!initialized_) {
    initialized_ = true;
    d_ = d;
    adj_.assign(left, {});
    match_l_.assign(left, -1);
    match_r_.assign(left, -1);
    visited_.assign(left, 0);
    for (int p : game.s_neighbors()) adj_[p].push_back(4 * d);  // s
    for (int q : game.t_neighbors()) adj_[4 * d].push_back(q);  // t's row
  }
  const auto& tr = game.transcript();
  for (; seen_ < tr.size(); ++seen_) {
    const auto& rec = tr[seen_];
    const int p = rec.u.side == GSide::P ? rec.u.index : rec.v;
    const int q = rec.u.side == GSide::P ? rec.v : rec.u.index;
    adj_[p].push_back(q);
  }
}

bool GreedyAugmentingProber::try_augment(int root) {
  // One Kuhn DFS over the revealed graph.
  std::fill(visited_.begin(), visited_.end(), 0);
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  std::vector<int> via(adj_.size(), -1);
  while (!stack.empty()) {
    auto& [l, i] = stack.back();
    if (i >= adj_[l].size()) {
      stack.pop_back();
      continue;
    }
    const int r = adj_[l][i++];
    if (visited_[r]) continue;
    visited_[r] = 1;
    via[r] = l;
    const int l2 = match_r_[r];
    if (l2 < 0) {
      // Augment along via[] back to the root.
      int rr = r;
      while (rr >= 0) {
        const int ll = via[rr];
        const int prev = match_l_[ll];
        match_l_[ll] = rr;
        match_r_[rr] = ll;
        rr = prev;
      }
      return true;
    }
    stack.emplace_back(l2, 0);
  }
  return false;
}

std::optional<GVertex> GreedyAugmentingProber::next(const AdversaryGame& game) {
  sync(game);
  const int n = game.per_side();
  for (int l = 0; l < n + 1; ++l)
    if (match_l_[l] < 0 && try_augment(l)) break;

  for (int p = 0; p < n; ++p)
    if (match_l_[p] < 0 && game.degree({GSide::P, p}) < d_)
      return GVertex{GSide::P, p};
  for (int q = 0; q < n; ++q)
    if (match_r_[q] < 0 && game.degree({GSide::Q, q}) < d_)
      return GVertex{GSide::Q, q};
  for (int p = 0; p < n; ++p)
    if (game.degree({GSide::P, p}) < d_) return GVertex{GSide::P, p};
  for (int q = 0; q < n; ++q)
    if (game.degree({GSide::Q, q}) < d_) return GVertex{GSide::Q, q};
  return std::nullopt;  // everything revealed; claim whatever matching we hold
}

GameResult run_game(Prober& prober, int d) {
  AdversaryGame game(d);
  const long long cap = static_cast<long long>(4 * d + 1) * d + 8;
  while (true) {
    std::optional<GVertex> q;
    try {
      q = prober.next(game);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("prober failed after probe ") +
                               std::to_string(game.probe_count()) + ": " + e.what());
    }
    if (!q) {
      throw std::runtime_error(
          "prober claimed a perfect matching before any hidden edge was "
          "revealed (after " + std::to_string(game.probe_count()) + " probes)");
    }
    try {
      game.answer_query(*q);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("prober contract violation at probe " +
                               std::to_string(game.probe_count() + 1) + ": " +
                               e.what());
    }
    if (game.first_reveal_probe() >= 0) break;
    if (game.probe_count() > cap)
      throw std::runtime_error("prober exceeded the probe capacity of the instance");
  }
  GameResult result;
  result.probes_before_reveal = game.first_reveal_probe() - 1;
  result.transcript = game.transcript();
  result.committed = *game.committed();
  return result;
}

}  // namespace regmatch
