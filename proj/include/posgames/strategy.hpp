#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/graph.hpp"

namespace posgames {

inline Side other(Side s) { return s == Side::a ? Side::b : Side::a; }

namespace detail {

// Per-element danger s(z) = sum over sets without a `hit` element of 2^-open(F),
// accumulated only on free elements.
inline std::vector<double> danger(const std::vector<Owner>& own, const Family& fam, Owner hit) {
  std::vector<double> w(own.size(), 0.0);
  for (const auto& f : fam) {
    int open = 0;
    bool alive = true;
    for (int e : f) {
      if (own[e] == hit) {
        alive = false;
        break;
      }
      if (own[e] == Owner::free) ++open;
    }
    if (!alive) continue;
    double v = std::ldexp(1.0, -open);
    for (int e : f)
      if (own[e] == Owner::free) w[e] += v;
  }
  return w;
}

inline double potential(const std::vector<Owner>& own, const Family& fam, Owner hit) {
  double total = 0;
  for (const auto& f : fam) {
    int open = 0;
    bool alive = true;
    for (int e : f) {
      if (own[e] == hit) {
        alive = false;
        break;
      }
      if (own[e] == Owner::free) ++open;
    }
    if (alive) total += std::ldexp(1.0, -open);
  }
  return total;
}

inline int argmax_free(const std::vector<Owner>& own, const std::vector<double>& w) {
  int best = -1;
  for (int e = 0; e < static_cast<int>(own.size()); ++e)
    if (own[e] == Owner::free && (best < 0 || w[e] > w[best])) best = e;
  return best;
}

inline int argmin_free(const std::vector<Owner>& own, const std::vector<double>& w) {
  int best = -1;
  for (int e = 0; e < static_cast<int>(own.size()); ++e)
    if (own[e] == Owner::free && (best < 0 || w[e] < w[best])) best = e;
  return best;
}

}  // namespace detail

// Sum over sets not yet hit by `hitter` of 2^-(free elements in the set).
inline double potential(const GameState& s, const Family& fam, Side hitter) {
  return detail::potential(s.owners(), fam, owner_of(hitter));
}

// Potential with Breaker (side b) as the hitting side.
inline double es_potential(const GameState& s, const Family& fam) { return potential(s, fam, Side::b); }

// Criterion quantity sum 2^{1-|F|} for Maker-Breaker and Waiter-Client.
inline double es_criterion(const Family& fam) {
  double t = 0;
  for (const auto& f : fam) t += std::ldexp(1.0, 1 - static_cast<int>(f.size()));
  return t;
}

// Criterion quantity sum 2^{-|F|} for Client-Waiter and Avoider-Enforcer.
inline double cw_criterion(const Family& fam) {
  double t = 0;
  for (const auto& f : fam) t += std::ldexp(1.0, -static_cast<int>(f.size()));
  return t;
}

inline std::vector<double> element_danger(const GameState& s, const Family& fam, Side hitter) {
  return detail::danger(s.owners(), fam, owner_of(hitter));
}

inline int es_blocker_move(const GameState& s, const Family& fam) {
  require(s.free_count() > 0, ErrorCode::game_over, "no free element");
  return detail::argmax_free(s.owners(), detail::danger(s.owners(), fam, Owner::b));
}

// Blocker move in a (1:b) game: b greedy picks, each re-evaluated after the previous.
inline Move es_blocker_claim(const GameState& s, const Family& fam) {
  require(s.free_count() > 0, ErrorCode::game_over, "no free element");
  auto own = s.owners();
  Move mv{s.to_move(), {}};
  int k = s.claim_size(s.to_move());
  for (int i = 0; i < k; ++i) {
    int e = detail::argmax_free(own, detail::danger(own, fam, Owner::b));
    own[e] = Owner::b;
    mv.elements.push_back(e);
  }
  std::sort(mv.elements.begin(), mv.elements.end());
  return mv;
}

// Waiter offer forcing Client to hit every set when sum 2^{1-|F|} < 1.
// Client's pick changes the potential by |s(x)-s(y)| - C(x,y) in the worst
// case, where C(x,y) is the weight of live sets containing both; the offer
// minimises that quantity, ties to the lexicographically smallest pair.
inline std::vector<int> wc_transversal_move(const GameState& s, const Family& fam) {
  require(s.rules() == Rules::WC && s.to_move() == Actor::waiter, ErrorCode::illegal_move, "Waiter is not to offer");
  require(s.bias() == 1, ErrorCode::invalid_configuration, "transversal offers are defined for (1:1)");
  require(s.free_count() >= 2, ErrorCode::illegal_move, "leftover rule applies");
  const auto& own = s.owners();
  auto w = detail::danger(own, fam, Owner::a);
  auto free = s.free_elements();
  int nf = static_cast<int>(free.size());
  std::vector<int> index(own.size(), -1);
  for (int i = 0; i < nf; ++i) index[free[i]] = i;
  std::vector<double> common(static_cast<std::size_t>(nf) * nf, 0.0);
  for (const auto& f : fam) {
    int open = 0;
    bool alive = true;
    for (int e : f) {
      if (own[e] == Owner::a) {
        alive = false;
        break;
      }
      if (own[e] == Owner::free) ++open;
    }
    if (!alive) continue;
    double v = std::ldexp(1.0, -open);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (own[f[i]] != Owner::free) continue;
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        if (own[f[j]] != Owner::free) continue;
        int x = index[f[i]], y = index[f[j]];
        common[static_cast<std::size_t>(std::min(x, y)) * nf + std::max(x, y)] += v;
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick;
  for (int i = 0; i < nf; ++i)
    for (int j = i + 1; j < nf; ++j) {
      double val = std::abs(w[free[i]] - w[free[j]]) - common[static_cast<std::size_t>(i) * nf + j];
      if (val < best - 1e-15) {
        best = val;
        pick = {free[i], free[j]};
      }
    }
  return pick;
}

// Second-player transversal moves.  Client-Waiter: Client picks from the offer
// the element of larger danger.  Avoider-Enforcer: the second player claims the
// element of least danger, forcing the first player to hit every set.
inline int second_player_transversal_move(const GameState& s, const Family& fam) {
  require(!s.finished(), ErrorCode::game_over, "game is finished");
  if (s.rules() == Rules::CW) {
    require(s.to_move() == Actor::client && !s.pending_offer().empty(), ErrorCode::illegal_move,
            "Client is not choosing");
    auto w = detail::danger(s.owners(), fam, Owner::a);
    int best = -1;
    for (int e : s.pending_offer())
      if (best < 0 || w[e] > w[best] || (w[e] == w[best] && e < best)) best = e;
    return best;
  }
  require(s.rules() == Rules::AE, ErrorCode::invalid_configuration, "second-player transversal needs CW or AE rules");
  require(side_of(s.to_move()) != s.first(), ErrorCode::illegal_move, "mover is not the second player");
  auto w = detail::danger(s.owners(), fam, owner_of(s.first()));
  return detail::argmin_free(s.owners(), w);
}

struct PairingPlan {
  std::vector<std::pair<int, int>> pairs;
  Side serves = Side::a;
};

// Builds an element -> pair index lookup; throws if pairs overlap.
inline std::vector<int> pairing_index(const PairingPlan& plan, int board_size) {
  std::vector<int> idx(board_size, -1);
  for (int i = 0; i < static_cast<int>(plan.pairs.size()); ++i) {
    auto [x, y] = plan.pairs[i];
    require(x != y && idx[x] < 0 && idx[y] < 0, ErrorCode::invalid_configuration, "pairing plan pairs overlap");
    idx[x] = i;
    idx[y] = i;
  }
  return idx;
}

// Returns the partner of the opponent's last element, or nullopt to pass.
inline std::optional<int> pairing_responder(const PairingPlan& plan, const GameState& s, int last_opponent_element,
                                            const std::vector<int>* index = nullptr) {
  Owner mine = owner_of(plan.serves);
  Owner theirs = owner_of(other(plan.serves));
  std::vector<int> local;
  if (!index) {
    local = pairing_index(plan, s.board().size);
    index = &local;
  }
  int p = (*index)[last_opponent_element];
  if (p < 0) return std::nullopt;
  auto [x, y] = plan.pairs[p];
  int partner = x == last_opponent_element ? y : x;
  if (s.owner(partner) == mine) return std::nullopt;
  if (s.owner(partner) == theirs)
    fail(ErrorCode::pairing_violated, "opponent owns both " + std::to_string(x) + " and " + std::to_string(y));
  return partner;
}

// Maps each graph edge of a board to its element id.
class EdgeIndex {
 public:
  EdgeIndex() = default;
  EdgeIndex(int n, const std::vector<Edge>& labels) : n_(n), id_(static_cast<std::size_t>(n) * n, -1) {
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
      auto [u, v] = labels[i];
      id_[static_cast<std::size_t>(u) * n + v] = i;
      id_[static_cast<std::size_t>(v) * n + u] = i;
    }
  }
  int operator()(int u, int v) const { return id_[static_cast<std::size_t>(u) * n_ + v]; }
  int n() const { return n_; }

 private:
  int n_ = 0;
  std::vector<int> id_;
};

// Deficit-greedy degree builder for side `me` on a graph board.  Picks the
// vertex with the largest (opponent degree - own degree) that still has a free
// incident edge, then its free neighbour of largest deficit; ties to lowest id.
class DeficitBuilder {
 public:
  DeficitBuilder(const GameState& s, int n, Side me, const std::vector<int>& vertices = {})
      : n_(n), me_(me), labels_(&s.board().labels), deficit_(n, 0), free_deg_(n, 0),
        in_(n, vertices.empty() ? 1 : 0), index_(n, s.board().labels) {
    for (int v : vertices) in_[v] = 1;
    for (int e = 0; e < static_cast<int>(labels_->size()); ++e) count(e, s.owner(e));
  }

  // Record that free element e was just claimed by o.
  void observe(int e, Owner o) {
    auto [u, v] = (*labels_)[e];
    if (!in_[u] || !in_[v]) return;
    --free_deg_[u];
    --free_deg_[v];
    count(e, o);
  }

  std::optional<int> choose(const GameState& s) const {
    int best = -1;
    for (int v = 0; v < n_; ++v)
      if (in_[v] && free_deg_[v] > 0 && (best < 0 || deficit_[v] > deficit_[best])) best = v;
    if (best < 0) return std::nullopt;
    int partner = -1;
    for (int u = 0; u < n_; ++u) {
      if (!in_[u] || u == best) continue;
      int e = index_(best, u);
      if (e < 0 || !s.is_free(e)) continue;
      if (partner < 0 || deficit_[u] > deficit_[partner]) partner = u;
    }
    return index_(best, partner);
  }

  int deficit(int v) const { return deficit_[v]; }
  const EdgeIndex& index() const { return index_; }

 private:
  void count(int e, Owner o) {
    auto [u, v] = (*labels_)[e];
    if (!in_[u] || !in_[v]) return;
    if (o == Owner::free) {
      ++free_deg_[u];
      ++free_deg_[v];
      return;
    }
    int d = (o == owner_of(me_)) ? -1 : 1;
    deficit_[u] += d;
    deficit_[v] += d;
  }

  int n_;
  Side me_;
  const std::vector<Edge>* labels_;
  std::vector<int> deficit_;
  std::vector<int> free_deg_;
  std::vector<char> in_;
  EdgeIndex index_;
};

// Maker's move in the minimum-degree game on E(host).
inline int min_degree_strategy(const Graph& host, const GameState& s) {
  require(s.free_count() > 0, ErrorCode::game_over, "no free edge");
  DeficitBuilder b(s, host.n(), side_of(s.to_move()));
  return *b.choose(s);
}

// Maker's move in the (1:2) degree game on K_n[vertices]; nullopt when there
// is nothing to play inside the vertex set.
inline std::optional<int> degree_game_strategy(const GameState& s, int n, const std::vector<int>& vertices) {
  if (vertices.empty()) return std::nullopt;
  DeficitBuilder b(s, n, side_of(s.to_move()), vertices);
  return b.choose(s);
}

inline int min_degree_in(const GameState& s, int n, Side side, const std::vector<int>& vertices = {}) {
  std::vector<int> deg(n, 0);
  std::vector<char> in(n, vertices.empty() ? 1 : 0);
  for (int v : vertices) in[v] = 1;
  Owner o = owner_of(side);
  const auto& lab = s.board().labels;
  for (int e = 0; e < static_cast<int>(lab.size()); ++e)
    if (s.owner(e) == o) {
      ++deg[lab[e].first];
      ++deg[lab[e].second];
    }
  int best = std::numeric_limits<int>::max();
  for (int v = 0; v < n; ++v)
    if (in[v]) best = std::min(best, deg[v]);
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

// k = min |F| must exceed 4 delta^-2 ln |family|.
inline bool multistage_precondition(const Family& fam, double delta) {
  if (fam.empty()) return true;
  std::size_t k = fam.front().size();
  for (const auto& f : fam) k = std::min(k, f.size());
  return static_cast<double>(k) > 4.0 / (delta * delta) * std::log(static_cast<double>(fam.size()));
}

// Claims the free element maximising sum over sets containing it of
// (1+delta)^(opponent share - own share).
inline int multistage_strategy(const GameState& s, const Family& fam, double delta, bool strict = false) {
  require(s.free_count() > 0, ErrorCode::game_over, "no free element");
  if (strict)
    require(multistage_precondition(fam, delta), ErrorCode::precondition_unmet, "min |F| <= 4 delta^-2 ln|F|");
  Owner mine = owner_of(side_of(s.to_move()));
  std::vector<double> w(s.board().size, 0.0);
  for (const auto& f : fam) {
    int diff = 0;
    for (int e : f)
      if (s.owner(e) != Owner::free) diff += s.owner(e) == mine ? -1 : 1;
    double v = std::pow(1.0 + delta, diff);
    for (int e : f)
      if (s.is_free(e)) w[e] += v;
  }
  return detail::argmax_free(s.owners(), w);
}

}  // namespace posgames
