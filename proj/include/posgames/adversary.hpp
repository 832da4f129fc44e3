#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/subboards.hpp"

namespace posgames {

enum class AdversaryKind { random, greedy_blocker, pair_degree_attacker, isolator };

inline std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::random: return "random";
    case AdversaryKind::greedy_blocker: return "greedy-blocker";
    case AdversaryKind::pair_degree_attacker: return "pair-degree-attacker";
    case AdversaryKind::isolator: return "isolator";
  }
  return "?";
}

inline AdversaryKind adversary_from_string(const std::string& s) {
  for (auto k : {AdversaryKind::random, AdversaryKind::greedy_blocker, AdversaryKind::pair_degree_attacker,
                 AdversaryKind::isolator})
    if (to_string(k) == s) return k;
  fail(ErrorCode::invalid_configuration, "unknown adversary: " + s);
}

// The builder's view of the element whose loss hurts it most right now.
using DamageHint = std::function<std::optional<int>(const GameState&)>;

// Opponent of a builder on the board of K_n: Breaker in Maker-Breaker, Client in
// Waiter-Client.  Side a's graph (Maker's, or Client's) is the one the
// builder shapes.
//   random                uniform free element (Breaker) or offered element (Client)
//   greedy-blocker        Breaker: the builder's damage hint; Client: the offered
//                         edge whose endpoints share the fewest Client neighbours
//   pair-degree-attacker  Breaker: edge from the lowest builder-degree vertex to
//                         the highest one; Client: the offered edge with the
//                         smaller Client degree sum
//   isolator              Breaker: edge at the lowest builder-degree vertex;
//                         Client: the offered edge keeping the poorest endpoint poorest
class Adversary {
 public:
  Adversary(AdversaryKind kind, int n, std::uint64_t seed)
      : kind_(kind), n_(n), rng_(seed), deg_(n, 0), free_deg_(n, n - 1), mine_(n) {
    pool_.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int e = 0; e < static_cast<int>(pool_.size()); ++e) pool_[e] = e;
  }

  AdversaryKind kind() const { return kind_; }

  // Record that element e (an edge of K_n) went to owner o.
  void observe(const GameState& s, int e, Owner o) {
    auto [u, v] = s.board().labels[e];
    --free_deg_[u];
    --free_deg_[v];
    if (o == Owner::a) {
      ++deg_[u];
      ++deg_[v];
      mine_.add_edge(u, v);
    }
  }

  // Breaker's claim in a (1:1) Maker-Breaker game.
  int claim(const GameState& s, const DamageHint& hint = {}) {
    require(s.free_count() > 0, ErrorCode::game_over, "no free element");
    switch (kind_) {
      case AdversaryKind::random: return random_free(s);
      case AdversaryKind::greedy_blocker: {
        if (hint)
          if (auto e = hint(s); e && s.is_free(*e)) return *e;
        return random_free(s);
      }
      case AdversaryKind::isolator: {
        int v = poorest();
        return v < 0 ? random_free(s) : edge_at(s, v, false);
      }
      case AdversaryKind::pair_degree_attacker: {
        int v = poorest();
        return v < 0 ? random_free(s) : edge_at(s, v, true);
      }
    }
    return random_free(s);
  }

  // Client's choice from the pending offer.
  int choose(const GameState& s) {
    const auto& offer = s.pending_offer();
    require(!offer.empty(), ErrorCode::illegal_move, "no pending offer");
    const auto& lab = s.board().labels;
    auto score = [&](int e) -> double {
      auto [u, v] = lab[e];
      switch (kind_) {
        case AdversaryKind::greedy_blocker:
          return static_cast<double>((mine_.row(u) & mine_.row(v)).count()) * 4 * n_ + deg_[u] + deg_[v];
        case AdversaryKind::pair_degree_attacker: return deg_[u] + deg_[v];
        case AdversaryKind::isolator: return -std::min(deg_[u], deg_[v]);
        case AdversaryKind::random: break;
      }
      return 0;
    };
    if (kind_ == AdversaryKind::random) return offer[rng_() % offer.size()];
    int best = offer[0];
    for (int e : offer)
      if (score(e) < score(best) || (score(e) == score(best) && e < best)) best = e;
    return best;
  }

 private:
  int random_free(const GameState& s) {
    while (true) {
      std::size_t i = rng_() % pool_.size();
      int e = pool_[i];
      if (s.is_free(e)) return e;
      pool_[i] = pool_.back();
      pool_.pop_back();
    }
  }

  int poorest() const {
    int best = -1;
    for (int v = 0; v < n_; ++v)
      if (free_deg_[v] > 0 && (best < 0 || deg_[v] < deg_[best])) best = v;
    return best;
  }

  int edge_at(const GameState& s, int v, bool richest) const {
    int pick = -1, pickDeg = 0;
    for (int u = 0; u < n_; ++u) {
      if (u == v || !s.is_free(kn_edge(n_, u, v))) continue;
      int d = richest ? -deg_[u] : deg_[u];
      if (pick < 0 || d < pickDeg) {
        pick = u;
        pickDeg = d;
      }
    }
    return kn_edge(n_, v, pick);
  }

  AdversaryKind kind_;
  int n_;
  std::mt19937_64 rng_;
  std::vector<int> deg_;
  std::vector<int> free_deg_;
  Graph mine_;
  std::vector<int> pool_;
};

}  // namespace posgames
