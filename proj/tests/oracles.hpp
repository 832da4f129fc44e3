#pragma once

// Independent reference implementations used only by tests.  They share no
// code with the library beyond GameState and are deliberately naive.

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "posgames/game.hpp"

namespace oracle {

using posgames::Actor;
using posgames::Family;
using posgames::GameState;
using posgames::Move;
using posgames::Owner;
using posgames::Rules;

inline bool a_holds_full_set(const GameState& s, const Family& fam) {
  for (const auto& f : fam) {
    bool full = true;
    for (int e : f) full = full && s.owner(e) == Owner::a;
    if (full) return true;
  }
  return false;
}

// Plain minimax over legal_moves without memoisation.  Returns true iff the
// game ends with side a owning a full winning set under optimal play.
inline bool naive_full_set_value(const GameState& s, const Family& fam) {
  if (a_holds_full_set(s, fam)) return true;
  if (s.finished()) return false;
  auto moves = posgames::legal_moves(s);
  bool pushes_full;
  switch (s.rules()) {
    case Rules::MB: pushes_full = s.to_move() == Actor::maker; break;
    case Rules::WC: pushes_full = s.to_move() == Actor::waiter; break;
    case Rules::CW: pushes_full = s.to_move() == Actor::client; break;
    case Rules::AE: pushes_full = s.to_move() == Actor::enforcer; break;
  }
  if (s.offer_game() && s.leftover_turn()) return naive_full_set_value(posgames::apply_move(s, moves[0]), fam);
  for (const auto& m : moves) {
    bool v = naive_full_set_value(posgames::apply_move(s, m), fam);
    if (v == pushes_full) return v;
  }
  return !pushes_full;
}

inline Actor naive_winner(const posgames::Board& b, const Family& fam, Rules r, int bias,
                          std::optional<posgames::Side> first = std::nullopt) {
  auto s = posgames::new_game(b, r, bias, first);
  bool full = naive_full_set_value(s, fam);
  return full ? posgames::builder_win_role(r) : posgames::blocker_win_role(r);
}

// Edmonds-Karp on an adjacency matrix.
inline int max_flow(std::vector<std::vector<int>> cap, int s, int t) {
  int n = static_cast<int>(cap.size());
  int flow = 0;
  while (true) {
    std::vector<int> par(n, -1);
    par[s] = s;
    std::deque<int> q{s};
    while (!q.empty() && par[t] < 0) {
      int u = q.front();
      q.pop_front();
      for (int v = 0; v < n; ++v)
        if (par[v] < 0 && cap[u][v] > 0) {
          par[v] = u;
          q.push_back(v);
        }
    }
    if (par[t] < 0) return flow;
    int aug = std::numeric_limits<int>::max();
    for (int v = t; v != s; v = par[v]) aug = std::min(aug, cap[par[v]][v]);
    for (int v = t; v != s; v = par[v]) {
      cap[par[v]][v] -= aug;
      cap[v][par[v]] += aug;
    }
    flow += aug;
  }
}

// Kuhn's augmenting path matching; adj[a] lists right vertices.
inline int kuhn_matching(const std::vector<std::vector<int>>& adj, int right) {
  std::vector<int> match(right, -1);
  int size = 0;
  for (int a = 0; a < static_cast<int>(adj.size()); ++a) {
    std::vector<char> seen(right, 0);
    std::function<bool(int)> try_kuhn = [&](int u) {
      for (int v : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        if (match[v] < 0 || try_kuhn(match[v])) {
          match[v] = u;
          return true;
        }
      }
      return false;
    };
    if (try_kuhn(a)) ++size;
  }
  return size;
}

// Union-find check that an edge list on the given vertex set forms a tree.
inline bool is_tree(const std::vector<int>& vertices, const std::vector<std::pair<int, int>>& edges) {
  if (vertices.empty()) return false;
  if (edges.size() + 1 != vertices.size()) return false;
  std::map<int, int> parent;
  for (int v : vertices) parent[v] = v;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (auto [u, v] : edges) {
    if (!parent.count(u) || !parent.count(v)) return false;
    int a = find(u), b = find(v);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

}  // namespace oracle

namespace oracle {

inline std::string key_of(const GameState& s) {
  std::string k(s.owners().size() + 1, '0');
  for (std::size_t i = 0; i < s.owners().size(); ++i) k[i] = static_cast<char>('0' + static_cast<int>(s.owner(i)));
  k.back() = static_cast<char>('a' + static_cast<int>(s.to_move()));
  return k;
}

inline bool every_set_hit(const GameState& s, const Family& fam, Owner by) {
  for (const auto& f : fam) {
    bool hit = false;
    for (int e : f) hit = hit || s.owner(e) == by;
    if (!hit) return false;
  }
  return true;
}

// Maker-Breaker: does some Maker line complete a set against a fixed Breaker policy?
template <class Policy>
bool maker_beats_policy(const GameState& s, const Family& fam, Policy&& policy, std::map<std::string, bool>& memo) {
  if (a_holds_full_set(s, fam)) return true;
  if (s.finished()) return false;
  auto key = key_of(s);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  bool r = false;
  if (s.to_move() == Actor::maker) {
    for (int e : s.free_elements()) {
      if (maker_beats_policy(posgames::apply_move(s, {Actor::maker, {e}}), fam, policy, memo)) {
        r = true;
        break;
      }
    }
  } else {
    r = maker_beats_policy(posgames::apply_move(s, policy(s)), fam, policy, memo);
  }
  memo[key] = r;
  return r;
}

// Waiter-Client: with Waiter following `offer`, does Client hit every set in
// every leaf of the full tree of Client replies?  Counts leaves.
template <class Offer>
bool waiter_forces_transversal(const GameState& s, const Family& fam, Offer&& offer, long& leaves) {
  if (s.finished()) {
    ++leaves;
    return every_set_hit(s, fam, Owner::a);
  }
  if (s.leftover_turn()) return waiter_forces_transversal(posgames::apply_move(s, posgames::legal_moves(s)[0]), fam, offer, leaves);
  auto o = offer(s);
  auto after = posgames::apply_move(s, {Actor::waiter, o});
  bool ok = true;
  for (int e : o) ok = waiter_forces_transversal(posgames::apply_move(after, {Actor::client, {e}}), fam, offer, leaves) && ok;
  return ok;
}

// Client-Waiter: Waiter plays every possible offer, Client follows `pick`.
template <class Pick>
bool client_always_hits(const GameState& s, const Family& fam, Pick&& pick, std::map<std::string, bool>& memo) {
  if (s.finished()) return every_set_hit(s, fam, Owner::a);
  auto key = key_of(s);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  bool r = true;
  for (const auto& m : posgames::legal_moves(s)) {
    auto t = posgames::apply_move(s, m);
    if (t.to_move() == Actor::client && !t.finished()) t.apply({Actor::client, {pick(t)}});
    if (!client_always_hits(t, fam, pick, memo)) {
      r = false;
      break;
    }
  }
  memo[key] = r;
  return r;
}

// Avoider-Enforcer: first player exhaustive, second player follows `policy`;
// true iff the first player hits every set in every line.
template <class Policy>
bool first_player_always_hits(const GameState& s, const Family& fam, Policy&& policy, std::map<std::string, bool>& memo) {
  posgames::Owner firstOwner = posgames::owner_of(s.first());
  if (s.finished()) return every_set_hit(s, fam, firstOwner);
  auto key = key_of(s);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  bool r = true;
  if (posgames::side_of(s.to_move()) == s.first()) {
    for (const auto& m : posgames::legal_moves(s))
      if (!first_player_always_hits(posgames::apply_move(s, m), fam, policy, memo)) {
        r = false;
        break;
      }
  } else {
    r = first_player_always_hits(posgames::apply_move(s, {s.to_move(), {policy(s)}}), fam, policy, memo);
  }
  memo[key] = r;
  return r;
}

}  // namespace oracle
