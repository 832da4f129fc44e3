#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/graph.hpp"
#include "posgames/strategy.hpp"

namespace posgames {

// N_{v,w} for every ordered pair, stored row-major (v * n + w).
using PairSets = std::vector<Bitset>;

inline PairSets common_neighbor_sets(const Graph& g) {
  int n = g.n();
  PairSets out(static_cast<std::size_t>(n) * n, Bitset(n));
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w)
      if (v != w) out[static_cast<std::size_t>(v) * n + w] = g.row(v) & g.row(w);
  return out;
}

inline int min_pair_set_size(const PairSets& sets, int n) {
  int best = std::numeric_limits<int>::max();
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w)
      if (v != w) best = std::min(best, static_cast<int>(sets[static_cast<std::size_t>(v) * n + w].count()));
  return best;
}

namespace detail {

inline double log_factorial(int k) {
  static thread_local std::vector<double> table{0.0};
  while (static_cast<int>(table.size()) <= k) table.push_back(table.back() + std::log(static_cast<double>(table.size())));
  return table[k];
}

inline double log_binom(int n, int k) {
  if (k < 0 || k > n || n < 0) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Weights of the implicit family of all a-subsets of a star with W Waiter
// edges and f free edges (sets with a Client edge are dead).
//   phi  = sum_j C(W,a-j) C(f,j) 2^-j
//   one  = sum_j C(W,a-j) C(f-1,j-1) 2^-j      (danger of one free edge)
//   two  = sum_j C(W,a-j) C(f-2,j-2) 2^-j      (weight shared by two free edges)
struct StarWeights {
  double phi = 0, one = 0, two = 0;
};

// Summed by term ratios from the first term; the k-shifted sums follow from
// C(f-1,j-1) = C(f,j) j/f and C(f-2,j-2) = C(f,j) j(j-1)/(f(f-1)).
inline StarWeights star_weights(int a, int W, int f) {
  StarWeights out;
  int lo = std::max(a - W, 0), hi = std::min(a, f);
  if (lo > hi) return out;
  static const double ln2 = std::log(2.0);
  double term = std::exp(log_binom(W, a - lo) + log_binom(f, lo) - lo * ln2);
  for (int j = lo;; ++j) {
    out.phi += term;
    if (f >= 1) out.one += term * j / f;
    if (f >= 2) out.two += term * j * (j - 1) / (static_cast<double>(f) * (f - 1));
    if (j == hi) break;
    term *= static_cast<double>(a - j) / (W - a + j + 1) * static_cast<double>(f - j) / (j + 1) * 0.5;
  }
  return out;
}

}  // namespace detail

struct PairDegreeReport {
  int split_attempts = 0;
  double split_floor = 0;
  int split_min = 0;
  double stage1_criterion = 0;  // sum 2^{1-|F|} at the start of Stage I
  double stage2_criterion = 0;
  bool stage1_ok = false;
  bool stage2_ok = false;
  int final_min = 0;            // min over pairs of |N_C(v) cap N_C(w) cap N_vw|
  double final_floor = 0;       // beta n / 500
  std::pair<int, int> worst_pair{-1, -1};
  bool criteria_held() const { return stage1_ok && stage2_ok; }
  bool floor_met() const { return final_min >= final_floor; }
};

// Waiter's two-stage strategy forcing large Client pair degrees on a host graph.
// The game board is any board containing E(host); `index` maps host edges to
// board elements.  Offers are restricted to a window of the lowest-id free stage
// edges at the lowest vertex that has any, sorted by danger, choosing among
// adjacent pairs the one minimising |s(x)-s(y)| - C(x,y).
class PairDegreeWaiter {
 public:
  PairDegreeWaiter(const Graph& host, double beta, PairSets nvw, std::uint64_t seed, int budget = 100)
      : g_(host), n_(host.n()), beta_(beta), nvw_(std::move(nvw)) {
    require(beta > 0 && beta < 1, ErrorCode::invalid_parameter, "beta must lie in (0,1)");
    split(seed, budget);
  }

  const PairDegreeReport& report() const { return report_; }
  const Graph& g1() const { return g1_; }
  const Graph& g2() const { return g2_; }
  int stage() const { return stage_; }

  // Binds the engine to a game whose board labels include every host edge.
  void bind(const GameState& s) {
    require(s.rules() == Rules::WC && s.bias() == 1, ErrorCode::invalid_configuration,
            "pair-degree strategy plays (1:1) Waiter-Client");
    labels_ = &s.board().labels;
    for (auto [u, v] : *labels_)
      require(u < n_ && v < n_, ErrorCode::invalid_configuration, "board edge outside the host vertex set");
    index_ = EdgeIndex(n_, *labels_);
    start_stage(1, s);
  }

  // Next offer, or empty when both stages have no free edges left.
  std::vector<int> offer(const GameState& s) {
    while (true) {
      const Graph& board = stage_ == 1 ? g1_ : g2_;
      int v = lowest_with_free(s, board);
      if (v >= 0) return choose_pair(s, board, v);
      if (stage_ == 2) return {};
      start_stage(2, s);
    }
  }

  // Update after Client picked `chosen` from offer {x, y}.
  void observe(int chosen, int returned) {
    touch(chosen, Owner::a);
    touch(returned, Owner::b);
  }

  // Final check on Client's graph.
  void finish(const GameState& s) {
    Graph c(n_);
    for (auto [u, v] : g_.edges())
      if (s.owner(index_(u, v)) == Owner::a) c.add_edge(u, v);
    report_.final_floor = beta_ * n_ / 500.0;
    report_.final_min = std::numeric_limits<int>::max();
    for (int v = 0; v < n_; ++v)
      for (int w = v + 1; w < n_; ++w) {
        int k = static_cast<int>((c.row(v) & c.row(w) & pair(v, w)).count());
        if (k < report_.final_min) {
          report_.final_min = k;
          report_.worst_pair = {v, w};
        }
      }
  }

 private:
  struct Family {
    int a = 0, W = 0, f = 0;
    detail::StarWeights w;
  };

  const Bitset& pair(int v, int w) const { return nvw_[static_cast<std::size_t>(v) * n_ + w]; }
  // Families centred at c whose star contains the edge cx, as a set of partners w.
  Bitset& holders(int c, int x) { return holders_[static_cast<std::size_t>(c) * n_ + x]; }
  Family& fam(int v, int w) { return fams_[static_cast<std::size_t>(v) * n_ + w]; }

  void split(std::uint64_t seed, int budget) {
    report_.split_floor = beta_ * n_ / 5.0;
    std::mt19937_64 rng(seed);
    auto es = g_.edges();
    int best = -1;
    for (int attempt = 1; attempt <= budget; ++attempt) {
      Graph a(n_), b(n_);
      std::vector<Edge> first;
      for (auto [u, v] : es) {
        if (rng() >> 63)
          first.emplace_back(u, v);
        else
          b.add_edge(u, v);
      }
      // Stage I must end on a full round, so G1 gets an even edge count.
      if (first.size() % 2) {
        b.add_edge(first.back().first, first.back().second);
        first.pop_back();
      }
      for (auto [u, v] : first) a.add_edge(u, v);
      int worst = std::numeric_limits<int>::max();
      for (int v = 0; v < n_ && worst >= report_.split_floor; ++v)
        for (int w = 0; w < n_; ++w)
          if (v != w) worst = std::min(worst, static_cast<int>((a.row(v) & b.row(w) & pair(v, w)).count()));
      best = std::max(best, worst);
      report_.split_attempts = attempt;
      if (worst >= report_.split_floor) {
        report_.split_min = worst;
        g1_ = std::move(a);
        g2_ = std::move(b);
        return;
      }
    }
    fail(ErrorCode::split_unavailable, "no split met the beta n/5 floor in " + std::to_string(budget) +
                                           " samples (best " + std::to_string(best) + ")");
  }

  void start_stage(int stage, const GameState& s) {
    stage_ = stage;
    cursor_ = 0;
    holders_.assign(static_cast<std::size_t>(n_) * n_, Bitset(n_));
    fams_.assign(static_cast<std::size_t>(n_) * n_, Family{});
    Graph c1(n_);
    if (stage == 2)
      for (auto [u, v] : g1_.edges())
        if (s.owner(index_(u, v)) == Owner::a) c1.add_edge(u, v);
    double total = 0;
    for (int v = 0; v < n_; ++v)
      for (int w = 0; w < n_; ++w) {
        if (v == w) continue;
        // Stage I: star at v into N_G1(v) cap N_G2(w) cap N_vw.
        // Stage II: star at w into N_C1(v) cap N_G2(w) cap N_vw.
        Bitset y = stage == 1 ? (g1_.row(v) & g2_.row(w) & pair(v, w)) : (c1.row(v) & g2_.row(w) & pair(v, w));
        int centre = stage == 1 ? v : w;
        int partner = stage == 1 ? w : v;
        Family& F = fam(centre, partner);
        int size = static_cast<int>(y.count());
        F.a = static_cast<int>(std::ceil(0.9 * size - 1e-9));
        if (size == 0) continue;
        for (auto u = y.find_first(); u != Bitset::npos; u = y.find_next(u)) {
          holders(centre, static_cast<int>(u)).set(partner);
          Owner o = s.owner(index_(centre, static_cast<int>(u)));
          if (o == Owner::free) ++F.f;
          if (o == Owner::b) ++F.W;
        }
        F.w = detail::star_weights(F.a, F.W, F.f);
        total += F.w.phi;
      }
    if (stage == 1) {
      report_.stage1_criterion = 2 * total;
      report_.stage1_ok = 2 * total < 1;
    } else {
      report_.stage2_criterion = 2 * total;
      report_.stage2_ok = 2 * total < 1;
    }
  }

  // Vertices never regain free edges within a stage, so the scan resumes at a cursor.
  int lowest_with_free(const GameState& s, const Graph& board) {
    for (; cursor_ < n_; ++cursor_)
      for (int u : board.neighbors(cursor_))
        if (s.is_free(index_(cursor_, u))) return cursor_;
    return -1;
  }

  // Danger of free edge vu: families centred at v containing u and at u containing v.
  double danger(int v, int u) {
    double s = 0;
    const Bitset& hv = holders(v, u);
    for (auto w = hv.find_first(); w != Bitset::npos; w = hv.find_next(w)) s += fam(v, static_cast<int>(w)).w.one;
    const Bitset& hu = holders(u, v);
    for (auto w = hu.find_first(); w != Bitset::npos; w = hu.find_next(w)) s += fam(u, static_cast<int>(w)).w.one;
    return s;
  }

  double shared(int v, int u1, int u2) {
    double c = 0;
    Bitset both = holders(v, u1) & holders(v, u2);
    for (auto w = both.find_first(); w != Bitset::npos; w = both.find_next(w)) c += fam(v, static_cast<int>(w)).w.two;
    return c;
  }

  std::vector<int> choose_pair(const GameState& s, const Graph& board, int v) {
    std::vector<std::pair<double, int>> cand;
    for (int u : board.neighbors(v))
      if (s.is_free(index_(v, u)) && static_cast<int>(cand.size()) < kWindow) cand.push_back({danger(v, u), u});
    if (cand.size() == 1) {
      int x = index_(v, cand[0].second);
      for (int a = v + 1; a < n_; ++a)
        for (int b : board.neighbors(a))
          if (b != v && s.is_free(index_(a, b))) return {x, index_(a, b)};
      fail(ErrorCode::accounting_error, "odd number of free stage edges");
    }
    std::stable_sort(cand.begin(), cand.end(), [](auto& p, auto& q) { return p.first < q.first; });
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = 0;
    for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
      double val = (cand[i + 1].first - cand[i].first) - shared(v, cand[i].second, cand[i + 1].second);
      if (val < best) {
        best = val;
        pick = i;
      }
    }
    int x = index_(v, cand[pick].second), y = index_(v, cand[pick + 1].second);
    return {std::min(x, y), std::max(x, y)};
  }

  void touch(int element, Owner o) {
    auto [v, u] = (*labels_)[element];
    for (auto [c, x] : {std::pair{v, u}, std::pair{u, v}})
      for (auto w = holders(c, x).find_first(); w != Bitset::npos; w = holders(c, x).find_next(w)) {
        Family& F = fam(c, static_cast<int>(w));
        --F.f;
        if (o == Owner::b) ++F.W;
        F.w = detail::star_weights(F.a, F.W, F.f);
      }
  }

  static constexpr int kWindow = 24;

  const Graph& g_;
  int n_;
  double beta_;
  PairSets nvw_;
  Graph g1_, g2_;
  const std::vector<Edge>* labels_ = nullptr;
  EdgeIndex index_;
  int stage_ = 1;
  int cursor_ = 0;
  std::vector<Bitset> holders_;
  std::vector<Family> fams_;
  PairDegreeReport report_;
};

using ClientPolicy = std::function<int(const GameState&)>;

// Plays a full (1:1) Waiter-Client game on E(host) with Waiter following the
// two-stage strategy and Client following `client`.
inline PairDegreeReport wc_pair_degree_strategy(const Graph& host, double beta, PairSets nvw, const ClientPolicy& client,
                                                std::uint64_t seed, GameState* final_state = nullptr) {
  PairDegreeWaiter waiter(host, beta, std::move(nvw), seed);
  auto s = new_game(Board::of_graph(host), Rules::WC, 1);
  waiter.bind(s);
  while (!s.finished()) {
    if (s.leftover_turn()) {
      s.apply(legal_moves(s)[0]);
      continue;
    }
    auto o = waiter.offer(s);
    s.apply({Actor::waiter, o});
    int pick = client(s);
    s.apply({Actor::client, {pick}});
    waiter.observe(pick, pick == o[0] ? o[1] : o[0]);
  }
  waiter.finish(s);
  if (final_state) *final_state = s;
  return waiter.report();
}

// Client picking the offered edge with the smaller sum of Client degrees.
inline ClientPolicy pair_degree_attacker(int n) {
  auto index = std::make_shared<EdgeIndex>();
  return [n, index](const GameState& s) {
    const auto& lab = s.board().labels;
    if (index->n() != n) *index = EdgeIndex(n, lab);
    auto degree = [&](int u) {
      int d = 0;
      for (int w = 0; w < n; ++w) {
        int e = w == u ? -1 : (*index)(u, w);
        if (e >= 0 && s.owner(e) == Owner::a) ++d;
      }
      return d;
    };
    int best = -1, bestScore = std::numeric_limits<int>::max();
    for (int e : s.pending_offer()) {
      int score = degree(lab[e].first) + degree(lab[e].second);
      if (score < bestScore || (score == bestScore && e < best)) {
        best = e;
        bestScore = score;
      }
    }
    return best;
  };
}

}  // namespace posgames
