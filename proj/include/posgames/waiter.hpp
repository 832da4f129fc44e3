#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/graph.hpp"
#include "posgames/k55.hpp"
#include "posgames/maker.hpp"
#include "posgames/pair_degree.hpp"
#include "posgames/params.hpp"
#include "posgames/subboards.hpp"
#include "posgames/universality.hpp"

namespace posgames {

// Waiter forcing a K5-factor of Client edges on K_n[part].  Potential play:
// each live target (a K5 on the vertices not yet covered, or a whole K5-factor
// of them once at most ten remain) weighs 2^{-free edges}, and a target dies
// when Waiter receives one of its edges.  Waiter offers the free edge of largest
// total weight with the free edge closest to it in weight.  A target fully owned
// by Client fixes its cliques and the family is rebuilt on the rest.
class K5FactorWaiter {
 public:
  K5FactorWaiter(int n, std::vector<int> part) : n_(n), part_(std::move(part)) {
    require(!part_.empty() && part_.size() % 5 == 0, ErrorCode::invalid_configuration,
            "K5-factor part size must be a positive multiple of 5, got " + std::to_string(part_.size()));
    std::sort(part_.begin(), part_.end());
    const int m = static_cast<int>(part_.size());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) global_.push_back(kn_edge(n_, part_[a], part_[b]));
    g_.assign(global_.size(), 0.0);
    seen_.assign(global_.size(), Owner::free);
    for (int a = 0; a < m; ++a) rest_.push_back(a);
  }

  bool done() const { return complete() || abandoned_; }
  bool complete() const { return static_cast<int>(cliques_.size()) * 5 == static_cast<int>(part_.size()); }
  bool abandoned() const { return abandoned_; }
  void abandon() { abandoned_ = true; }
  const std::vector<Clique>& cliques() const { return cliques_; }
  const std::vector<int>& part() const { return part_; }

  // Next offer inside the part: two free elements, one when only one free part
  // edge is left (the caller adds an element from elsewhere), or none once the
  // factor is complete or no live target remains.
  std::vector<int> offer(const GameState& s) {
    if (done()) return {};
    if (!built_) rebuild(s);
    sync(s);
    while (!done() && completed_ >= 0) {
      take_completed();
      if (!done()) rebuild(s);
    }
    if (done()) return {};
    int x = -1;
    for (int e = 0; e < static_cast<int>(global_.size()); ++e)
      if (s.is_free(global_[e]) && g_[e] > 0 && (x < 0 || g_[e] > g_[x])) x = e;
    if (x < 0) {
      abandoned_ = true;
      return {};
    }
    int y = -1;
    double gap = 0;
    for (int e = 0; e < static_cast<int>(global_.size()); ++e) {
      if (e == x || !s.is_free(global_[e])) continue;
      double d = std::abs(g_[e] - g_[x]);
      if (y < 0 || d < gap) y = e, gap = d;
    }
    if (y < 0) return {global_[x]};
    return {global_[x], global_[y]};
  }

 private:
  int local(int a, int b) const {
    if (a > b) std::swap(a, b);
    const int m = static_cast<int>(part_.size());
    return a * m - a * (a + 1) / 2 + (b - a - 1);
  }

  void add_target(const std::vector<int>& edges, const std::vector<std::vector<int>>& blocks, const GameState& s) {
    for (int e : edges)
      if (s.owner(global_[e]) == Owner::b) return;
    int t = static_cast<int>(free_.size());
    int f = 0;
    for (int e : edges) f += s.is_free(global_[e]);
    edges_.insert(edges_.end(), edges.begin(), edges.end());
    free_.push_back(f);
    live_.push_back(1);
    blocks_.push_back(blocks);
    double w = std::ldexp(1.0, -f);
    for (int e : edges) {
      index_[e].push_back(t);
      if (s.is_free(global_[e])) g_[e] += w;
    }
    if (f == 0 && completed_ < 0) completed_ = t;
  }

  void rebuild(const GameState& s) {
    built_ = true;
    edges_.clear();
    free_.clear();
    live_.clear();
    blocks_.clear();
    index_.assign(global_.size(), {});
    std::fill(g_.begin(), g_.end(), 0.0);
    completed_ = -1;
    for (std::size_t e = 0; e < global_.size(); ++e) seen_[e] = s.owner(global_[e]);
    const int r = static_cast<int>(rest_.size());
    auto clique_edges = [&](const std::vector<int>& vs, std::vector<int>& out) {
      for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) out.push_back(local(vs[i], vs[j]));
    };
    if (r <= 10) {
      // Whole factors of the remaining vertices: rest_[0] with four others, the rest.
      per_target_ = r == 10 ? 20 : 10;
      if (r == 5) {
        std::vector<int> es;
        clique_edges(rest_, es);
        add_target(es, {rest_}, s);
        return;
      }
      for (int a = 1; a < r; ++a)
        for (int b = a + 1; b < r; ++b)
          for (int c = b + 1; c < r; ++c)
            for (int d = c + 1; d < r; ++d) {
              std::vector<int> A{rest_[0], rest_[a], rest_[b], rest_[c], rest_[d]}, B;
              for (int i = 1; i < r; ++i)
                if (i != a && i != b && i != c && i != d) B.push_back(rest_[i]);
              std::vector<int> es;
              clique_edges(A, es);
              clique_edges(B, es);
              add_target(es, {A, B}, s);
            }
      return;
    }
    per_target_ = 10;
    std::vector<int> es;
    es.reserve(10);
    for (int a = 0; a < r; ++a)
      for (int b = a + 1; b < r; ++b)
        for (int c = b + 1; c < r; ++c)
          for (int d = c + 1; d < r; ++d)
            for (int e = d + 1; e < r; ++e) {
              std::vector<int> vs{rest_[a], rest_[b], rest_[c], rest_[d], rest_[e]};
              es.clear();
              clique_edges(vs, es);
              add_target(es, {vs}, s);
            }
  }

  // Applies the claims made since the last call to the target weights.
  void sync(const GameState& s) {
    for (int e = 0; e < static_cast<int>(global_.size()); ++e) {
      Owner o = s.owner(global_[e]);
      if (o == seen_[e]) continue;
      seen_[e] = o;
      g_[e] = 0;
      for (int t : index_[e]) {
        if (!live_[t]) continue;
        double w = std::ldexp(1.0, -free_[t]);
        const int* te = &edges_[static_cast<std::size_t>(t) * per_target_];
        if (o == Owner::b) {
          live_[t] = 0;
          for (int k = 0; k < per_target_; ++k)
            if (te[k] != e && seen_[te[k]] == Owner::free) g_[te[k]] -= w;
        } else {
          --free_[t];
          for (int k = 0; k < per_target_; ++k)
            if (te[k] != e && seen_[te[k]] == Owner::free) g_[te[k]] += w;
          if (free_[t] == 0 && completed_ < 0) completed_ = t;
        }
      }
    }
  }

  void take_completed() {
    for (const auto& vs : blocks_[completed_]) {
      Clique c{};
      std::vector<int> sorted = vs;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < 5; ++i) c[i] = part_[sorted[i]];
      cliques_.push_back(c);
      for (int v : vs) std::erase(rest_, v);
    }
    completed_ = -1;
  }

  int n_;
  std::vector<int> part_;
  std::vector<int> global_;
  std::vector<int> rest_;
  std::vector<Clique> cliques_;
  bool built_ = false;
  bool abandoned_ = false;
  int per_target_ = 10;
  std::vector<int> edges_;
  std::vector<int> free_;
  std::vector<char> live_;
  std::vector<std::vector<std::vector<int>>> blocks_;
  std::vector<std::vector<int>> index_;
  std::vector<double> g_;
  std::vector<Owner> seen_;
  int completed_ = -1;
};

// Plays K5FactorWaiter on its own board K_m (m a multiple of 5) against a
// Client policy; returns the forced cliques (empty vector when none).
template <class ClientChoice>
std::vector<Clique> waiter_k5_factor_subgame(int m, ClientChoice&& client, bool* complete = nullptr) {
  K5FactorWaiter w(m, [&] {
    std::vector<int> v(m);
    for (int i = 0; i < m; ++i) v[i] = i;
    return v;
  }());
  GameState s = GameState::start(complete_board(m), Rules::WC, 1);
  while (!s.finished()) {
    if (s.leftover_turn()) {
      s.apply({Actor::waiter, s.free_elements()});
      break;
    }
    auto offer = w.offer(s);
    if (offer.size() < 2) {
      auto fr = s.free_elements();
      if (offer.empty()) offer = {fr[0], fr[1]};
      else offer.push_back(fr[0] == offer[0] ? fr[1] : fr[0]);
    }
    s.apply({Actor::waiter, offer});
    s.apply({Actor::client, {client(s)}});
  }
  w.offer(s);
  if (complete) *complete = w.complete();
  return w.cliques();
}

struct ClaimedPair {
  int a = -1, b = -1;  // clique indices
  bool matched = false;
};

// Waiter's strategy: Stage I star, Stage II.a K5-factors per part, Stage II.b
// K_{5,5} playbooks between cliques of different parts, the preparatory split
// into G1..G4, then Stages III-VI and a final sweep over the remaining edges.
class WaiterBuilder {
 public:
  WaiterBuilder(const Params& p, std::uint64_t seed, int partition_budget = 20, int split_budget = 3)
      : p_(p), n_(p.n), seed_(seed), budget_(partition_budget), split_budget_(split_budget) {
    const int v2 = p.v2_size(), part = 5 * p.units();
    require(v2 > 0 && v2 < n_ && part > 0 && v2 % part == 0, ErrorCode::invalid_configuration,
            "V2 must split into parts of 5 gamma n vertices");
    for (int v = 0; v < n_; ++v) (v < n_ - v2 ? state_.V1 : state_.V2).push_back(v);
    for (int j = 0; j * part < v2; ++j)
      parts_.emplace_back(state_.V2.begin() + j * part, state_.V2.begin() + (j + 1) * part);
    state_.star.x = 0;
    state_.stage = "I";
    all_ = FreeList([&] {
      std::vector<int> v(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
      for (int e = 0; e < static_cast<int>(v.size()); ++e) v[e] = e;
      return v;
    }());
  }

  WaiterBuilder(const WaiterBuilder&) = delete;
  WaiterBuilder& operator=(const WaiterBuilder&) = delete;

  const BuilderState& state() const { return state_; }
  const std::vector<std::vector<int>>& parts() const { return parts_; }
  const std::vector<ClaimedPair>& matched_pairs() const { return pairs_; }
  int failed_parts() const { return failed_parts_; }
  const PairDegreeReport* pair_degree_report() const { return pdw_ ? &pdw_->report() : nullptr; }
  const std::string& pair_degree_note() const { return pdw_note_; }

  std::vector<int> offer(const GameState& s) {
    require(s.board().size == n_ * (n_ - 1) / 2, ErrorCode::invalid_configuration, "board is not K_n");
    while (true) {
      auto o = stage_offer(s);
      if (!o.empty()) return o;
      if (state_.stage == "done") break;
    }
    auto a = all_.next(s);
    auto b = all_.second(s);
    return {*a, *b};
  }

  // Update after Client picked `chosen` from `offered`.
  void observe(const GameState& s, const std::vector<int>& offered, int chosen) {
    (void)s;
    int returned = offered[0] == chosen ? offered[1] : offered[0];
    const auto& lab = s.board().labels;
    if (state_.stage == "I") {
      auto [u, v] = lab[chosen];
      int x = state_.star.x;
      if (u == x || v == x) state_.star.S.push_back(u == x ? v : u);
    }
    if (state_.stage == "II.b" && node_) {
      int k = node_->offer[0] == local55(chosen) ? 0 : 1;
      node_ = node_->child[k].get();
    }
    if (state_.stage == "III" && pdw_) pdw_->observe(chosen, returned);
    if (c3_.size()) {
      for (int e : {chosen, returned})
        if (state_.plan.board_of[e] == 2) {
          auto [u, v] = lab[e];
          --free3_[u];
          --free3_[v];
          if (e == chosen) {
            ++c3_[u];
            ++c3_[v];
          }
        }
    }
  }

  std::optional<Certificate> certificate() const {
    if (!prepared_) return std::nullopt;
    Certificate c;
    c.V1 = state_.V1;
    c.V2 = state_.V2;
    c.x_star = state_.star.x;
    c.S_star = state_.star.S;
    std::sort(c.S_star.begin(), c.S_star.end());
    c.factor.cliques = state_.cliques;
    for (int i = 0; i < p_.units() && i < static_cast<int>(c.factor.cliques.size()); ++i) c.factor.bad.push_back(i);
    return c;
  }

  std::vector<ConditionalCheck> checks(const GameState& s) const;

 private:
  std::vector<int> stage_offer(const GameState& s) {
    const auto& st = state_.stage;
    if (st == "I") return stage_i(s);
    if (st == "II.a") return stage_iia(s);
    if (st == "II.b") return stage_iib(s);
    if (st == "prep") {
      prepare(s);
      return {};
    }
    if (st == "III") return stage_iii(s);
    if (st == "IV") return pairing_offer(s, pair2_, cursor2_, "V");
    if (st == "V") return stage_v(s);
    if (st == "VI") return pairing_offer(s, pair4_, cursor4_, "cleanup");
    if (st == "cleanup") {
      auto a = all_.next(s), b = all_.second(s);
      if (a && b) return {*a, *b};
      state_.stage = "done";
    }
    return {};
  }

  std::vector<int> stage_i(const GameState& s) {
    const int x = state_.star.x;
    if (static_cast<int>(state_.star.S.size()) < p_.s_star_size()) {
      std::vector<int> offer;
      for (int v : state_.V1)
        if (v != x && s.is_free(kn_edge(n_, x, v))) {
          offer.push_back(kn_edge(n_, x, v));
          if (offer.size() == 2) return offer;
        }
      state_.forfeits.push_back("I: " + std::to_string(state_.star.S.size()) + " of " +
                                std::to_string(p_.s_star_size()) + " star edges, no two free x*-edges into V1 left");
    }
    std::sort(state_.star.S.begin(), state_.star.S.end());
    state_.stage = "II.a";
    return {};
  }

  std::vector<int> stage_iia(const GameState& s) {
    while (part_ < static_cast<int>(parts_.size())) {
      if (!factor_) factor_ = std::make_unique<K5FactorWaiter>(n_, parts_[part_]);
      auto o = factor_->offer(s);
      if (o.size() == 2) return o;
      if (o.size() == 1) {
        if (auto j = junk(s, o[0])) return {o[0], *j};
        factor_->abandon();
      }
      for (const auto& c : factor_->cliques()) state_.cliques.push_back(c);
      if (!factor_->complete()) {
        ++failed_parts_;
        state_.forfeits.push_back("II.a: part " + std::to_string(part_) + " ends with " +
                                  std::to_string(factor_->cliques().size()) + " of " +
                                  std::to_string(parts_[part_].size() / 5) + " cliques");
      }
      clique_part_.resize(state_.cliques.size(), part_);
      factor_.reset();
      ++part_;
    }
    state_.stage = "II.b";
    return {};
  }

  // A free edge outside V2 to complete a one-element offer.
  std::optional<int> junk(const GameState& s, int avoid) {
    for (int v : state_.V1)
      for (int w = v + 1; w < n_; ++w) {
        int e = kn_edge(n_, v, w);
        if (e != avoid && s.is_free(e)) return e;
      }
    return std::nullopt;
  }

  int local55(int element) const {
    const auto& A = state_.cliques[pairs_.back().a];
    const auto& B = state_.cliques[pairs_.back().b];
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        if (kn_edge(n_, A[i], B[j]) == element) return k55::edge(i, j);
    return -1;
  }

  int global55(int local) const {
    const auto& A = state_.cliques[pairs_.back().a];
    const auto& B = state_.cliques[pairs_.back().b];
    return kn_edge(n_, A[local / 5], B[local % 5]);
  }

  bool matched(const GameState& s, const ClaimedPair& pr) const {
    return detail::owned_matching(s, n_, state_.cliques[pr.a], state_.cliques[pr.b], Owner::a) == 5;
  }

  std::vector<int> stage_iib(const GameState& s) {
    const auto& book = wc_k55_matching_strategy();
    const int k = static_cast<int>(state_.cliques.size());
    while (true) {
      if (node_) return {global55(node_->offer[0]), global55(node_->offer[1])};
      if (!pairs_.empty()) pairs_.back().matched = matched(s, pairs_.back());
      // Advance to the next cross-part clique pair.
      do {
        if (++pb_ >= k) {
          ++pa_;
          pb_ = pa_ + 1;
        }
      } while (pa_ < k && (pb_ >= k || clique_part_[pa_] == clique_part_[pb_]));
      if (pa_ >= k) break;
      pairs_.push_back({pa_, pb_, false});
      node_ = book.root();
    }
    state_.stage = "prep";
    return {};
  }

  void prepare(const GameState& s) {
    prepared_ = true;
    auto& plan = state_.plan;
    auto inV2 = detail::mask_of(n_, state_.V2);
    const auto& lab = s.board().labels;
    std::mt19937_64 rng(seed_);
    SubboardPlan best;
    int bestFail = -1;
    for (int attempt = 1; attempt <= budget_; ++attempt) {
      SubboardPlan cand;
      cand.names = {"G1", "G2", "G3", "G4"};
      cand.seed = seed_;
      cand.attempts = attempt;
      cand.board_of.assign(s.board().size, -1);
      for (int e = 0; e < s.board().size; ++e)
        if (s.is_free(e) && !(inV2[lab[e].first] && inV2[lab[e].second]))
          cand.board_of[e] = static_cast<std::int8_t>(rng() % 4);
      cand.checks = check_plan(cand, s, false);
      int f = detail::violators(cand.checks);
      if (f == 0) cand.checks = check_plan(cand, s, true);
      cand.passed = std::none_of(cand.checks.begin(), cand.checks.end(),
                                 [](const PropertyCheck& c) { return c.status == CheckStatus::fail; });
      if (cand.passed) {
        best = std::move(cand);
        break;
      }
      if (bestFail < 0 || f < bestFail) {
        best = std::move(cand);
        bestFail = f;
      }
    }
    if (!best.passed) {
      best.checks = check_plan(best, s, true);
      best.attempts = budget_;
    }
    plan = std::move(best);
    const auto& star = state_.star;
    const int B = s.board().size;
    pair2_ = StarPairing(B);
    pair4_ = StarPairing(B);
    for (int v : state_.V1) {
      std::vector<int> els;
      for (int w : state_.V2)
        if (plan.board_of[kn_edge(n_, v, w)] == 1) els.push_back(kn_edge(n_, v, w));
      pair2_.add_group(v, els);
    }
    auto inS = detail::mask_of(n_, star.S);
    for (int v = 0; v < n_; ++v) {
      if (inS[v] || v == star.x) continue;
      std::vector<int> els;
      for (int w : star.S)
        if (plan.board_of[kn_edge(n_, v, w)] == 3) els.push_back(kn_edge(n_, v, w));
      std::sort(els.begin(), els.end());
      pair4_.add_group(v, els);
    }
    adj3_.assign(n_, {});
    free3_.assign(n_, 0);
    c3_.assign(n_, 0);
    for (int e = 0; e < B; ++e)
      if (plan.board_of[e] == 2) {
        auto [u, v] = lab[e];
        adj3_[u].push_back(e);
        adj3_[v].push_back(e);
        ++free3_[u];
        ++free3_[v];
      }
    g1_ = plan.graph(0, s.board(), n_);
    std::vector<int> g1els = plan.elements(0);
    g1_list_ = FreeList(g1els);
    try {
      PairSets nvw = common_neighbor_sets(g1_);
      Bitset v1(n_);
      for (int v : state_.V1) v1.set(v);
      for (auto& b : nvw) b &= v1;
      pdw_ = std::make_unique<PairDegreeWaiter>(g1_, 0.05, std::move(nvw), seed_, split_budget_);
      pdw_->bind(s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::split_unavailable) throw;
      pdw_.reset();
      pdw_note_ = e.what();
    }
    state_.stage = "III";
  }

  std::vector<PropertyCheck> check_plan(const SubboardPlan& plan, const GameState& s, bool sampled) const {
    std::vector<PropertyCheck> out;
    const auto& star = state_.star;
    const int u = p_.units();
    const double logn = p_.log_n();
    auto on = [&](int v, int w, int b) { return plan.board_of[kn_edge(n_, v, w)] == b; };
    auto exact = [&](const std::string& name, int violators, const std::string& need, const std::string& eg) {
      out.push_back({name, violators == 0 ? CheckStatus::pass : CheckStatus::fail, "exact",
                     violators == 0 ? "all meet " + need : std::to_string(violators) + " below " + need + ", e.g. " + eg});
    };
    {
      Graph g1 = plan.graph(0, s.board(), n_);
      Bitset v1(n_);
      for (int v : state_.V1) v1.set(v);
      double need = 0.05 * n_;
      int bad = 0;
      std::string eg;
      for (int v = 0; v < n_; ++v)
        for (int w = v + 1; w < n_; ++w) {
          int c = static_cast<int>((g1.row(v) & g1.row(w) & v1).count());
          if (c < need) {
            if (bad++ == 0) eg = std::to_string(v) + "," + std::to_string(w) + " with " + std::to_string(c);
          }
        }
      exact("G1", bad, "|N_G1(v) cap N_G1(w) cap V1| >= " + std::to_string(need), eg);
    }
    {
      int bad = 0;
      std::string eg;
      for (int v : state_.V1) {
        int d = 0;
        for (int w : state_.V2) d += on(v, w, 1);
        if (!(d > 80 * u) && bad++ == 0) eg = std::to_string(v) + " with " + std::to_string(d);
      }
      exact("G2", bad, "d_G2(v,V2) > " + std::to_string(80 * u), eg);
    }
    if (sampled) {
      std::mt19937_64 rng(plan.seed ^ 0x9e3779b97f4a7c15ULL);
      Graph g3 = plan.graph(2, s.board(), n_);
      auto sp = sparse_pair_search(g3, state_.V1, p_.m(), p_.m(), 60, rng);
      double need = 0.2 * p_.m() * p_.m();
      if (sp.edges >= 0 && !(sp.edges > need))
        out.push_back({"G3", CheckStatus::fail, "sampled",
                       "e(X,Y) = " + std::to_string(sp.edges) + " for X = " + detail::list(sp.A) +
                           ", Y = " + detail::list(sp.B) + "; need > " + std::to_string(need)});
      else
        out.push_back({"G3", CheckStatus::unknown, "sampled",
                       "sparsest sampled pair spans " + std::to_string(sp.edges) + " edges; need > " + std::to_string(need)});
    } else {
      out.push_back({"G3", CheckStatus::unknown, "skipped", "not sampled"});
    }
    {
      auto inS = detail::mask_of(n_, star.S);
      double need = 4 * p_.C0 * logn;
      int bad = 0;
      std::string eg;
      for (int v = 0; v < n_; ++v) {
        if (inS[v] || v == star.x) continue;
        int d = 0;
        for (int w : star.S) d += on(v, w, 3);
        if (d < need && bad++ == 0) eg = std::to_string(v) + " with " + std::to_string(d);
      }
      exact("G4", bad, "d_G4(v,S*) >= " + std::to_string(need), eg);
    }
    return out;
  }

  std::vector<int> stage_iii(const GameState& s) {
    if (pdw_) {
      auto o = pdw_->offer(s);
      if (o.size() == 2) return o;
      pdw_->finish(s);
    } else {
      auto a = g1_list_.next(s), b = g1_list_.second(s);
      if (a && b) return {*a, *b};
    }
    state_.stage = "IV";
    return {};
  }

  std::vector<int> pairing_offer(const GameState& s, const StarPairing& pr, std::size_t& cursor, const char* next) {
    while (cursor < pr.pairs().size()) {
      auto [a, b] = pr.pairs()[cursor++];
      if (s.is_free(a) && s.is_free(b)) return {a, b};
    }
    state_.stage = next;
    return {};
  }

  // Stage V proxy: two free G3 edges at the vertex with fewest Client G3 edges.
  std::vector<int> stage_v(const GameState& s) {
    int v = -1;
    for (int w = 0; w < n_; ++w)
      if (free3_[w] >= 2 && (v < 0 || c3_[w] < c3_[v])) v = w;
    if (v >= 0) {
      std::vector<int> o;
      for (int e : adj3_[v])
        if (s.is_free(e)) {
          o.push_back(e);
          if (o.size() == 2) return o;
        }
    }
    state_.stage = "VI";
    return {};
  }

  Params p_;
  int n_;
  std::uint64_t seed_;
  int budget_, split_budget_;
  BuilderState state_;
  std::vector<std::vector<int>> parts_;
  FreeList all_;
  int part_ = 0;
  int failed_parts_ = 0;
  std::unique_ptr<K5FactorWaiter> factor_;
  std::vector<int> clique_part_;
  std::vector<ClaimedPair> pairs_;
  int pa_ = 0, pb_ = 0;
  const k55::Node* node_ = nullptr;
  bool prepared_ = false;
  StarPairing pair2_, pair4_;
  std::size_t cursor2_ = 0, cursor4_ = 0;
  std::vector<std::vector<int>> adj3_;
  std::vector<int> free3_, c3_;
  Graph g1_;
  FreeList g1_list_;
  std::unique_ptr<PairDegreeWaiter> pdw_;
  std::string pdw_note_;
};

inline std::vector<ConditionalCheck> WaiterBuilder::checks(const GameState& s) const {
  std::vector<ConditionalCheck> out;
  const int n = n_;
  const auto& star = state_.star;
  const int u = p_.units();
  const int target = p_.s_star_size();
  {
    int got = detail::count_into(s, n, star.x, state_.V1, Owner::a);
    bool entry = 2 * target <= static_cast<int>(state_.V1.size()) - 1;
    out.push_back({"stage I star", entry ? CheckStatus::pass : CheckStatus::fail, got >= target,
                   "|N_C(x*) cap V1| = " + std::to_string(got) + ", required " + std::to_string(target) + "; " +
                       std::to_string(state_.V1.size() - 1) + " edges from x* into V1"});
  }
  {
    int miss = 0;
    for (const auto& pr : pairs_)
      if (detail::owned_matching(s, n, state_.cliques[pr.a], state_.cliques[pr.b], Owner::a) < 5) ++miss;
    out.push_back({"stage II.b matchings", pairs_.empty() ? CheckStatus::fail : CheckStatus::pass, miss == 0,
                   std::to_string(pairs_.size()) + " clique pairs, " + std::to_string(miss) +
                       " without a Client perfect matching"});
  }
  if (!prepared_) {
    out.push_back({"stage III", CheckStatus::fail, false, "preparatory step not reached"});
    return out;
  }
  if (pdw_) {
    const auto& r = pdw_->report();
    out.push_back({"stage III pair degree", r.criteria_held() ? CheckStatus::pass : CheckStatus::fail, r.floor_met(),
                   "criteria " + std::string(r.stage1_ok ? "held" : "failed") + "/" +
                       std::string(r.stage2_ok ? "held" : "failed") + ", min " + std::to_string(r.final_min) +
                       ", floor " + std::to_string(r.final_floor)});
  } else {
    out.push_back({"stage III pair degree", CheckStatus::fail, false, pdw_note_});
  }
  const auto& plan = state_.plan;
  auto on = [&](int a, int b, int brd) { return plan.board_of[kn_edge(n, a, b)] == brd; };
  out.push_back(detail::pairing_check("stage IV pairing", s, pair2_, Owner::a));
  out.push_back(detail::floor_check(
      "stage IV floor", state_.V1,
      [&](int v) {
        int d = 0;
        for (int w : state_.V2) d += on(v, w, 1);
        return d > 80 * u;
      },
      [&](int v) { return detail::count_into(s, n, v, state_.V2, Owner::a) >= 40 * u; }, "d_C(v,V2) >= 40 gamma n"));
  {
    auto [st, d] = detail::es_entry(static_cast<int>(state_.V1.size()), n, p_.m(), p_.m());
    out.push_back({"stage V transversal", st, false, d});
  }
  out.push_back(detail::pairing_check("stage VI pairing", s, pair4_, Owner::a));
  {
    auto inS = detail::mask_of(n, star.S);
    std::vector<int> outside;
    for (int v = 0; v < n; ++v)
      if (!inS[v] && v != star.x) outside.push_back(v);
    out.push_back(detail::floor_check(
        "stage VI floor", outside,
        [&](int v) {
          int d = 0;
          for (int w : star.S) d += on(v, w, 3);
          return d >= 4 * p_.C0 * p_.log_n();
        },
        [&](int v) { return detail::count_into(s, n, v, star.S, Owner::a) >= 2 * p_.m(); }, "d_C(v,S*) >= 2 m"));
  }
  return out;
}

}  // namespace posgames
