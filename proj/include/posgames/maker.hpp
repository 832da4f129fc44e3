#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/graph.hpp"
#include "posgames/matching.hpp"
#include "posgames/params.hpp"
#include "posgames/routing.hpp"
#include "posgames/subboards.hpp"
#include "posgames/universality.hpp"

namespace posgames {

struct StarRecord {
  int x = -1;
  std::vector<int> S;
  std::vector<int> R;
  std::vector<int> partner;  // per R entry: x, s_v, or -1 when no edge was available
};

// Bookkeeping shared by the Maker and Waiter builders.
struct BuilderState {
  std::string stage;
  StarRecord star;
  std::vector<int> V1, V2;
  SubboardPlan plan;
  std::vector<Clique> cliques;
  std::vector<int> bad;
  std::vector<std::pair<int, int>> protected_pairs;  // clique index pairs
  std::vector<int> v2_degree_at_split;
  int factor_rounds = 0;
  int degree_violations = 0;
  std::vector<std::string> forfeits;
};

// One Maker reply in Stage II: the board Breaker last played on and the board
// Maker answered on.
struct BoardReply {
  int round = 0;
  int opponent_board = -1;
  int board = -1;
  bool opponent_board_exhausted = false;
};

namespace detail {

inline int count_into(const GameState& s, int n, int v, const std::vector<int>& set, Owner o) {
  int c = 0;
  for (int w : set)
    if (w != v && s.owner(kn_edge(n, v, w)) == o) ++c;
  return c;
}

inline std::vector<char> mask_of(int n, const std::vector<int>& vs) {
  std::vector<char> m(n, 0);
  for (int v : vs) m[v] = 1;
  return m;
}

// Exact checks (G1), (G2), (G4) and sampled checks (G3), (G5) of a Maker plan.
inline std::vector<PropertyCheck> check_maker_plan(const SubboardPlan& plan, const GameState& s, const StarRecord& star,
                                                   const std::vector<int>& V1, const std::vector<int>& V2,
                                                   const Params& p, bool sampled = true) {
  const int n = p.n;
  const double logn = p.log_n();
  const int u = p.units();
  std::vector<PropertyCheck> out;
  auto on = [&](int v, int w, int b) { return plan.board_of[kn_edge(n, v, w)] == b; };
  auto exact = [&](const std::string& name, int violators, int worst, int worstVal, const std::string& need) {
    out.push_back({name, violators == 0 ? CheckStatus::pass : CheckStatus::fail, "exact",
                   violators == 0 ? "all vertices meet " + need
                                  : std::to_string(violators) + " vertices below " + need + ", e.g. " +
                                        std::to_string(worst) + " with " + std::to_string(worstVal)});
  };
  auto inS = mask_of(n, star.S), inR = mask_of(n, star.R);
  {
    double need = 4 * p.C0 * logn;
    int bad = 0, worst = -1, worstVal = 0;
    for (int v = 0; v < n; ++v) {
      if (inS[v] || inR[v] || v == star.x) continue;
      int d = 0;
      for (int w : star.S) d += on(v, w, 0);
      if (!(d > need)) {
        if (worst < 0 || d < worstVal) worst = v, worstVal = d;
        ++bad;
      }
    }
    exact("G1", bad, worst, worstVal, "d_G1(v,S*) > " + std::to_string(need));
  }
  {
    int need = 80 * u, bad = 0, worst = -1, worstVal = 0;
    for (int v : V1) {
      int d = 0;
      for (int w : V2) d += on(v, w, 1);
      if (!(d > need)) {
        if (worst < 0 || d < worstVal) worst = v, worstVal = d;
        ++bad;
      }
    }
    exact("G2", bad, worst, worstVal, "d_G2(v,V2) > " + std::to_string(need));
  }
  std::mt19937_64 rng(plan.seed ^ 0x9e3779b97f4a7c15ULL);
  auto sampled_check = [&](const std::string& name, int b, int a, int bsz, double need, bool strict) {
    if (!sampled) {
      out.push_back({name, CheckStatus::unknown, "skipped", "not sampled"});
      return;
    }
    Graph g = plan.graph(b, s.board(), n);
    auto sp = sparse_pair_search(g, V1, a, bsz, 60, rng);
    bool bad = sp.edges >= 0 && (strict ? !(sp.edges > need) : sp.edges < need);
    std::string what = "|A| = " + std::to_string(a) + ", |B| = " + std::to_string(bsz) + ", need " +
                       std::string(strict ? "> " : ">= ") + std::to_string(need);
    if (bad)
      out.push_back({name, CheckStatus::fail, "sampled",
                     "e(A,B) = " + std::to_string(sp.edges) + " for A = " + detail::list(sp.A) + ", B = " +
                         detail::list(sp.B) + "; " + what});
    else
      out.push_back({name, CheckStatus::unknown, "sampled",
                     "sparsest sampled pair spans " + std::to_string(sp.edges) + " edges; " + what});
  };
  sampled_check("G3", 2, p.m(), p.m(), 0.1 * p.C0 * p.C0 * logn * logn, false);
  {
    double need = n / 10.0;
    auto inV1 = mask_of(n, V1);
    int bad = 0, worst = -1, worstVal = 0;
    for (int v = 0; v < n; ++v) {
      int d = 0;
      for (int w : V1)
        if (w != v) d += on(v, w, 3);
      if (!(d > need)) {
        if (worst < 0 || d < worstVal) worst = v, worstVal = d;
        ++bad;
      }
    }
    (void)inV1;
    exact("G4", bad, worst, worstVal, "d_G4(v,V1) > " + std::to_string(need));
  }
  sampled_check("G5", 4, n / 40, static_cast<int>(std::floor(logn)), n * logn / 250.0, true);
  return out;
}

inline int exact_failures(const std::vector<PropertyCheck>& cs) {
  int k = 0;
  for (const auto& c : cs)
    if (c.mode == "exact" && c.status == CheckStatus::fail) ++k;
  return k;
}

inline int violators(const std::vector<PropertyCheck>& cs) {
  int k = 0;
  for (const auto& c : cs)
    if (c.mode == "exact" && c.status == CheckStatus::fail) k += std::stoi(c.detail);
  return k;
}

}  // namespace detail

// Uniform 1/5 split of the free edges outside E(V2) into G1..G5 (and the free
// edges of V2 into the board "V2"), resampled until (G1), (G2), (G4) hold and
// the samplers find no violation of (G3), (G5).  Without `strict` the least
// violating sample is returned with passed = false.
inline SubboardPlan maker_preparatory_partition(const GameState& s, const StarRecord& star, const std::vector<int>& V2,
                                                const Params& p, std::uint64_t seed, int budget = 20,
                                                bool strict = true) {
  const int n = p.n;
  require(s.board().size == n * (n - 1) / 2, ErrorCode::invalid_configuration, "board is not K_n");
  require(static_cast<int>(V2.size()) == p.v2_size(), ErrorCode::invalid_configuration,
          "|V2| = " + std::to_string(V2.size()) + ", required " + std::to_string(p.v2_size()));
  auto inV2 = detail::mask_of(n, V2);
  require(!inV2[star.x], ErrorCode::invalid_configuration, "x* lies in V2");
  for (int v : star.S) require(!inV2[v], ErrorCode::invalid_configuration, "S* meets V2");
  for (int v : star.R) require(!inV2[v], ErrorCode::invalid_configuration, "R* meets V2");
  for (std::size_t i = 0; i < V2.size(); ++i)
    for (std::size_t j = i + 1; j < V2.size(); ++j)
      if (!s.is_free(kn_edge(n, V2[i], V2[j])))
        fail(ErrorCode::invalid_configuration, "V2 contains the claimed edge " + std::to_string(V2[i]) + "-" +
                                                   std::to_string(V2[j]));
  std::vector<int> V1;
  for (int v = 0; v < n; ++v)
    if (!inV2[v]) V1.push_back(v);

  SubboardPlan best;
  int bestFail = 0, bestViol = 0;
  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= budget; ++attempt) {
    SubboardPlan plan;
    plan.names = {"G1", "G2", "G3", "G4", "G5", "V2"};
    plan.seed = seed;
    plan.board_of.assign(s.board().size, -1);
    const auto& lab = s.board().labels;
    for (int e = 0; e < s.board().size; ++e) {
      if (!s.is_free(e)) continue;
      if (inV2[lab[e].first] && inV2[lab[e].second])
        plan.board_of[e] = 5;
      else
        plan.board_of[e] = static_cast<std::int8_t>(rng() % 5);
    }
    plan.attempts = attempt;
    plan.checks = detail::check_maker_plan(plan, s, star, V1, V2, p, false);
    int f = detail::exact_failures(plan.checks), viol = detail::violators(plan.checks);
    if (f == 0) plan.checks = detail::check_maker_plan(plan, s, star, V1, V2, p, true);
    bool ok = std::none_of(plan.checks.begin(), plan.checks.end(),
                           [](const PropertyCheck& c) { return c.status == CheckStatus::fail; });
    if (ok) {
      plan.passed = true;
      return plan;
    }
    if (attempt == 1 || f < bestFail || (f == bestFail && viol < bestViol)) {
      best = std::move(plan);
      bestFail = f;
      bestViol = viol;
    }
  }
  if (strict)
    fail(ErrorCode::partition_failed, "no partition passed (G1)-(G5) in " + std::to_string(budget) + " samples");
  best.checks = detail::check_maker_plan(best, s, star, V1, V2, p, true);
  best.attempts = budget;
  return best;
}

// Maker's strategy: Stage I.a/I.b star, the preparatory split, and Stage II
// subgames 1-6 with the same-board reply rule.
class MakerBuilder {
 public:
  enum Board { kG1, kG2, kG3, kG4, kG5, kV2, kGoodGood, kGoodBad, kBadBad, kBoards };

  MakerBuilder(const Params& p, std::uint64_t seed, int partition_budget = 20)
      : p_(p), n_(p.n), seed_(seed), budget_(partition_budget), degM_(p.n, 0) {
    state_.stage = "I.a";
    state_.star.x = 0;
    all_ = FreeList([&] {
      std::vector<int> v(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
      for (int e = 0; e < static_cast<int>(v.size()); ++e) v[e] = e;
      return v;
    }());
  }

  const BuilderState& state() const { return state_; }
  const std::vector<BoardReply>& replies() const { return replies_; }
  static const char* board_name(int b) {
    static const char* names[] = {"G1", "G2", "G3", "G4", "G5", "V2", "V2-good", "V2-good-bad", "V2-bad"};
    return b >= 0 && b < kBoards ? names[b] : "none";
  }

  // Board of element e under the current stage, or -1.
  int board_of(int e) const {
    if (!in_stage2_) return -1;
    int b = state_.plan.board_of[e];
    if (b != kV2 || substage_ == 1) return b;
    auto [u, v] = label(e);
    int k = cls_[u] + cls_[v];
    return k == 2 ? kGoodGood : (k == 3 ? kGoodBad : kBadBad);
  }

  int move(const GameState& s) {
    require(s.board().size == n_ * (n_ - 1) / 2, ErrorCode::invalid_configuration, "board is not K_n");
    if (state_.stage == "I.a")
      if (auto e = stage_ia(s)) return *e;
    if (state_.stage == "I.b")
      if (auto e = stage_ib(s)) return *e;
    if (state_.stage == "prep") prepare(s);
    if (state_.stage == "II") return stage_ii(s);
    return *all_.next(s);
  }

  void observe(const GameState& s, int e, Owner o) {
    auto [u, v] = label(e);
    if (o == Owner::a) {
      ++degM_[u];
      ++degM_[v];
    } else {
      breaker_edges_.push_back({u, v});
    }
    if (!in_stage2_) return;
    int b = state_.plan.board_of[e];
    if (b < 0) return;
    for (auto* pr : {&pair1_, &pair2_, &pairGG_, &pairGB_}) {
      int q = pr->pair_of(e);
      if (q >= 0 && s.is_free(pr->partner(e))) --open(pr)[pr->group_of_pair(q)];
    }
    if (b == kG3 || b == kG4 || b == kG5) {
      auto& st = side_[b];
      --st.free[u];
      --st.free[v];
      int d = o == Owner::a ? 1 : 0;
      st.maker[u] += d;
      st.maker[v] += d;
      if (b == kG4) {
        int def = o == Owner::a ? -1 : 1;
        deficit4_[u] += def;
        deficit4_[v] += def;
      }
    }
    if (b == kV2) {
      --free2_[u];
      --free2_[v];
      (o == Owner::a ? dM2_ : dB2_)[u]++;
      (o == Owner::a ? dM2_ : dB2_)[v]++;
      if (o == Owner::b && substage_ == 1) {
        if (group_of_[u] >= 0 && group_of_[u] == group_of_[v] && !groups_[group_of_[u]].complete) dirty_ = true;
        for (int x : {u, v})
          if (violated(x)) {
            ++state_.degree_violations;
            threatened_.push_back(x);
          }
      }
    }
  }

  // The element whose loss hurts Maker most, used by the greedy-blocker.
  std::optional<int> damage(const GameState& s) {
    const int x = state_.star.x;
    if (state_.stage == "I.a") {
      int v = ia_choice(s);
      return v < 0 ? std::nullopt : std::optional<int>(kn_edge(n_, x, v));
    }
    if (state_.stage == "I.b") {
      if (ib_next_ >= static_cast<int>(state_.star.R.size())) return std::nullopt;
      int v = state_.star.R[ib_next_];
      if (s.is_free(kn_edge(n_, v, x))) return kn_edge(n_, v, x);
      for (int w : state_.star.S)
        if (s.is_free(kn_edge(n_, v, w))) return kn_edge(n_, v, w);
      return std::nullopt;
    }
    if (!in_stage2_ || replies_.empty()) return std::nullopt;
    int b = replies_.back().board;
    switch (b) {
      case kG1: return open_pair_hit(s, pair1_);
      case kG2: return open_pair_hit(s, pair2_);
      case kGoodGood: return open_pair_hit(s, pairGG_);
      case kGoodBad: return open_pair_hit(s, pairGB_);
      case kG3:
      case kG4:
      case kG5: {
        auto& st = side_[b];
        int v = -1;
        for (int w = 0; w < n_; ++w)
          if (st.free[w] > 0 && (v < 0 || st.maker[w] < st.maker[v])) v = w;
        if (v < 0) return std::nullopt;
        for (int e : st.adj[v])
          if (s.is_free(e)) return e;
        return std::nullopt;
      }
      case kV2: {
        int g = best_group(s);
        if (g >= 0) return free_inside(s, g);
        return lists_[kV2].next(s);
      }
      default: return lists_[b].next(s);
    }
  }

  // Certificate assembled from the bookkeeping, once V2 exists.
  std::optional<Certificate> certificate() const {
    if (!in_stage2_) return std::nullopt;
    Certificate c;
    c.V1 = state_.V1;
    c.V2 = state_.V2;
    c.x_star = state_.star.x;
    c.S_star = state_.star.S;
    std::sort(c.S_star.begin(), c.S_star.end());
    c.R_star = state_.star.R;
    if (substage_ == 2) {
      c.factor.cliques = state_.cliques;
      c.factor.bad = state_.bad;
    } else {
      for (const auto& g : groups_)
        if (g.complete) c.factor.cliques.push_back(g.v);
    }
    return c;
  }

  bool factor_complete() const { return substage_ == 2; }

  // Pairing plan of a pairing board (G1, G2, V2-good, V2-good-bad).
  const StarPairing& pairing(int board) const {
    switch (board) {
      case kG1: return pair1_;
      case kG2: return pair2_;
      case kGoodGood: return pairGG_;
      case kGoodBad: return pairGB_;
      default: fail(ErrorCode::invalid_parameter, std::string("no pairing on board ") + board_name(board));
    }
  }

  // Stage II replies off Breaker's board although that board still had a free
  // edge.  A Breaker edge on a V2 board of the other substage counts as exhausted.
  int off_board_replies() const {
    int bad = 0;
    for (const auto& r : replies_)
      if (r.opponent_board >= 0 && r.board != r.opponent_board && !r.opponent_board_exhausted &&
          !(r.opponent_board >= kV2 && r.board >= kV2 && (r.opponent_board == kV2) != (r.board == kV2)))
        ++bad;
    return bad;
  }

  // Subgame exit guarantees on the final position, each conditioned on its entry.
  std::vector<ConditionalCheck> checks(const GameState& s) const;

 private:
  struct SideBoard {
    std::vector<std::vector<int>> adj;
    std::vector<int> free, maker;
  };
  struct Group {
    Clique v{};
    bool complete = false;
  };

  Edge label(int e) const {
    // Inverse of kn_edge.
    int u = 0, base = 0;
    while (base + (n_ - 1 - u) <= e) {
      base += n_ - 1 - u;
      ++u;
    }
    return {u, u + 1 + (e - base)};
  }

  std::vector<int>& open(const StarPairing* pr) {
    if (pr == &pair1_) return open1_;
    if (pr == &pair2_) return open2_;
    if (pr == &pairGG_) return openGG_;
    return openGB_;
  }

  std::optional<int> open_pair_hit(const GameState& s, const StarPairing& pr) {
    auto& op = open(&pr);
    int g = -1;
    for (int i = 0; i < static_cast<int>(op.size()); ++i)
      if (op[i] > 0 && (g < 0 || op[i] < op[g])) g = i;
    if (g < 0) return std::nullopt;
    for (int q : pr.group(g)) {
      auto [a, b] = pr.pairs()[q];
      if (s.is_free(a) && s.is_free(b)) return a;
    }
    return std::nullopt;
  }

  // Stage I.a: the free x*-edge whose far end covers the most Breaker edges not
  // yet touching the star, so that a Breaker-free V2 remains available.
  int ia_choice(const GameState& s) const {
    const int x = state_.star.x;
    std::vector<char> inStar(n_, 0);
    inStar[x] = 1;
    for (int v : state_.star.S) inStar[v] = 1;
    std::vector<int> cover(n_, 0);
    for (auto [a, b] : breaker_edges_)
      if (!inStar[a] && !inStar[b]) {
        ++cover[a];
        ++cover[b];
      }
    int best = -1;
    for (int v = 0; v < n_; ++v)
      if (!inStar[v] && s.is_free(kn_edge(n_, x, v)) && (best < 0 || cover[v] > cover[best])) best = v;
    return best;
  }

  std::optional<int> stage_ia(const GameState& s) {
    if (static_cast<int>(state_.star.S.size()) == p_.s_star_size()) {
      state_.stage = "I.b";
      return std::nullopt;
    }
    int v = ia_choice(s);
    if (v < 0) {
      state_.forfeits.push_back("I.a: no free edge at x*");
      state_.stage = "dead";
      return std::nullopt;
    }
    state_.star.S.push_back(v);
    return kn_edge(n_, state_.star.x, v);
  }

  std::optional<int> stage_ib(const GameState& s) {
    const int x = state_.star.x;
    if (!ib_started_) {
      ib_started_ = true;
      std::vector<char> inS = detail::mask_of(n_, state_.star.S);
      for (int v = 0; v < n_; ++v) {
        if (v == x || inS[v]) continue;
        int d = detail::count_into(s, n_, v, state_.star.S, Owner::b);
        if (d > p_.C0 * p_.log_n()) state_.star.R.push_back(v);
      }
      ib_breaker_.clear();
      for (int v : state_.star.R) ib_breaker_.push_back(detail::count_into(s, n_, v, state_.star.S, Owner::b));
      state_.star.partner.assign(state_.star.R.size(), -1);
    }
    std::vector<char> used(n_, 0);
    for (int q : state_.star.partner)
      if (q >= 0) used[q] = 1;
    while (ib_next_ < static_cast<int>(state_.star.R.size())) {
      int i = ib_next_++;
      int v = state_.star.R[i];
      if (s.is_free(kn_edge(n_, v, x))) {
        state_.star.partner[i] = x;
        return kn_edge(n_, v, x);
      }
      for (int w : state_.star.S) {
        if (used[w] || degM_[w] != 1 || !s.is_free(kn_edge(n_, v, w))) continue;
        state_.star.partner[i] = w;
        return kn_edge(n_, v, w);
      }
      state_.forfeits.push_back("I.b: no free edge from " + std::to_string(v) + " to x* or a fresh S* vertex");
    }
    state_.stage = "prep";
    return std::nullopt;
  }

  void prepare(const GameState& s) {
    const auto& star = state_.star;
    std::vector<char> out(n_, 0);
    out[star.x] = 1;
    for (int v : star.S) out[v] = 1;
    for (int v : star.R) out[v] = 1;
    // Remove a greedy vertex cover of the claimed edges among the candidates.
    std::vector<std::vector<int>> conflict(n_);
    const auto& lab = s.board().labels;
    for (const auto& h : s.history())
      for (int e : h.move.elements) {
        auto [a, b] = lab[e];
        if (!out[a] && !out[b]) {
          conflict[a].push_back(b);
          conflict[b].push_back(a);
        }
      }
    std::vector<int> live(n_, 0);
    for (int v = 0; v < n_; ++v)
      if (!out[v]) live[v] = static_cast<int>(conflict[v].size());
    while (true) {
      int worst = -1;
      for (int v = 0; v < n_; ++v)
        if (!out[v] && live[v] > 0 && (worst < 0 || live[v] > live[worst])) worst = v;
      if (worst < 0) break;
      out[worst] = 1;
      for (int w : conflict[worst])
        if (!out[w]) --live[w];
    }
    std::vector<int> cand;
    for (int v = n_ - 1; v >= 0; --v)
      if (!out[v]) cand.push_back(v);
    if (static_cast<int>(cand.size()) < p_.v2_size()) {
      state_.forfeits.push_back("preparatory: only " + std::to_string(cand.size()) +
                                " vertices span no claimed edge, |V2| must be " + std::to_string(p_.v2_size()));
      state_.stage = "dead";
      return;
    }
    cand.resize(p_.v2_size());
    std::sort(cand.begin(), cand.end());
    state_.V2 = cand;
    auto inV2 = detail::mask_of(n_, cand);
    state_.V1.clear();
    for (int v = 0; v < n_; ++v)
      if (!inV2[v]) state_.V1.push_back(v);
    state_.plan = maker_preparatory_partition(s, star, state_.V2, p_, seed_, budget_, false);
    setup_stage2(s);
    state_.stage = "II";
  }

  void setup_stage2(const GameState& s) {
    const auto& plan = state_.plan;
    const auto& star = state_.star;
    const int B = s.board().size;
    auto inS = detail::mask_of(n_, star.S), inR = detail::mask_of(n_, star.R), inV2 = detail::mask_of(n_, state_.V2);
    pair1_ = StarPairing(B);
    pair2_ = StarPairing(B);
    pairGG_ = StarPairing(B);
    pairGB_ = StarPairing(B);
    for (int v = 0; v < n_; ++v) {
      if (inS[v] || inR[v] || v == star.x) continue;
      std::vector<int> els;
      for (int w : star.S)
        if (plan.board_of[kn_edge(n_, v, w)] == kG1) els.push_back(kn_edge(n_, v, w));
      std::sort(els.begin(), els.end());
      pair1_.add_group(v, els);
    }
    for (int v : state_.V1) {
      std::vector<int> els;
      for (int w : state_.V2)
        if (plan.board_of[kn_edge(n_, v, w)] == kG2) els.push_back(kn_edge(n_, v, w));
      pair2_.add_group(v, els);
    }
    open1_ = group_sizes(pair1_);
    open2_ = group_sizes(pair2_);
    for (int b : {kG3, kG4, kG5}) {
      auto& st = side_[b];
      st.adj.assign(n_, {});
      st.free.assign(n_, 0);
      st.maker.assign(n_, 0);
    }
    deficit4_.assign(n_, 0);
    std::vector<std::vector<int>> els(kBoards);
    for (int e = 0; e < B; ++e) {
      int b = plan.board_of[e];
      if (b < 0) continue;
      auto [u, v] = s.board().labels[e];
      if (b == kG3 || b == kG4 || b == kG5) {
        side_[b].adj[u].push_back(e);
        side_[b].adj[v].push_back(e);
        ++side_[b].free[u];
        ++side_[b].free[v];
      }
      els[b].push_back(e);
    }
    lists_.assign(kBoards, FreeList());
    for (int b = 0; b <= kV2; ++b) {
      const StarPairing* pr = b == kG1 ? &pair1_ : (b == kG2 ? &pair2_ : nullptr);
      lists_[b] = FreeList(pr ? unpaired_first(els[b], *pr) : els[b]);
    }
    dM2_.assign(n_, 0);
    dB2_.assign(n_, 0);
    free2_.assign(n_, 0);
    for (int v : state_.V2) free2_[v] = static_cast<int>(state_.V2.size()) - 1;
    cls_.assign(n_, 0);
    group_of_.assign(n_, -1);
    groups_.clear();
    for (std::size_t i = 0; i + 5 <= state_.V2.size(); i += 5) {
      Group g;
      for (int j = 0; j < 5; ++j) {
        g.v[j] = state_.V2[i + j];
        group_of_[g.v[j]] = static_cast<int>(groups_.size());
      }
      groups_.push_back(g);
    }
    (void)inV2;
    substage_ = 1;
    in_stage2_ = true;
  }

  static std::vector<int> group_sizes(const StarPairing& pr) {
    std::vector<int> out(pr.groups());
    for (int g = 0; g < pr.groups(); ++g) out[g] = static_cast<int>(pr.group(g).size());
    return out;
  }

  static std::vector<int> unpaired_first(const std::vector<int>& els, const StarPairing& pr) {
    std::vector<int> a, b;
    for (int e : els) (pr.pair_of(e) < 0 ? a : b).push_back(e);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  bool has_free(const GameState& s, int b) { return lists_[b].next(s).has_value(); }

  int last_breaker_element(const GameState& s) const {
    const auto& h = s.history();
    if (h.empty() || h.back().move.actor != Actor::breaker) return -1;
    return h.back().move.elements[0];
  }

  int stage_ii(const GameState& s) {
    if (substage_ == 1 && all_complete(s)) setup_substage2(s, true);
    int last = last_breaker_element(s);
    int b = last >= 0 ? board_of(last) : -1;
    BoardReply r;
    r.round = s.round() + 1;
    r.opponent_board = b;
    int use = b;
    if (b >= kV2 && (b == kV2) != (substage_ == 1)) use = -1;
    if (use >= 0 && !has_free(s, use)) {
      r.opponent_board_exhausted = true;
      use = -1;
    }
    if (use < 0) {
      for (int c = 0; c < kBoards && use < 0; ++c) {
        if ((c == kV2) != (substage_ == 1) && c >= kV2) continue;
        if (has_free(s, c)) use = c;
      }
    }
    if (use < 0) return *all_.next(s);
    r.board = use;
    replies_.push_back(r);
    auto e = reply(s, use, use == b ? last : -1);
    if (!e) e = lists_[use].next(s);
    return *e;
  }

  std::optional<int> partner_reply(const GameState& s, const StarPairing& pr, int last) {
    if (last < 0) return std::nullopt;
    int q = pr.partner(last);
    if (q >= 0 && s.is_free(q)) return q;
    return std::nullopt;
  }

  std::optional<int> reply(const GameState& s, int b, int last) {
    switch (b) {
      case kG1: return partner_reply(s, pair1_, last);
      case kG2: return partner_reply(s, pair2_, last);
      case kGoodGood: return partner_reply(s, pairGG_, last);
      case kGoodBad: return partner_reply(s, pairGB_, last);
      case kG3:
      case kG5: {
        // Degree proxy for the transversal / multistage families: answer at
        // Breaker's endpoints with the edge whose ends have fewest Maker edges.
        if (last < 0) return std::nullopt;
        auto& st = side_[b];
        auto [u, v] = label(last);
        int best = -1, bestScore = 0;
        for (int x : {u, v})
          for (int e : st.adj[x]) {
            if (!s.is_free(e)) continue;
            auto [a, c] = label(e);
            int sc = st.maker[a] + st.maker[c];
            if (best < 0 || sc < bestScore || (sc == bestScore && e < best)) best = e, bestScore = sc;
          }
        if (best < 0) return std::nullopt;
        return best;
      }
      case kG4: {
        auto& st = side_[kG4];
        int v = -1;
        for (int w = 0; w < n_; ++w)
          if (st.free[w] > 0 && (v < 0 || deficit4_[w] > deficit4_[v])) v = w;
        if (v < 0) return std::nullopt;
        int best = -1, bestDef = 0;
        for (int e : st.adj[v]) {
          if (!s.is_free(e)) continue;
          auto [a, c] = label(e);
          int o = a == v ? c : a;
          if (best < 0 || deficit4_[o] > bestDef) best = e, bestDef = deficit4_[o];
        }
        if (best < 0) return std::nullopt;
        return best;
      }
      case kV2: return factor_move(s);
      default: return std::nullopt;
    }
  }

  // Subgame 6 Substage I: round-robin between the degree game and greedy clique
  // completion; a vertex breaking d_B <= 0.4|V2| + d_M is answered first.
  std::optional<int> factor_move(const GameState& s) {
    ++state_.factor_rounds;
    while (!threatened_.empty()) {
      int v = threatened_.front();
      threatened_.pop_front();
      if (free2_[v] > 0 && violated(v)) return degree_edge_at(s, v);
    }
    k5_turn_ = !k5_turn_;
    if (k5_turn_) {
      if (auto e = k5_move(s)) return e;
      return degree_move(s);
    }
    if (auto e = degree_move(s)) return e;
    return k5_move(s);
  }

  bool violated(int v) const { return dB2_[v] > 0.4 * static_cast<double>(state_.V2.size()) + dM2_[v]; }

  std::optional<int> degree_edge_at(const GameState& s, int v) const {
    int best = -1;
    for (int u : state_.V2) {
      if (u == v || !s.is_free(kn_edge(n_, u, v))) continue;
      if (best < 0 || dB2_[u] - dM2_[u] > dB2_[best] - dM2_[best]) best = u;
    }
    if (best < 0) return std::nullopt;
    return kn_edge(n_, v, best);
  }

  std::optional<int> degree_move(const GameState& s) const {
    int v = -1;
    for (int w : state_.V2)
      if (free2_[w] > 0 && (v < 0 || dB2_[w] - dM2_[w] > dB2_[v] - dM2_[v])) v = w;
    if (v < 0) return std::nullopt;
    return degree_edge_at(s, v);
  }

  int inside(const GameState& s, const Clique& g, Owner o) const {
    int c = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) c += s.owner(kn_edge(n_, g[i], g[j])) == o;
    return c;
  }

  std::optional<int> free_inside(const GameState& s, int g) const {
    const auto& v = groups_[g].v;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (s.is_free(kn_edge(n_, v[i], v[j]))) return kn_edge(n_, v[i], v[j]);
    return std::nullopt;
  }

  bool all_complete(const GameState& s) {
    bool all = true;
    for (auto& g : groups_) {
      if (!g.complete && inside(s, g.v, Owner::a) == 10) g.complete = true;
      all = all && g.complete;
    }
    return all && !groups_.empty();
  }

  // Alive incomplete group with the most Maker edges.
  int best_group(const GameState& s) {
    int best = -1, bestMk = -1;
    for (int g = 0; g < static_cast<int>(groups_.size()); ++g) {
      if (groups_[g].complete) continue;
      if (inside(s, groups_[g].v, Owner::b) > 0) continue;
      int mk = inside(s, groups_[g].v, Owner::a);
      if (mk == 10) {
        groups_[g].complete = true;
        continue;
      }
      if (mk > bestMk) best = g, bestMk = mk;
    }
    return best;
  }

  std::optional<int> k5_move(const GameState& s) {
    if (dirty_) regroup(s);
    int g = best_group(s);
    if (g < 0) return std::nullopt;
    return free_inside(s, g);
  }

  // Re-forms the groups hit by Breaker together with a few untouched groups:
  // grow each new group from the loose vertex with most Maker edges, adding
  // vertices without Breaker edges to the group, most Maker edges first.
  void regroup(const GameState& s) {
    dirty_ = false;
    std::vector<int> loose, keep;
    int fresh = 0;
    for (int g = 0; g < static_cast<int>(groups_.size()); ++g) {
      const auto& G = groups_[g];
      bool take = false;
      if (!G.complete) {
        if (inside(s, G.v, Owner::b) > 0) take = true;
        else if (fresh < 4 && inside(s, G.v, Owner::a) == 0) {
          take = true;
          ++fresh;
        }
      }
      if (take)
        loose.insert(loose.end(), G.v.begin(), G.v.end());
      else
        keep.push_back(g);
    }
    if (loose.empty()) return;
    std::vector<Group> next;
    for (int g : keep) next.push_back(groups_[g]);
    std::sort(loose.begin(), loose.end());
    auto own = [&](int a, int b) { return s.owner(kn_edge(n_, a, b)); };
    std::vector<int> left = loose, stuck;
    while (!left.empty()) {
      int seed = left[0], seedScore = -1;
      for (int v : left) {
        int sc = 0;
        for (int w : left)
          if (w != v && own(v, w) == Owner::a) ++sc;
        if (sc > seedScore) seed = v, seedScore = sc;
      }
      std::vector<int> grp{seed};
      while (grp.size() < 5) {
        int pick = -1, pickScore = -1;
        for (int u : left) {
          if (std::find(grp.begin(), grp.end(), u) != grp.end()) continue;
          int sc = 0;
          bool ok = true;
          for (int w : grp) {
            Owner o = own(u, w);
            if (o == Owner::b) ok = false;
            if (o == Owner::a) ++sc;
          }
          if (ok && sc > pickScore) pick = u, pickScore = sc;
        }
        if (pick < 0) break;
        grp.push_back(pick);
      }
      if (grp.size() == 5) {
        Group G;
        std::sort(grp.begin(), grp.end());
        std::copy(grp.begin(), grp.end(), G.v.begin());
        next.push_back(G);
        for (int v : grp) std::erase(left, v);
      } else {
        stuck.push_back(seed);
        std::erase(left, seed);
      }
    }
    std::sort(stuck.begin(), stuck.end());
    for (std::size_t i = 0; i + 5 <= stuck.size(); i += 5) {
      Group G;
      std::copy(stuck.begin() + i, stuck.begin() + i + 5, G.v.begin());
      next.push_back(G);
    }
    groups_ = std::move(next);
    for (int g = 0; g < static_cast<int>(groups_.size()); ++g)
      for (int v : groups_[g].v) group_of_[v] = g;
  }

  // Substage II: pick the bad cliques, protect good pairs without Breaker edges
  // with three pairs whose every transversal is a matching, and pair the edges
  // from under-degree bad vertices to V_good.
  void setup_substage2(const GameState& s, bool) {
    const int u = p_.units();
    auto& cl = state_.cliques;
    cl.clear();
    for (const auto& g : groups_) cl.push_back(g.v);
    std::sort(cl.begin(), cl.end());
    std::vector<std::pair<int, int>> score;
    for (int k = 0; k < static_cast<int>(cl.size()); ++k) {
      int b = 0;
      for (int v : cl[k]) b += dB2_[v];
      score.emplace_back(-b, k);
    }
    std::sort(score.begin(), score.end());
    state_.bad.clear();
    for (int i = 0; i < u && i < static_cast<int>(score.size()); ++i) state_.bad.push_back(score[i].second);
    std::sort(state_.bad.begin(), state_.bad.end());
    std::vector<char> isBad(cl.size(), 0);
    for (int k : state_.bad) isBad[k] = 1;
    for (int k = 0; k < static_cast<int>(cl.size()); ++k)
      for (int v : cl[k]) cls_[v] = isBad[k] ? 2 : 1;
    state_.v2_degree_at_split = dM2_;
    const int B = s.board().size;
    pairGG_ = StarPairing(B);
    pairGB_ = StarPairing(B);
    state_.protected_pairs.clear();
    for (int a = 0; a < static_cast<int>(cl.size()); ++a) {
      if (isBad[a]) continue;
      for (int b = a + 1; b < static_cast<int>(cl.size()); ++b) {
        if (isBad[b]) continue;
        bool clean = true;
        for (int x : cl[a])
          for (int y : cl[b])
            if (s.owner(kn_edge(n_, x, y)) == Owner::b) clean = false;
        if (!clean) continue;
        state_.protected_pairs.push_back({a, b});
        const auto& A = cl[a];
        const auto& Bq = cl[b];
        int g = pairGG_.add_empty_group(a);
        std::array<std::pair<Edge, Edge>, 3> trio{{{{A[0], Bq[0]}, {A[0], Bq[1]}},
                                                   {{A[1], Bq[2]}, {A[2], Bq[2]}},
                                                   {{A[3], Bq[3]}, {A[3], Bq[4]}}}};
        for (auto [e1, e2] : trio) {
          int x = kn_edge(n_, e1.first, e1.second), y = kn_edge(n_, e2.first, e2.second);
          if (s.is_free(x) && s.is_free(y)) pairGG_.add_pair(x, y, g);
        }
      }
    }
    std::vector<int> good;
    for (int k = 0; k < static_cast<int>(cl.size()); ++k)
      if (!isBad[k]) good.insert(good.end(), cl[k].begin(), cl[k].end());
    std::sort(good.begin(), good.end());
    for (int k : state_.bad)
      for (int v : cl[k]) {
        if (dM2_[v] >= 40 * u) continue;
        std::vector<int> els;
        for (int w : good)
          if (s.is_free(kn_edge(n_, v, w))) els.push_back(kn_edge(n_, v, w));
        pairGB_.add_group(v, els);
      }
    openGG_ = group_sizes(pairGG_);
    openGB_ = group_sizes(pairGB_);
    std::vector<int> gg, gb, bb;
    for (std::size_t i = 0; i < state_.V2.size(); ++i)
      for (std::size_t j = i + 1; j < state_.V2.size(); ++j) {
        int x = state_.V2[i], y = state_.V2[j];
        int e = kn_edge(n_, x, y);
        if (!s.is_free(e)) continue;
        int k = cls_[x] + cls_[y];
        (k == 2 ? gg : (k == 3 ? gb : bb)).push_back(e);
      }
    std::sort(gg.begin(), gg.end());
    std::sort(gb.begin(), gb.end());
    std::sort(bb.begin(), bb.end());
    lists_[kGoodGood] = FreeList(unpaired_first(gg, pairGG_));
    lists_[kGoodBad] = FreeList(unpaired_first(gb, pairGB_));
    lists_[kBadBad] = FreeList(bb);
    substage_ = 2;
  }

  Params p_;
  int n_;
  std::uint64_t seed_;
  int budget_;
  BuilderState state_;
  std::vector<int> degM_;
  std::vector<Edge> breaker_edges_;
  bool ib_started_ = false;
  int ib_next_ = 0;
  std::vector<int> ib_breaker_;
  bool in_stage2_ = false;
  int substage_ = 0;
  FreeList all_;
  std::vector<FreeList> lists_;
  StarPairing pair1_, pair2_, pairGG_, pairGB_;
  std::vector<int> open1_, open2_, openGG_, openGB_;
  std::array<SideBoard, kBoards> side_;
  std::vector<int> deficit4_;
  std::vector<int> dM2_, dB2_, free2_, cls_;
  std::vector<Group> groups_;
  std::vector<int> group_of_;
  bool dirty_ = false;
  bool k5_turn_ = false;
  std::deque<int> threatened_;
  std::vector<BoardReply> replies_;
};

namespace detail {

// Size of a maximum matching between two cliques using edges owned by o.
inline int owned_matching(const GameState& s, int n, const Clique& A, const Clique& B, Owner o) {
  std::vector<Edge> es;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (s.owner(kn_edge(n, A[i], B[j])) == o) es.emplace_back(i, 5 + j);
  auto mate = max_matching(10, es);
  int k = 0;
  for (int i = 0; i < 5; ++i) k += mate[i] >= 0;
  return k;
}

inline ConditionalCheck pairing_check(const std::string& name, const GameState& s, const StarPairing& pr, Owner o) {
  auto miss = pr.missed(s, o);
  ConditionalCheck c{name, CheckStatus::pass, miss.empty(), ""};
  c.detail = std::to_string(pr.pairs().size()) + " pairs, " + std::to_string(miss.size()) + " without a builder element";
  return c;
}

// Per-vertex floor: every vertex meeting the entry bound reaches the exit bound.
template <class Entry, class Exit>
ConditionalCheck floor_check(const std::string& name, const std::vector<int>& vertices, Entry entry, Exit exit,
                             const std::string& what) {
  int cond = 0, bad = -1, fails = 0;
  for (int v : vertices) {
    if (!entry(v)) continue;
    ++cond;
    if (!exit(v)) {
      ++fails;
      if (bad < 0) bad = v;
    }
  }
  ConditionalCheck c{name, cond > 0 ? CheckStatus::pass : CheckStatus::fail, fails == 0, ""};
  c.detail = std::to_string(cond) + " of " + std::to_string(vertices.size()) + " vertices met the entry bound; " +
             std::to_string(fails) + " missed " + what + (bad >= 0 ? " (e.g. " + std::to_string(bad) + ")" : "");
  return c;
}

// sum over (A, B) of 2^{1-|F|} is at least N 2^{1 - a b}; report "fail" when that
// bound already reaches 1, else "unknown" (the exact sum is out of reach).
inline std::pair<CheckStatus, std::string> es_entry(int side, int n, int a, int b) {
  double lnN = ln_binom(side, a) + ln_binom(n - a, b);
  double lnLower = lnN + (1.0 - a * static_cast<double>(b)) * std::log(2.0);
  std::string d = "ln|F| = " + std::to_string(lnN) + ", ln(lower bound of the criterion sum) = " + std::to_string(lnLower);
  return {lnLower >= 0 ? CheckStatus::fail : CheckStatus::unknown, d};
}

inline std::pair<CheckStatus, std::string> multistage_entry(int side, int n, int a, int b, double delta) {
  double lnN = ln_binom(side, a) + ln_binom(n - a, b);
  double need = 4.0 / (delta * delta) * lnN;
  std::string d = "min |F| <= " + std::to_string(a * b) + ", need > " + std::to_string(need);
  return {a * b <= need ? CheckStatus::fail : CheckStatus::unknown, d};
}

}  // namespace detail

inline std::vector<ConditionalCheck> MakerBuilder::checks(const GameState& s) const {
  std::vector<ConditionalCheck> out;
  const int n = n_;
  const double logn = p_.log_n();
  const auto& star = state_.star;
  const int u = p_.units();
  auto own = [&](int a, int b) { return s.owner(kn_edge(n, a, b)); };
  {
    int got = 0;
    for (int v : star.S) got += own(star.x, v) == Owner::a;
    bool ok = static_cast<int>(star.S.size()) == p_.s_star_size() && got == static_cast<int>(star.S.size());
    out.push_back({"stage I.a star", CheckStatus::pass, ok,
                   "|S*| = " + std::to_string(star.S.size()) + ", required " + std::to_string(p_.s_star_size())});
  }
  if (ib_started_) {
    const int r = static_cast<int>(star.R.size());
    bool entry = true;
    for (int i = 0; i < r && r > 1; ++i)
      if (!(ib_breaker_[i] < static_cast<double>(star.S.size()) - p_.C0 * logn)) entry = false;
    std::vector<char> used(n, 0);
    bool ok = r <= 25;
    for (int i = 0; i < r; ++i) {
      int v = star.R[i], q = star.partner[i];
      bool served = q >= 0 && own(v, q) == Owner::a && (q == star.x || !used[q]);
      if (q >= 0 && q != star.x) used[q] = 1;
      ok = ok && served;
    }
    out.push_back({"stage I.b (2b)", entry ? CheckStatus::pass : CheckStatus::fail, ok,
                   "|R*| = " + std::to_string(r)});
  } else {
    out.push_back({"stage I.b (2b)", CheckStatus::fail, false, "stage I.b not reached"});
  }
  if (!in_stage2_) {
    out.push_back({"stage II", CheckStatus::fail, false, "V2 was never fixed"});
    return out;
  }
  const auto& plan = state_.plan;
  auto inS = detail::mask_of(n, star.S), inR = detail::mask_of(n, star.R);
  auto on = [&](int a, int b, int brd) { return plan.board_of[kn_edge(n, a, b)] == brd; };
  std::vector<int> all(n), outside;
  for (int v = 0; v < n; ++v) {
    all[v] = v;
    if (!inS[v] && !inR[v] && v != star.x) outside.push_back(v);
  }
  out.push_back(detail::pairing_check("subgame 1 pairing", s, pair1_, Owner::a));
  out.push_back(detail::floor_check(
      "subgame 1 floor", outside,
      [&](int v) {
        int d = 0;
        for (int w : star.S) d += on(v, w, kG1);
        return d > 4 * p_.C0 * logn;
      },
      [&](int v) { return detail::count_into(s, n, v, star.S, Owner::a) >= 2 * p_.C0 * logn; },
      "d_M(v,S*) >= 2 C0 log n"));
  out.push_back(detail::pairing_check("subgame 2 pairing", s, pair2_, Owner::a));
  out.push_back(detail::floor_check(
      "subgame 2 floor", state_.V1,
      [&](int v) {
        int d = 0;
        for (int w : state_.V2) d += on(v, w, kG2);
        return d > 80 * u;
      },
      [&](int v) { return detail::count_into(s, n, v, state_.V2, Owner::a) >= 40 * u; }, "d_M(v,V2) >= 40 gamma n"));
  {
    auto [st, d] = detail::es_entry(static_cast<int>(state_.V1.size()), n, p_.m(), p_.m());
    ConditionalCheck c{"subgame 3 transversal", st, false, d};
    if (st == CheckStatus::pass) {
      Graph m3(n);
      for (int e = 0; e < s.board().size; ++e)
        if (plan.board_of[e] == kG3 && s.owner(e) == Owner::a) m3.add_edge(label(e).first, label(e).second);
      c.exit_ok = find_bipartite_hole(m3, state_.V1, p_.m()).status == CheckStatus::pass;
    }
    out.push_back(c);
  }
  {
    const auto& st = side_[kG4];
    int dmin = -1, mmin = -1, at = -1;
    for (int v = 0; v < n; ++v) {
      int d = static_cast<int>(st.adj[v].size());
      if (d == 0) continue;
      if (dmin < 0 || d < dmin) dmin = d;
      if (mmin < 0 || st.maker[v] < mmin) mmin = st.maker[v], at = v;
    }
    out.push_back({"subgame 4 min-degree", CheckStatus::pass, mmin >= dmin / 4,
                   "min Maker degree in G4 = " + std::to_string(mmin) + " at " + std::to_string(at) +
                       ", delta(G4) / 4 = " + std::to_string(dmin / 4)});
    out.push_back(detail::floor_check(
        "subgame 4 floor", all,
        [&](int v) {
          int d = 0;
          for (int w : state_.V1)
            if (w != v) d += on(v, w, kG4);
          return d > n / 10.0;
        },
        [&](int v) { return detail::count_into(s, n, v, state_.V1, Owner::a) >= n / 40.0; }, "d_M(v,V1) >= n/40"));
  }
  {
    auto [st, d] = detail::multistage_entry(static_cast<int>(state_.V1.size()), n, n / 40,
                                            static_cast<int>(std::floor(logn)), 0.2);
    out.push_back({"subgame 5 multistage", st, false, d});
  }
  if (substage_ == 2) {
    int miss = 0;
    for (auto [a, b] : state_.protected_pairs)
      if (detail::owned_matching(s, n, state_.cliques[a], state_.cliques[b], Owner::a) < 3) ++miss;
    out.push_back({"subgame 6 (ii) 3-matchings", state_.protected_pairs.empty() ? CheckStatus::fail : CheckStatus::pass,
                   miss == 0,
                   std::to_string(state_.protected_pairs.size()) + " protected pairs, " + std::to_string(miss) +
                       " without a Maker 3-matching"});
    out.push_back(detail::pairing_check("subgame 6 (i) pairing", s, pairGB_, Owner::a));
    std::vector<int> badV;
    std::vector<int> pairsAt(n, 0);
    for (int g = 0; g < pairGB_.groups(); ++g) pairsAt[pairGB_.centre(g)] = static_cast<int>(pairGB_.group(g).size());
    for (int k : state_.bad) badV.insert(badV.end(), state_.cliques[k].begin(), state_.cliques[k].end());
    out.push_back(detail::floor_check(
        "subgame 6 (i) floor", badV,
        [&](int v) { return state_.v2_degree_at_split[v] + pairsAt[v] >= 40 * u; },
        [&](int v) { return detail::count_into(s, n, v, state_.V2, Owner::a) >= 40 * u; }, "d_M(v,V2) >= 40 gamma n"));
  } else {
    out.push_back({"subgame 6 (ii) 3-matchings", CheckStatus::fail, false, "K5-factor not completed"});
  }
  {
    int bad = off_board_replies();
    out.push_back({"same-board replies", CheckStatus::pass, bad == 0,
                   std::to_string(replies_.size()) + " Stage II replies, " + std::to_string(bad) + " off-board"});
  }
  return out;
}

}  // namespace posgames
