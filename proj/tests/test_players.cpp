#include <gtest/gtest.h>

#include <random>
#include <set>

#include "posgames/players.hpp"

using namespace posgames;

namespace {

Edge ends(int n, int e) {
  int u = 0, base = 0;
  while (base + (n - 1 - u) <= e) {
    base += n - 1 - u;
    ++u;
  }
  return {u, u + 1 + (e - base)};
}

// Maker (desk profile) against a scripted or random Breaker.  `breaker` returns
// the element Breaker claims next, or -1 for a uniform random free element.
template <class Script>
GameState play_maker(MakerBuilder& mk, const Params& p, Script breaker, int stop_after_rounds = -1,
                     std::uint64_t seed = 7) {
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  Adversary adv(AdversaryKind::random, p.n, seed);
  while (!s.finished() && (stop_after_rounds < 0 || s.round() < stop_after_rounds)) {
    bool maker = s.to_move() == Actor::maker;
    int e = maker ? mk.move(s) : breaker(s);
    if (!maker && e < 0) e = adv.claim(s);
    s.apply({s.to_move(), {e}});
    mk.observe(s, e, maker ? Owner::a : Owner::b);
    adv.observe(s, e, maker ? Owner::a : Owner::b);
  }
  return s;
}

StarRecord artificial_star(const Params& p) {
  StarRecord st;
  st.x = 0;
  for (int v = 1; v <= p.s_star_size(); ++v) st.S.push_back(v);
  return st;
}

std::vector<int> top_v2(const Params& p) {
  std::vector<int> v;
  for (int x = p.n - p.v2_size(); x < p.n; ++x) v.push_back(x);
  return v;
}

}  // namespace

TEST(MakerBuilder, FirstMoveIsAnEdgeAtTheStarCentre) {
  auto p = Params::desk();
  MakerBuilder mk(p, 1);
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  auto [u, v] = ends(p.n, mk.move(s));
  EXPECT_TRUE(u == 0 || v == 0);
  EXPECT_EQ(mk.state().star.x, 0);
}

TEST(MakerBuilder, StageIaBuildsTheFullStar) {
  auto p = Params::desk();
  MakerBuilder mk(p, 1);
  auto s = play_maker(mk, p, [](const GameState&) { return -1; }, p.s_star_size());
  ASSERT_EQ(static_cast<int>(mk.state().star.S.size()), p.s_star_size());
  for (int v : mk.state().star.S) EXPECT_EQ(s.owner(kn_edge(p.n, 0, v)), Owner::a);
}

TEST(MakerBuilder, StageIbUsesAFreshStarLeafWhenTheCentreEdgeIsBlocked) {
  auto p = Params::desk();
  MakerBuilder mk(p, 1);
  const int v = p.n - 1;
  // Breaker takes x*v first, then v s for each new star leaf s.
  std::size_t seen = 0;
  auto script = [&](const GameState& s) {
    if (s.is_free(kn_edge(p.n, 0, v))) return kn_edge(p.n, 0, v);
    const auto& S = mk.state().star.S;
    while (seen < S.size()) {
      int e = kn_edge(p.n, v, S[seen++]);
      if (s.is_free(e)) return e;
    }
    return -1;
  };
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  Adversary adv(AdversaryKind::random, p.n, 3);
  int ib_move = -1, sv_degree = 0;
  while (mk.state().stage == "I.a" || mk.state().stage == "I.b") {
    bool maker = s.to_move() == Actor::maker;
    int e = maker ? mk.move(s) : script(s);
    if (!maker && e < 0) e = adv.claim(s);
    if (maker && mk.state().stage == "I.b" && ib_move < 0) {
      ib_move = e;
      auto [a, b] = ends(p.n, e);
      int sv = a == v ? b : a;
      for (int w = 0; w < p.n; ++w)
        if (w != sv && s.owner(kn_edge(p.n, sv, w)) == Owner::a) ++sv_degree;
    }
    s.apply({s.to_move(), {e}});
    mk.observe(s, e, maker ? Owner::a : Owner::b);
    adv.observe(s, e, maker ? Owner::a : Owner::b);
  }
  const auto& star = mk.state().star;
  ASSERT_FALSE(star.R.empty());
  EXPECT_EQ(star.R[0], v);
  ASSERT_GE(ib_move, 0);
  auto [a, b] = ends(p.n, ib_move);
  int sv = a == v ? b : a;
  EXPECT_EQ(std::max(a, b), v);
  EXPECT_NE(sv, 0);
  EXPECT_TRUE(std::count(star.S.begin(), star.S.end(), sv));
  EXPECT_EQ(star.partner[0], sv);
  // s_v had only its star edge when Maker claimed v s_v.
  EXPECT_EQ(sv_degree, 1);
}

TEST(MakerPartition, RejectsV2WithAClaimedEdge) {
  auto p = Params::desk();
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  auto V2 = top_v2(p);
  s.apply({Actor::maker, {kn_edge(p.n, V2[0], V2[1])}});
  try {
    maker_preparatory_partition(s, artificial_star(p), V2, p, 1);
    FAIL() << "expected invalid-configuration";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_configuration);
  }
}

TEST(MakerPartition, SameSeedGivesTheSamePlanAndChecksAreReproducible) {
  auto p = Params::desk();
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  auto star = artificial_star(p);
  auto V2 = top_v2(p);
  auto a = maker_preparatory_partition(s, star, V2, p, 5, 2, false);
  auto b = maker_preparatory_partition(s, star, V2, p, 5, 2, false);
  EXPECT_EQ(a.board_of, b.board_of);
  EXPECT_EQ(plan_to_json(a), plan_to_json(b));
  // Boards are disjoint by construction (one label per element); every free
  // element outside E(V2) is on G1..G5 and every edge of V2 on board "V2".
  std::vector<char> inV2(p.n, 0);
  for (int v : V2) inV2[v] = 1;
  for (int e = 0; e < s.board().size; ++e) {
    auto [u, v] = s.board().labels[e];
    if (inV2[u] && inV2[v])
      ASSERT_EQ(a.board_of[e], 5);
    else
      ASSERT_TRUE(a.board_of[e] >= 0 && a.board_of[e] < 5);
  }
  // Recorded exact properties re-check against the stored partition.
  std::vector<int> V1;
  for (int v = 0; v < p.n; ++v)
    if (!inV2[v]) V1.push_back(v);
  auto again = detail::check_maker_plan(a, s, star, V1, V2, p, false);
  for (const auto& c : again)
    if (c.mode == "exact") EXPECT_EQ(a.check(c.property)->status, c.status) << c.property;
}

TEST(MakerPartition, G2IsInfeasibleAtDeskScale) {
  // (G2) asks d_G2(v,V2) > 80 gamma n = 480 while |V2| = 390, so no partition
  // passes and the strict mode reports partition-failed.
  auto p = Params::desk();
  ASSERT_GT(80 * p.units(), p.v2_size());
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  auto star = artificial_star(p);
  auto V2 = top_v2(p);
  auto plan = maker_preparatory_partition(s, star, V2, p, 9, 1, false);
  EXPECT_FALSE(plan.passed);
  EXPECT_EQ(plan.check("G2")->status, CheckStatus::fail);
  try {
    maker_preparatory_partition(s, star, V2, p, 9, 1, true);
    FAIL() << "expected partition-failed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::partition_failed);
  }
}

TEST(MakerBuilder, RepliesOnBreakersBoardUnlessItIsExhausted) {
  auto p = Params::desk();
  MakerBuilder mk(p, 11);
  auto s = play_maker(mk, p, [](const GameState&) { return -1; });
  ASSERT_EQ(mk.state().stage, "II");
  const auto& plan = mk.state().plan;
  // Independent replay: per raw board (G1..G5, V2) free counts, and each Maker
  // Stage II move compared with Breaker's preceding move.
  std::vector<int> freeOn(6, 0);
  GameState r = GameState::start(complete_board(p.n), Rules::MB, 1);
  bool counting = false;
  int lastBreaker = -1, checked = 0, g3 = 0;
  const auto& h = s.history();
  for (std::size_t i = 0; i < h.size(); ++i) {
    int e = h[i].move.elements[0];
    bool maker = h[i].move.actor == Actor::maker;
    if (!counting && plan.board_of[e] >= 0 && r.is_free(e)) {
      // First move on a planned element: the plan was fixed before it.
      counting = true;
      for (int x = 0; x < r.board().size; ++x)
        if (r.is_free(x) && plan.board_of[x] >= 0) ++freeOn[plan.board_of[x]];
    }
    if (counting && maker && lastBreaker >= 0 && plan.board_of[lastBreaker] >= 0) {
      // V2 is split into sub-boards in Substage II; the reply log covers it.
      int want = plan.board_of[lastBreaker];
      if (want < 5 && freeOn[want] > 0) {
        ASSERT_EQ(plan.board_of[e], want) << "round " << h[i].round;
        g3 += want == 2;
      }
      ++checked;
    }
    r.apply(h[i].move);
    if (counting) --freeOn[plan.board_of[e]];
    if (!maker) lastBreaker = e;
  }
  EXPECT_GT(checked, 80000);
  EXPECT_GT(g3, 10000);
  EXPECT_EQ(mk.off_board_replies(), 0);
}

TEST(MakerBuilder, GreedyHintOnG1TakesAPairOfTheMostDepletedStar) {
  auto p = Params::desk();
  MakerBuilder mk(p, 4);
  GameState s = GameState::start(complete_board(p.n), Rules::MB, 1);
  Adversary adv(AdversaryKind::random, p.n, 4);
  int tested = 0;
  while (!s.finished() && tested < 25) {
    bool maker = s.to_move() == Actor::maker;
    if (!maker && !mk.replies().empty() && mk.replies().back().board == MakerBuilder::kG1) {
      auto hint = mk.damage(s);
      const auto& pr = mk.pairing(MakerBuilder::kG1);
      std::vector<int> open(pr.groups(), 0);
      for (int q = 0; q < static_cast<int>(pr.pairs().size()); ++q)
        if (s.is_free(pr.pairs()[q].first) && s.is_free(pr.pairs()[q].second)) ++open[pr.group_of_pair(q)];
      int least = -1;
      for (int g = 0; g < pr.groups(); ++g)
        if (open[g] > 0 && (least < 0 || open[g] < least)) least = open[g];
      if (least > 0) {
        ASSERT_TRUE(hint.has_value());
        int q = pr.pair_of(*hint);
        ASSERT_GE(q, 0);
        EXPECT_EQ(open[pr.group_of_pair(q)], least);
        EXPECT_TRUE(s.is_free(pr.partner(*hint)));
        ++tested;
      }
    }
    int e = maker ? mk.move(s) : adv.claim(s);
    s.apply({s.to_move(), {e}});
    mk.observe(s, e, maker ? Owner::a : Owner::b);
    adv.observe(s, e, maker ? Owner::a : Owner::b);
  }
  EXPECT_EQ(tested, 25);
}

TEST(Adversary, RandomPickIsSeedDeterministic) {
  auto board = complete_board(3);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    GameState s = GameState::start(board, Rules::MB, 1, Side::b);
    Adversary a(AdversaryKind::random, 3, seed), b(AdversaryKind::random, 3, seed);
    EXPECT_EQ(a.claim(s), b.claim(s));
  }
  std::set<int> picks;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    GameState s = GameState::start(board, Rules::MB, 1, Side::b);
    picks.insert(Adversary(AdversaryKind::random, 3, seed).claim(s));
  }
  EXPECT_EQ(picks.size(), 3u);
}

TEST(Adversary, IsolatorAttacksTheLowestBuilderDegreeVertex) {
  const int n = 6;
  GameState s = GameState::start(complete_board(n), Rules::MB, 1);
  Adversary iso(AdversaryKind::isolator, n, 1);
  // Maker: 0-1, 0-2, 1-2, 3-4, 3-5; Breaker: 2-5 in between.
  std::vector<std::pair<int, int>> maker{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}};
  std::vector<std::pair<int, int>> breaker{{2, 5}, {0, 3}, {1, 3}, {2, 3}};
  for (std::size_t i = 0; i < maker.size(); ++i) {
    int e = kn_edge(n, maker[i].first, maker[i].second);
    s.apply({Actor::maker, {e}});
    iso.observe(s, e, Owner::a);
    if (i + 1 < maker.size()) {
      int f = kn_edge(n, breaker[i].first, breaker[i].second);
      s.apply({Actor::breaker, {f}});
      iso.observe(s, f, Owner::b);
    }
  }
  // Maker degrees: 0:2 1:2 2:2 3:2 4:1 5:1.  Vertex 4 is poorest (lowest id),
  // its free partner of lowest Maker degree is 5.
  auto [u, v] = ends(n, iso.claim(s));
  EXPECT_EQ(std::min(u, v), 4);
  EXPECT_EQ(std::max(u, v), 5);
}

TEST(WaiterK5Factor, PartSizeFiveCannotBeForced) {
  // Client receives one edge of every offered pair, so at most 5 of the 10
  // edges of K5: the exhaustive solver confirms Client escapes.
  Family f{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  EXPECT_EQ(brute_force_winner(complete_board(5), f, Rules::WC, 1), Actor::client);
  for (int pick : {0, 1}) {
    bool complete = true;
    auto c = waiter_k5_factor_subgame(5, [pick](const GameState& s) { return s.pending_offer()[pick]; }, &complete);
    EXPECT_FALSE(complete);
    EXPECT_TRUE(c.empty());
  }
}

TEST(WaiterK5Factor, PartSizeMustBeAMultipleOfFive) {
  try {
    K5FactorWaiter w(6, {0, 1, 2, 3, 4, 5});
    FAIL() << "expected invalid-configuration";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_configuration);
  }
}

TEST(WaiterK5Factor, PartSizeTenAgainstRandomClient) {
  // Frozen simulation statistic: 0 of 100.  A factor on ten vertices needs 20
  // Client edges while Client ends with at most 22 of the 45.
  int complete = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    bool ok = false;
    auto c = waiter_k5_factor_subgame(10, [&](const GameState& s) { return s.pending_offer()[rng() % 2]; }, &ok);
    complete += ok;
    for (const auto& k : c)
      for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) ASSERT_TRUE(k[i] < k[j]);
  }
  EXPECT_EQ(complete, 0);
}

TEST(WaiterK5Factor, ForcedCliquesAreClientCliques) {
  std::mt19937_64 rng(3);
  GameState last;
  K5FactorWaiter w(30, [] {
    std::vector<int> v(30);
    for (int i = 0; i < 30; ++i) v[i] = i;
    return v;
  }());
  GameState s = GameState::start(complete_board(30), Rules::WC, 1);
  while (!s.finished() && !w.done()) {
    auto o = w.offer(s);
    if (o.size() < 2) break;
    s.apply({Actor::waiter, o});
    s.apply({Actor::client, {s.pending_offer()[rng() % 2]}});
  }
  w.offer(s);
  ASSERT_FALSE(w.cliques().empty());
  std::set<int> used;
  for (const auto& k : w.cliques())
    for (int i = 0; i < 5; ++i) {
      EXPECT_TRUE(used.insert(k[i]).second);
      for (int j = i + 1; j < 5; ++j) EXPECT_EQ(s.owner(kn_edge(30, k[i], k[j])), Owner::a);
    }
}

TEST(WaiterBuilder, StageOffersFollowTheStageMachine) {
  auto p = Params::desk();
  WaiterBuilder wt(p, 2);
  GameState s = GameState::start(complete_board(p.n), Rules::WC, 1);
  Adversary adv(AdversaryKind::random, p.n, 2);
  const auto& V1 = wt.state().V1;
  auto inV1 = [&](int v) { return std::count(V1.begin(), V1.end(), v) > 0; };
  bool sawIIb = false, sawIV = false;
  const auto& book = wc_k55_matching_strategy();
  while (!s.finished() && !sawIV) {
    if (s.leftover_turn()) break;
    std::string before = wt.state().stage;
    auto o = wt.offer(s);
    const std::string& now = wt.state().stage;
    ASSERT_EQ(o.size(), 2u);
    if (now == "I") {
      for (int e : o) {
        auto [u, v] = ends(p.n, e);
        EXPECT_EQ(u, 0);
        EXPECT_TRUE(inV1(v));
      }
    }
    if (now == "II.b" && before != "II.b") {
      sawIIb = true;
      const auto& pr = wt.matched_pairs().front();
      const auto& A = wt.state().cliques[pr.a];
      const auto& B = wt.state().cliques[pr.b];
      auto root = book.root()->offer;
      EXPECT_EQ(o[0], kn_edge(p.n, A[root[0] / 5], B[root[0] % 5]));
      EXPECT_EQ(o[1], kn_edge(p.n, A[root[1] / 5], B[root[1] % 5]));
    }
    if (now == "IV") {
      sawIV = true;
      auto [a, b] = ends(p.n, o[0]);
      auto [c, d] = ends(p.n, o[1]);
      EXPECT_EQ(a, c);
      EXPECT_TRUE(inV1(a));
      EXPECT_FALSE(inV1(b));
      EXPECT_FALSE(inV1(d));
      EXPECT_EQ(wt.state().plan.board_of[o[0]], 1);
      EXPECT_EQ(wt.state().plan.board_of[o[1]], 1);
    }
    s.apply({Actor::waiter, o});
    int c = adv.choose(s);
    s.apply({Actor::client, {c}});
    wt.observe(s, o, c);
    for (int e : o) adv.observe(s, e, e == c ? Owner::a : Owner::b);
  }
  EXPECT_TRUE(sawIIb);
  EXPECT_TRUE(sawIV);
}

TEST(RunMatch, SeedDeterminesTheMatchAndTranscriptsReplay) {
  auto p = Params::desk();
  for (auto b : {BuilderKind::maker, BuilderKind::waiter}) {
    auto a = b == BuilderKind::maker ? AdversaryKind::greedy_blocker : AdversaryKind::pair_degree_attacker;
    auto r1 = run_match(b, a, p, 17);
    auto r2 = run_match(b, a, p, 17);
    EXPECT_TRUE(r1.final_state == r2.final_state);
    EXPECT_EQ(match_to_json(r1).dump(), match_to_json(r2).dump());
    auto t = transcript_of(r1.final_state);
    EXPECT_TRUE(replay(t) == r1.final_state);
    EXPECT_TRUE(replay(transcript_from_json(transcript_to_json(t))) == r1.final_state);
  }
}

TEST(RunMatch, ConditionedChecksHoldAgainstRandomOpponents) {
  auto p = Params::desk();
  for (auto b : {BuilderKind::maker, BuilderKind::waiter}) {
    auto r = run_match(b, AdversaryKind::random, p, 3);
    EXPECT_GT(r.conditioned(), 0);
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed()) << to_string(b) << ": " << c.name << ": " << c.detail;
    ASSERT_TRUE(r.certificate.has_value());
    ASSERT_TRUE(r.report.has_value());
    EXPECT_EQ(r.report->at("1").status, CheckStatus::pass);
  }
}
