#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "oracles.hpp"
#include "posgames/k55.hpp"
#include "posgames/strategy.hpp"

using namespace posgames;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::accounting_error;
}

Family random_family(std::mt19937& rng, int n, int sets, int min_size) {
  Family fam;
  while (static_cast<int>(fam.size()) < sets) {
    std::vector<int> f;
    for (int e = 0; e < n; ++e)
      if (rng() % 2) f.push_back(e);
    if (static_cast<int>(f.size()) >= min_size) fam.push_back(f);
  }
  return fam;
}

Move es_policy(const GameState& s, const Family& fam) { return es_blocker_claim(s, fam); }

}  // namespace

TEST(EsPotential, Values) {
  auto s = new_game(Board::plain(4), Rules::MB, 1);
  EXPECT_EQ(es_potential(s, {}), 0.0);
  EXPECT_DOUBLE_EQ(es_potential(s, {{0, 1, 2}}), 0.125);
  EXPECT_DOUBLE_EQ(2 * es_potential(s, {{0, 1, 2}}), 0.25);
  EXPECT_DOUBLE_EQ(es_criterion({{0, 1}, {2, 3}}), 1.0);
}

TEST(EsBlocker, ReplyInsideTriple) {
  auto s = new_game(Board::plain(3), Rules::MB, 1);
  s.apply({Actor::maker, {0}});
  EXPECT_EQ(es_blocker_move(s, {{0, 1, 2}}), 1);
  // Both replies block under continued ES play.
  for (int reply : {1, 2}) {
    auto t = apply_move(s, {Actor::breaker, {reply}});
    std::map<std::string, bool> memo;
    Family fam{{0, 1, 2}};
    EXPECT_FALSE(oracle::maker_beats_policy(t, fam, [&](const GameState& g) { return es_policy(g, fam); }, memo));
  }
}

TEST(EsBlocker, SingletonTaken) {
  auto s = new_game(Board::plain(2), Rules::MB, 1, Side::b);
  EXPECT_EQ(es_blocker_move(s, {{0}}), 0);
}

TEST(EsBlocker, RandomHypergraphsAgainstExhaustiveMaker) {
  std::mt19937 rng(2024);
  int tested = 0;
  while (tested < 1000) {
    int n = 4 + static_cast<int>(rng() % 9);
    int sets = 1 + static_cast<int>(rng() % 4);
    auto fam = random_family(rng, n, sets, 3);
    if (es_criterion(fam) >= 1) continue;
    ++tested;
    std::map<std::string, bool> memo;
    auto s = new_game(Board::plain(n), Rules::MB, 1);
    ASSERT_FALSE(oracle::maker_beats_policy(s, fam, [&](const GameState& g) { return es_policy(g, fam); }, memo))
        << "instance " << tested;
  }
}

TEST(EsBlocker, PotentialMonotoneOverRounds) {
  std::mt19937 rng(9);
  for (int iter = 0; iter < 300; ++iter) {
    int n = 6 + static_cast<int>(rng() % 7);
    auto fam = random_family(rng, n, 1 + static_cast<int>(rng() % 5), 2);
    auto s = new_game(Board::plain(n), Rules::MB, 1, Side::b);
    while (s.free_count() >= 2) {
      double before = es_potential(s, fam);
      s.apply({Actor::breaker, {es_blocker_move(s, fam)}});
      auto fr = s.free_elements();
      s.apply({Actor::maker, {fr[rng() % fr.size()]}});
      EXPECT_LE(es_potential(s, fam), before + 1e-12);
    }
  }
}

TEST(WcTransversal, SinglePair) {
  auto s = new_game(Board::plain(2), Rules::WC, 1);
  EXPECT_EQ(wc_transversal_move(s, {{0, 1}}), (std::vector<int>{0, 1}));
}

TEST(WcTransversal, RandomFamiliesExhaustiveClient) {
  std::mt19937 rng(77);
  int tested = 0;
  while (tested < 1000) {
    int n = 3 + static_cast<int>(rng() % 8);
    auto fam = random_family(rng, n, 1 + static_cast<int>(rng() % 4), 2);
    if (es_criterion(fam) >= 1) continue;
    ++tested;
    long leaves = 0;
    auto s = new_game(Board::plain(n), Rules::WC, 1);
    ASSERT_TRUE(oracle::waiter_forces_transversal(s, fam, [&](const GameState& g) { return wc_transversal_move(g, fam); },
                                                  leaves))
        << "instance " << tested;
  }
}

// Scaled Stage I family of the common-degree lemma: all 0.9-fraction subsets of
// a 10-element candidate set, played on a 12-element board.
TEST(WcTransversal, NinetyPercentSubsets) {
  int n = 12;
  std::vector<int> y{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Family fam;
  for (int skip = 0; skip < 10; ++skip) {
    std::vector<int> f;
    for (int e : y)
      if (e != skip) f.push_back(e);
    fam.push_back(f);
  }
  ASSERT_LT(es_criterion(fam), 1.0);
  long leaves = 0;
  auto s = new_game(Board::plain(n), Rules::WC, 1);
  EXPECT_TRUE(oracle::waiter_forces_transversal(s, fam, [&](const GameState& g) { return wc_transversal_move(g, fam); },
                                                leaves));
  EXPECT_EQ(leaves, 64);
}

TEST(SecondPlayer, ClientPicksSingleton) {
  auto s = new_game(Board::plain(2), Rules::CW, 1);
  s.apply({Actor::waiter, {0, 1}});
  EXPECT_EQ(second_player_transversal_move(s, {{0}}), 0);
}

TEST(SecondPlayer, ClientWaiterCriterionSound) {
  std::mt19937 rng(5);
  int tested = 0;
  while (tested < 300) {
    int n = 3 + static_cast<int>(rng() % 6);
    auto fam = random_family(rng, n, 1 + static_cast<int>(rng() % 4), 1);
    if (cw_criterion(fam) >= 1) continue;
    ++tested;
    std::map<std::string, bool> memo;
    auto s = new_game(Board::plain(n), Rules::CW, 1);
    ASSERT_TRUE(oracle::client_always_hits(s, fam, [&](const GameState& g) { return second_player_transversal_move(g, fam); },
                                           memo))
        << "instance " << tested;
  }
}

TEST(SecondPlayer, AvoiderEnforcerTinyInstances) {
  std::mt19937 rng(6);
  int tested = 0;
  while (tested < 300) {
    int n = 2 + static_cast<int>(rng() % 9);
    auto fam = random_family(rng, n, 1 + static_cast<int>(rng() % 4), 1);
    if (es_criterion(fam) >= 1) continue;
    ++tested;
    for (Side first : {Side::a, Side::b}) {
      std::map<std::string, bool> memo;
      auto s = new_game(Board::plain(n), Rules::AE, 1, first);
      ASSERT_TRUE(oracle::first_player_always_hits(
          s, fam, [&](const GameState& g) { return second_player_transversal_move(g, fam); }, memo))
          << "instance " << tested;
    }
  }
}

// With only sum 2^{-|F|} < 1 the second player cannot force a hit: the first
// player dodges a singleton on a two-element board.
TEST(SecondPlayer, AvoiderEnforcerNeedsFullCriterion) {
  Family fam{{0}};
  ASSERT_LT(cw_criterion(fam), 1.0);
  std::map<std::string, bool> memo;
  auto s = new_game(Board::plain(2), Rules::AE, 1);
  EXPECT_FALSE(oracle::first_player_always_hits(
      s, fam, [&](const GameState& g) { return second_player_transversal_move(g, fam); }, memo));
}

TEST(SecondPlayer, CriterionViolatedStillLegal) {
  auto s = new_game(Board::plain(3), Rules::CW, 1);
  s.apply({Actor::waiter, {1, 2}});
  int e = second_player_transversal_move(s, {{0}});
  EXPECT_TRUE(e == 1 || e == 2);
}

TEST(Pairing, RespondsWithPartner) {
  PairingPlan plan{{{0, 1}}, Side::a};
  auto s = new_game(Board::plain(4), Rules::MB, 1, Side::b);
  s.apply({Actor::breaker, {0}});
  EXPECT_EQ(pairing_responder(plan, s, 0), 1);
  auto t = new_game(Board::plain(4), Rules::MB, 1, Side::b);
  t.apply({Actor::breaker, {3}});
  EXPECT_EQ(pairing_responder(plan, t, 3), std::nullopt);
}

TEST(Pairing, ViolationReported) {
  PairingPlan plan{{{0, 1}}, Side::a};
  auto s = new_game(Board::plain(4), Rules::MB, 1, Side::b);
  s.apply({Actor::breaker, {0}});
  s.apply({Actor::maker, {2}});
  s.apply({Actor::breaker, {1}});
  EXPECT_EQ(code_of([&] { pairing_responder(plan, s, 1); }), ErrorCode::pairing_violated);
}

TEST(Pairing, RandomPlansFullGames) {
  std::mt19937 rng(123);
  for (int iter = 0; iter < 100; ++iter) {
    int n = 10 + static_cast<int>(rng() % 30);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    PairingPlan plan{{}, Side::a};
    int pairs = 1 + static_cast<int>(rng() % (n / 2));
    for (int i = 0; i < pairs; ++i) plan.pairs.push_back({perm[2 * i], perm[2 * i + 1]});
    auto idx = pairing_index(plan, n);
    auto s = new_game(Board::plain(n), Rules::MB, 1, Side::b);
    while (!s.finished()) {
      auto fr = s.free_elements();
      int e = fr[rng() % fr.size()];
      s.apply({Actor::breaker, {e}});
      if (s.finished()) break;
      auto r = pairing_responder(plan, s, e, &idx);
      if (!r) r = s.free_elements().front();
      s.apply({Actor::maker, {*r}});
    }
    for (auto [x, y] : plan.pairs) EXPECT_TRUE(s.owner(x) == Owner::a || s.owner(y) == Owner::a);
  }
}

namespace {

int exhaustive_min_degree(const GameState& s, const Graph& host) {
  if (s.finished()) return min_degree_in(s, host.n(), Side::a);
  if (s.to_move() == Actor::maker) return exhaustive_min_degree(apply_move(s, {Actor::maker, {min_degree_strategy(host, s)}}), host);
  int worst = 1 << 30;
  for (int e : s.free_elements()) worst = std::min(worst, exhaustive_min_degree(apply_move(s, {Actor::breaker, {e}}), host));
  return worst;
}

// Breaker attacking a vertex of least Maker degree, random tie-breaks.
int attacker_move(const GameState& s, int n, std::mt19937& rng, const std::vector<int>& exclude = {}) {
  std::vector<int> mdeg(n, 0), fdeg(n, 0);
  const auto& lab = s.board().labels;
  std::vector<char> ex(lab.size(), 0);
  for (int e : exclude) ex[e] = 1;
  for (int e = 0; e < static_cast<int>(lab.size()); ++e) {
    if (s.owner(e) == Owner::a) {
      ++mdeg[lab[e].first];
      ++mdeg[lab[e].second];
    } else if (s.is_free(e) && !ex[e]) {
      ++fdeg[lab[e].first];
      ++fdeg[lab[e].second];
    }
  }
  std::vector<int> cands;
  int best = 1 << 30;
  for (int v = 0; v < n; ++v) {
    if (!fdeg[v]) continue;
    if (mdeg[v] < best) {
      best = mdeg[v];
      cands.clear();
    }
    if (mdeg[v] == best) cands.push_back(v);
  }
  int v = cands[rng() % cands.size()];
  std::vector<int> opts;
  for (int e = 0; e < static_cast<int>(lab.size()); ++e)
    if (s.is_free(e) && !ex[e] && (lab[e].first == v || lab[e].second == v)) opts.push_back(e);
  return opts[rng() % opts.size()];
}

}  // namespace

TEST(MinDegree, K5ExhaustiveBreaker) {
  auto host = Graph::complete(5);
  auto s = new_game(Board::of_graph(host), Rules::MB, 1);
  EXPECT_GE(exhaustive_min_degree(s, host), 1);
}

TEST(MinDegree, K9GreedyAttacker) {
  auto host = Graph::complete(9);
  for (unsigned seed = 0; seed < 100; ++seed) {
    std::mt19937 rng(seed);
    auto s = new_game(Board::of_graph(host), Rules::MB, 1);
    while (!s.finished()) {
      if (s.to_move() == Actor::maker)
        s.apply({Actor::maker, {min_degree_strategy(host, s)}});
      else
        s.apply({Actor::breaker, {attacker_move(s, 9, rng)}});
    }
    EXPECT_GE(min_degree_in(s, 9, Side::a), 2) << "seed " << seed;
  }
}

TEST(MinDegree, SingleEdge) {
  Graph host(2);
  host.add_edge(0, 1);
  auto s = new_game(Board::of_graph(host), Rules::MB, 1);
  EXPECT_EQ(min_degree_strategy(host, s), 0);
}

namespace {

int play_degree_game(int n, unsigned seed, bool isolator) {
  auto host = Graph::complete(n);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::mt19937 rng(seed);
  auto s = new_game(Board::of_graph(host), Rules::MB, 2);
  while (!s.finished()) {
    if (s.to_move() == Actor::maker) {
      s.apply({Actor::maker, {*degree_game_strategy(s, n, all)}});
      continue;
    }
    std::vector<int> picks;
    for (int i = 0; i < s.claim_size(Actor::breaker); ++i) {
      if (isolator) {
        picks.push_back(attacker_move(s, n, rng, picks));
      } else {
        std::vector<int> fr;
        for (int e : s.free_elements())
          if (std::find(picks.begin(), picks.end(), e) == picks.end()) fr.push_back(e);
        picks.push_back(fr[rng() % fr.size()]);
      }
    }
    s.apply({Actor::breaker, picks});
  }
  return min_degree_in(s, n, Side::a);
}

}  // namespace

TEST(DegreeGame, EmptyVertexSetIsNoop) {
  auto s = new_game(Board::of_graph(Graph::complete(4)), Rules::MB, 2);
  EXPECT_EQ(degree_game_strategy(s, 4, {}), std::nullopt);
}

TEST(Multistage, WholeBoardShare) {
  Family fam{{}};
  for (int e = 0; e < 40; ++e) fam[0].push_back(e);
  auto s = new_game(Board::plain(40), Rules::MB, 1);
  while (!s.finished()) {
    if (s.to_move() == Actor::maker)
      s.apply({Actor::maker, {multistage_strategy(s, fam, 0.5)}});
    else
      s.apply({Actor::breaker, {s.free_elements().front()}});
  }
  EXPECT_EQ(s.count_a(), 20);
}

TEST(Multistage, PreconditionReported) {
  Family fam{{0, 1}, {2, 3}};
  auto s = new_game(Board::plain(4), Rules::MB, 1);
  EXPECT_FALSE(multistage_precondition(fam, 0.1));
  EXPECT_EQ(code_of([&] { multistage_strategy(s, fam, 0.1, true); }), ErrorCode::precondition_unmet);
  EXPECT_NO_THROW(multistage_strategy(s, fam, 0.1));
}

TEST(DegreeGame, RandomBreakerMeetsBound) {
  double bound = 30.0 / 3 - 3 * std::sqrt(30 * std::log(30.0));
  for (unsigned seed = 0; seed < 100; ++seed) EXPECT_GE(play_degree_game(30, seed, false), bound);
}

TEST(DegreeGame, IsolatingBreakerFloor) {
  int worst = 1 << 30;
  for (unsigned seed = 0; seed < 100; ++seed) worst = std::min(worst, play_degree_game(30, seed, true));
  EXPECT_GE(worst, 4);
  RecordProperty("min_maker_degree", worst);
}

namespace {

// Plays a full (1:1) game: multistage Maker against a random or greedy opponent.
GameState play_multistage(int n, const Family& fam, double delta, unsigned seed, bool greedy) {
  std::mt19937 rng(seed);
  auto s = new_game(Board::plain(n), Rules::MB, 1);
  while (!s.finished()) {
    if (s.to_move() == Actor::maker) {
      s.apply({Actor::maker, {multistage_strategy(s, fam, delta)}});
    } else if (greedy) {
      s.apply({Actor::breaker, {multistage_strategy(s, fam, delta)}});
    } else {
      auto fr = s.free_elements();
      s.apply({Actor::breaker, {fr[rng() % fr.size()]}});
    }
  }
  return s;
}

bool shares_hold(const GameState& s, const Family& fam, double delta) {
  for (const auto& f : fam) {
    int mine = 0;
    for (int e : f) mine += s.owner(e) == Owner::a;
    if (mine < (0.5 - delta) * static_cast<double>(f.size()) - 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST(Multistage, RandomFamiliesMeetingPrecondition) {
  std::mt19937 rng(31);
  int tested = 0;
  while (tested < 200) {
    int n = 30 + static_cast<int>(rng() % 31);
    double delta = 0.35 + 0.15 * (rng() % 100) / 100.0;
    int sets = 2 + static_cast<int>(rng() % 3);
    Family fam;
    for (int i = 0; i < sets; ++i) {
      std::vector<int> f;
      for (int e = 0; e < n; ++e)
        if (rng() % 4 != 0) f.push_back(e);
      fam.push_back(f);
    }
    if (!multistage_precondition(fam, delta)) continue;
    ++tested;
    EXPECT_TRUE(shares_hold(play_multistage(n, fam, delta, tested, false), fam, delta));
    EXPECT_TRUE(shares_hold(play_multistage(n, fam, delta, tested, true), fam, delta));
  }
}

TEST(Multistage, TwoDisjointSets) {
  Family fam{{}, {}};
  for (int e = 0; e < 30; ++e) {
    fam[0].push_back(e);
    fam[1].push_back(30 + e);
  }
  for (unsigned seed = 0; seed < 50; ++seed) {
    for (bool greedy : {false, true}) {
      auto s = play_multistage(60, fam, 0.4, seed, greedy);
      for (const auto& f : fam) {
        int mine = 0;
        for (int e : f) mine += s.owner(e) == Owner::a;
        EXPECT_GE(mine, 3);
      }
    }
  }
}

TEST(K55, PlaybookForcesMatchingInEveryLeaf) {
  const auto& book = wc_k55_matching_strategy();
  long leaves = 0;
  std::function<void(const k55::Node*, GameState)> walk = [&](const k55::Node* n, GameState s) {
    if (!n) {
      if (s.leftover_turn()) s.apply(legal_moves(s)[0]);
      ASSERT_TRUE(s.finished());
      ++leaves;
      std::uint32_t c = 0;
      for (int e = 0; e < 25; ++e)
        if (s.owner(e) == Owner::a) c |= 1u << e;
      EXPECT_EQ(s.round(), 13);
      EXPECT_EQ(s.count_a(), 12);
      EXPECT_EQ(s.count_b(), 13);
      auto m = k55::extract_matching(c);
      ASSERT_EQ(m.size(), 5u);
      std::set<int> ends;
      for (int e : m) {
        ends.insert(e / 5);
        ends.insert(5 + e % 5);
      }
      EXPECT_EQ(ends.size(), 10u);
      return;
    }
    auto t = apply_move(s, {Actor::waiter, {n->offer[0], n->offer[1]}});
    for (int k = 0; k < 2; ++k) walk(n->child[k].get(), apply_move(t, {Actor::client, {n->offer[k]}}));
  };
  walk(book.root(), new_game(k55::board(), Rules::WC, 1));
  EXPECT_EQ(leaves, 4096);
}

TEST(K55, SerialisationRoundTrip) {
  const auto& book = wc_k55_matching_strategy();
  auto j = book.to_json();
  auto again = k55::Playbook::from_json(j);
  EXPECT_EQ(again.to_json(), j);
}
