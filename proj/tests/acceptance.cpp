#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corpus.hpp"
#include "oracles.hpp"
#include "posgames/experiment.hpp"
#include "posgames/k55.hpp"
#include "posgames/pair_degree.hpp"
#include "posgames/players.hpp"
#include "posgames/routing.hpp"
#include "posgames/strategy.hpp"
#include "posgames/tree.hpp"
#include "posgames/universality.hpp"

using namespace posgames;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

// ---- 1, 2: Erdos-Selfridge corpus

const std::vector<corpus::Hypergraph>& es_corpus() {
  static const auto c = corpus::es_corpus(8, 4);
  return c;
}

Verdict criterion1() {
  auto t0 = Clock::now();
  const auto& hs = es_corpus();
  int blocked = 0;
  for (const auto& h : hs) {
    std::map<std::string, bool> memo;
    auto s = new_game(Board::plain(h.elements), Rules::MB, 1);
    auto policy = [&](const GameState& g) { return es_blocker_claim(g, h.sets); };
    blocked += !oracle::maker_beats_policy(s, h.sets, policy, memo);
  }
  double t = since(t0);
  return {blocked == static_cast<int>(hs.size()) && t <= 300,
          std::to_string(blocked) + "/" + std::to_string(hs.size()) +
              " hypergraphs blocked against exhaustive Maker, " + fmt(t, 1) + " s (limit 300 s)"};
}

Verdict criterion2() {
  auto t0 = Clock::now();
  const auto& hs = es_corpus();
  int forced = 0;
  long leaves = 0;
  for (const auto& h : hs) {
    auto s = new_game(Board::plain(h.elements), Rules::WC, 1);
    auto offer = [&](const GameState& g) { return wc_transversal_move(g, h.sets); };
    forced += oracle::waiter_forces_transversal(s, h.sets, offer, leaves);
  }
  return {forced == static_cast<int>(hs.size()),
          std::to_string(forced) + "/" + std::to_string(hs.size()) + " hypergraphs, " + std::to_string(leaves) +
              " Client reply sequences, every one a transversal, " + fmt(since(t0), 1) + " s"};
}

// ---- 3: K_{5,5}

Verdict criterion3() {
  wc_k55_matching_strategy();
  auto t0 = Clock::now();
  const auto& book = wc_k55_matching_strategy();
  long leaves = 0, good = 0;
  std::function<void(const k55::Node*, GameState)> walk = [&](const k55::Node* n, GameState s) {
    if (!n) {
      if (s.leftover_turn()) s.apply(legal_moves(s)[0]);
      ++leaves;
      std::vector<std::vector<int>> adj(5);
      for (int e = 0; e < 25; ++e)
        if (s.owner(e) == Owner::a) adj[e / 5].push_back(e % 5);
      good += s.finished() && oracle::kuhn_matching(adj, 5) == 5;
      return;
    }
    auto t = apply_move(s, {Actor::waiter, {n->offer[0], n->offer[1]}});
    for (int k = 0; k < 2; ++k) walk(n->child[k].get(), apply_move(t, {Actor::client, {n->offer[k]}}));
  };
  walk(book.root(), new_game(k55::board(), Rules::WC, 1));
  double t = since(t0);
  return {leaves == 4096 && good == leaves && t <= 10,
          std::to_string(good) + "/" + std::to_string(leaves) + " leaves hold a Client perfect matching, " + fmt(t) +
              " s with the cached playbook (limit 10 s)"};
}

// ---- 4: tree lemmas

Tree random_attachment(int n, std::mt19937_64& rng) {
  std::vector<int> parent(n, -1);
  for (int v = 1; v < n; ++v) parent[v] = static_cast<int>(rng() % v);
  return Tree::from_parents(parent);
}

Tree preferential_attachment(int n, std::mt19937_64& rng) {
  std::vector<int> parent(n, -1), ends{0};
  for (int v = 1; v < n; ++v) {
    parent[v] = ends[rng() % ends.size()];
    ends.push_back(parent[v]);
    ends.push_back(v);
  }
  return Tree::from_parents(parent);
}

Tree long_chain_tree(int n, std::mt19937_64& rng) {
  std::vector<int> parent(n, -1);
  for (int v = 1; v < n; ++v) parent[v] = rng() % 10 == 0 ? static_cast<int>(rng() % v) : v - 1;
  return Tree::from_parents(parent);
}

bool induces_tree(const Tree& t, const std::vector<int>& vs) {
  std::set<int> in(vs.begin(), vs.end());
  std::vector<std::pair<int, int>> es;
  for (auto [a, b] : t.edges())
    if (in.count(a) && in.count(b)) es.push_back({a, b});
  return oracle::is_tree(vs, es);
}

Verdict criterion4() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  int trials = 10000, split = 0, cover = 0, paths = 0, pathsChecked = 0;
  std::string first;
  for (int it = 0; it < trials; ++it) {
    int n = 4 + static_cast<int>(rng() % 497);
    Tree t;
    switch (it % 5) {
      case 0:
      case 1: t = random_attachment(n, rng); break;
      case 2: t = preferential_attachment(n, rng); break;
      case 3: t = long_chain_tree(n, rng); break;
      default: t = trees::random_bounded(n, 2 + static_cast<int>(rng() % 4), rng); break;
    }
    int k = 2 + static_cast<int>(rng() % std::max(1, n / 2 - 1));
    int ell = 1 + static_cast<int>(rng() % 20);
    auto note = [&](const std::string& what) {
      if (first.empty()) first = what + " (tree " + std::to_string(it) + ", n = " + std::to_string(n) + ")";
    };

    auto [A, B] = small_subtree_split(t, k);
    std::vector<int> both;
    std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(both));
    std::set<int> all(A.begin(), A.end());
    all.insert(B.begin(), B.end());
    int a = static_cast<int>(A.size());
    bool okSplit = k <= a && a < 2 * k && both.size() <= 1 && static_cast<int>(all.size()) == n && induces_tree(t, A) &&
                   induces_tree(t, B);
    split += okSplit;
    if (!okSplit) note("split");

    auto parts = subtree_cover(t, k);
    bool okCover = static_cast<long>(parts.size()) <= (n + k - 2) / (k - 1) + 1;
    std::set<int> covered;
    for (const auto& P : parts) {
      okCover = okCover && static_cast<int>(P.size()) < 2 * k && induces_tree(t, P);
      covered.insert(P.begin(), P.end());
    }
    okCover = okCover && static_cast<int>(covered.size()) == n;
    cover += okCover;
    if (!okCover) note("cover");

    auto bp = find_bare_paths(t, ell);
    int leaves = static_cast<int>(t.leaves().size());
    bool okPaths = true;
    std::set<int> used;
    for (const auto& P : bp) {
      okPaths = okPaths && static_cast<int>(P.size()) == ell + 1 && is_bare_path(t, P);
      for (int v : P) okPaths = okPaths && used.insert(v).second;
    }
    if (leaves <= k) {
      ++pathsChecked;
      okPaths = okPaths && bp.size() >= (n - (2.0 * k - 2) * (ell + 1)) / (ell + 1);
    }
    okPaths = okPaths && bp.size() >= (n - (2.0 * leaves - 2) * (ell + 1)) / (ell + 1);
    paths += okPaths;
    if (!okPaths) note("bare paths");
  }
  double t = since(t0);
  Verdict v{split == trials && cover == trials && paths == trials && t <= 120,
            "split " + std::to_string(split) + ", cover " + std::to_string(cover) + ", bare paths " +
                std::to_string(paths) + " of " + std::to_string(trials) + " trees (bound at random k checked on " +
                std::to_string(pathsChecked) + "), " + fmt(t, 1) + " s (limit 120 s)"};
  if (!first.empty()) v.notes.push_back("first failure: " + first);
  return v;
}

// ---- 5: star matching

Verdict criterion5() {
  std::mt19937_64 rng(5);
  int agree = 0, feasible = 0, infeasible = 0, total = 500;
  for (int it = 0; it < total; ++it) {
    int nu = 1 + static_cast<int>(rng() % 30);
    int d = 1 + static_cast<int>(rng() % 5);
    std::map<int, int> k;
    int sum = 0;
    for (int u = 0; u < nu; ++u) sum += k[u] = 1 + static_cast<int>(rng() % d);
    if (sum > 150) {
      --it;
      continue;
    }
    int n = nu + sum;
    Graph G(n);
    std::bernoulli_distribution coin(0.03 + 0.4 * static_cast<double>(rng() % 100) / 100);
    for (int u = 0; u < nu; ++u)
      for (int w = nu; w < n; ++w)
        if (coin(rng)) G.add_edge(u, w);
    std::vector<int> U(nu), W(sum);
    std::iota(U.begin(), U.end(), 0);
    std::iota(W.begin(), W.end(), nu);
    std::vector<std::vector<int>> cap(n + 2, std::vector<int>(n + 2, 0));
    for (int u = 0; u < nu; ++u) {
      cap[n][u] = k[u];
      for (int w = nu; w < n; ++w) cap[u][w] = G.has_edge(u, w);
    }
    for (int w = nu; w < n; ++w) cap[w][n + 1] = 1;
    bool expect = oracle::max_flow(cap, n, n + 1) == sum;
    bool ok;
    try {
      auto r = star_matching(G, U, W, d, 1, k);
      std::set<int> seen;
      ok = expect;
      for (int u : U) {
        const auto& ws = r[u];
        ok = ok && static_cast<int>(ws.size()) == k[u];
        for (int w : ws) ok = ok && G.has_edge(u, w) && seen.insert(w).second;
      }
      ok = ok && static_cast<int>(seen.size()) == sum;
      ++feasible;
    } catch (const Error& e) {
      ok = !expect && e.code() == ErrorCode::no_star_matching;
      ++infeasible;
    }
    agree += ok;
  }
  return {agree == total && feasible > 0 && infeasible > 0,
          std::to_string(agree) + "/" + std::to_string(total) + " instances agree with the Edmonds-Karp oracle (" +
              std::to_string(feasible) + " feasible, " + std::to_string(infeasible) + " infeasible)"};
}

// ---- 6: Dirac

Verdict criterion6() {
  std::mt19937_64 rng(6);
  int samples = 0, ok = 0;
  double time = 0;
  while (samples < 200) {
    int n = 3 + static_cast<int>(rng() % 198);
    Graph G(n);
    if (samples % 4 == 3) {
      int h = n / 2;
      std::bernoulli_distribution coin(0.05);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if ((u < h) != (v < h) || coin(rng)) G.add_edge(u, v);
    } else {
      std::bernoulli_distribution coin(0.55 + 0.4 * static_cast<double>(rng() % 1000) / 1000);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (coin(rng)) G.add_edge(u, v);
    }
    if (2 * G.min_degree() < n) continue;
    ++samples;
    auto t0 = Clock::now();
    auto c = dirac_hamilton_cycle(G);
    time += since(t0);
    std::set<int> vs(c.begin(), c.end());
    bool cyc = static_cast<int>(c.size()) == n && static_cast<int>(vs.size()) == n;
    for (std::size_t i = 0; cyc && i < c.size(); ++i) cyc = G.has_edge(c[i], c[(i + 1) % c.size()]);
    ok += cyc;
  }
  double mean = time / samples;
  return {ok == samples && mean <= 1.0,
          std::to_string(ok) + "/" + std::to_string(samples) + " verified Hamilton cycles, mean " + fmt(mean * 1000, 3) +
              " ms per graph (limit 1 s)"};
}

// ---- 7: end to end

Tree relabel(const Tree& t, std::mt19937_64& rng) {
  std::vector<int> perm(t.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> es;
  for (auto [a, b] : t.edges()) es.push_back({perm[a], perm[b]});
  return Tree::from_edges(t.n(), es);
}

// A path-like tree: a spine carrying a few short pendant paths on distinct
// vertices among its first 60, so the rest of the spine stays bare.
Tree long_path(int n, std::mt19937_64& rng) {
  int extra = static_cast<int>(rng() % 21);
  int spine = n - extra;
  std::vector<int> parent;
  for (int v = 0; v < spine; ++v) parent.push_back(v - 1);
  std::vector<int> hosts(58);
  std::iota(hosts.begin(), hosts.end(), 1);
  std::shuffle(hosts.begin(), hosts.end(), rng);
  for (std::size_t h = 0; static_cast<int>(parent.size()) < n; ++h) {
    int len = std::min<int>(1 + static_cast<int>(rng() % 5), n - static_cast<int>(parent.size()));
    int prev = hosts[h];
    for (int i = 0; i < len; ++i) {
      parent.push_back(prev);
      prev = static_cast<int>(parent.size()) - 1;
    }
  }
  return Tree::from_parents(parent);
}

// Pendant paths of `tooth` vertices, each long enough for one bare path of
// length ell, hung on a spine.
Tree comb(int n, std::mt19937_64& rng) {
  int tooth = 68 + static_cast<int>(rng() % 11);
  int spine = 100 + static_cast<int>(rng() % (n - 6 * tooth - 99));
  return trees::subdivided_comb(n, spine, tooth, 3 + static_cast<int>(rng() % 15));
}

// A hub with c children carrying 3 to 6 leaves each and a handle path; the
// leaves left over sit on at most a few handle vertices near its far end.  All
// non-leaves must fit into V1.
Tree hub_broom(int n, int v1, std::mt19937_64& rng) {
  int c = 52 + static_cast<int>(rng() % 11);
  std::vector<int> per(c);
  int perSum = 0;
  for (int& x : per) perSum += x = 3 + static_cast<int>(rng() % 4);
  int s = 60 + static_cast<int>(rng() % (v1 - 10 - c - 60));
  int rest = n - 1 - c - s - perSum;
  std::vector<int> parent{-1};
  for (int i = 0; i < c; ++i) parent.push_back(0);
  int handle = static_cast<int>(parent.size());
  for (int i = 0; i < s; ++i) parent.push_back(i == 0 ? 0 : static_cast<int>(parent.size()) - 1);
  for (int i = 1; i <= c; ++i)
    for (int j = 0; j < per[i - 1]; ++j) parent.push_back(i);
  for (int i = 0; i < rest; ++i) parent.push_back(handle + s - 2 - i / 60);
  return Tree::from_parents(parent);
}

struct Family7 {
  std::string name, want;
  const Synthesis* instance;
  Params p;
  std::function<Tree(std::mt19937_64&)> make;
};

Verdict criterion7() {
  auto t0 = Clock::now();
  Params desk = Params::desk(), leaves = Params::desk_leaves();
  auto sDesk = synth_certificate_graph(desk, 1);
  auto sLeaves = synth_certificate_graph(leaves, 1);
  Verdict v;
  bool synthOk = verify_certificate(sDesk.G, sDesk.cert, desk).ok() && verify_certificate(sLeaves.G, sLeaves.cert, leaves).ok();
  std::vector<Family7> families = {
      {"long paths", "1", &sDesk, desk, [](std::mt19937_64& r) { return long_path(600, r); }},
      {"subdivided combs", "1", &sDesk, desk,
       [](std::mt19937_64& r) { return comb(600, r); }},
      {"brooms with a hub", "2.1", &sLeaves, leaves,
       [&](std::mt19937_64& r) { return hub_broom(600, leaves.n - leaves.v2_size(), r); }},
      {"caterpillars", "2.2", &sLeaves, leaves,
       [](std::mt19937_64& r) {
         int spine = 140 + static_cast<int>(r() % 61);
         int stride = 1 + 2 * static_cast<int>(r() % 6);
         return trees::caterpillar(spine, 600 - spine, std::gcd(stride, spine) == 1 ? stride : 1);
       }},
  };
  bool all = synthOk;
  std::mt19937_64 rng(7);
  for (const auto& f : families) {
    int ok = 0, tried = 0, degreeOk = 0;
    std::string firstFail;
    for (int i = 0; i < 100; ++i) {
      Tree T = relabel(f.make(rng), rng);
      ++tried;
      degreeOk += T.max_degree() <= f.p.d();
      try {
        EmbedOptions opt;
        opt.seed = static_cast<std::uint64_t>(i) + 1;
        opt.verify = false;
        auto e = embed_tree(f.instance->G, f.instance->cert, f.p, T, opt);
        bool valid = e.route == f.want && !embedding_violation(f.instance->G, T, e.g, true);
        ok += valid;
        if (!valid && firstFail.empty()) firstFail = "route " + e.route;
      } catch (const Error& e) {
        if (firstFail.empty()) firstFail = e.what();
      }
    }
    all = all && ok == tried && degreeOk == tried;
    std::string line = f.name + " (Case " + f.want + ", " + (f.instance == &sDesk ? "desk" : "desk-leaves") +
                       ", d = " + std::to_string(f.p.d()) + "): " + std::to_string(ok) + "/" + std::to_string(tried) +
                       " embedded and validated, max degree within d in " + std::to_string(degreeOk);
    if (!firstFail.empty()) line += "; first failure: " + firstFail;
    v.notes.push_back(line);
  }
  double t = since(t0);
  v.pass = all && t <= 600;
  v.detail = std::string("synthesised certificates ") + (synthOk ? "verify" : "FAIL verification") + ", " + fmt(t, 1) +
             " s (limit 600 s); Case 2 runs on desk-leaves (n = 600, gamma = 0.01, K = 13) because at desk C1 gamma n = " +
             std::to_string(static_cast<int>(desk.C1() * desk.gamma * desk.n)) + " leaves exceeds n";
  return v;
}

// ---- 8: builders

Verdict criterion8() {
  auto t0 = Clock::now();
  struct Pairing {
    BuilderKind b;
    AdversaryKind a;
  };
  std::vector<Pairing> pairings = {{BuilderKind::maker, AdversaryKind::random},
                                   {BuilderKind::maker, AdversaryKind::greedy_blocker},
                                   {BuilderKind::waiter, AdversaryKind::random},
                                   {BuilderKind::waiter, AdversaryKind::pair_degree_attacker}};
  Params p = Params::desk();
  Verdict v;
  int conditioned = 0, failures = 0, makerCert = 0, makerRuns = 0, waiterCert = 0, waiterRuns = 0;
  for (auto [b, a] : pairings) {
    int cond = 0, fail = 0, cert = 0, forfeits = 0, partition = 0, factor = 0;
    std::set<std::string> failedNames;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto r = run_match(b, a, p, seed);
      cond += r.conditioned();
      fail += r.conditioned_failures();
      cert += r.certificate_ok();
      forfeits += static_cast<int>(r.flags.forfeits.size());
      partition += r.flags.partition_failed;
      factor += r.flags.factor_failed;
      for (const auto& c : r.checks)
        if (c.conditioned() && !c.exit_ok) failedNames.insert(c.name);
    }
    conditioned += cond;
    failures += fail;
    (b == BuilderKind::maker ? makerCert : waiterCert) += cert;
    (b == BuilderKind::maker ? makerRuns : waiterRuns) += 20;
    std::string line = to_string(b) + " vs " + to_string(a) + ": conditioned checks " + std::to_string(cond - fail) +
                       "/" + std::to_string(cond) + " hold, certificate verified " + std::to_string(cert) +
                       "/20, forfeits " + std::to_string(forfeits) + ", partition flags " + std::to_string(partition) +
                       ", factor flags " + std::to_string(factor);
    for (const auto& n : failedNames) line += " [failed: " + n + "]";
    v.notes.push_back(line);
  }
  bool partA = failures == 0;
  double makerRate = static_cast<double>(makerCert) / makerRuns, waiterRate = static_cast<double>(waiterCert) / waiterRuns;
  bool partB = makerRate >= 0.9 && waiterRate >= 1.0;
  v.pass = partA && partB;
  v.detail = "(a) conditioned guarantees " + std::string(partA ? "PASS" : "FAIL") + ": " +
             std::to_string(conditioned - failures) + "/" + std::to_string(conditioned) + "; (b) certificates " +
             (partB ? "PASS" : "FAIL") + ": maker " + fmt(100 * makerRate, 0) + "% (need 90%), waiter " +
             fmt(100 * waiterRate, 0) + "% (need 100%); " + fmt(since(t0), 1) + " s";
  if (!partB)
    v.notes.push_back(
        "(b) is out of reach at desk scale: a builder's graph from a (1:1) game on K_600 has density about 1/2, so "
        "property (4) (no bipartite hole between m-sets, m = 6) fails, and the Maker partition needs d_G2(v,V2) > 80 "
        "gamma n = 480 with |V2| = 390");
  return v;
}

// ---- 9: pair degrees on K_400

Verdict criterion9() {
  auto t0 = Clock::now();
  const int n = 400;
  auto host = Graph::complete(n);
  auto nvw = common_neighbor_sets(host);
  int runs = 5, conditioned = 0, met = 0;
  Verdict v;
  for (int seed = 1; seed <= runs; ++seed) {
    GameState s;
    auto rep = wc_pair_degree_strategy(host, 0.5, nvw, pair_degree_attacker(n), static_cast<std::uint64_t>(seed), &s);
    Graph c(n);
    for (int e = 0; e < s.board().size; ++e)
      if (s.owner(e) == Owner::a) c.add_edge(s.board().labels[e].first, s.board().labels[e].second);
    int worst = n;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) worst = std::min(worst, static_cast<int>((c.row(a) & c.row(b) & nvw[a * n + b]).count()));
    bool held = rep.criteria_held();
    bool floor = worst >= 0.5 * n / 500.0;
    conditioned += held;
    met += held && floor;
    v.notes.push_back("seed " + std::to_string(seed) + ": stage criteria " + fmt(rep.stage1_criterion, 4) + " / " +
                      fmt(rep.stage2_criterion, 4) + (held ? " held" : " not held") + ", min pair degree " +
                      std::to_string(worst) + " (floor " + fmt(0.5 * n / 500.0, 1) + ")");
  }
  v.pass = conditioned > 0 && met == conditioned;
  v.detail = std::to_string(met) + "/" + std::to_string(conditioned) + " conditioned runs reach the beta n/500 floor (" +
             std::to_string(runs) + " runs), " + fmt(since(t0), 1) + " s";
  return v;
}

// ---- 10: determinism

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion10() {
  auto t0 = Clock::now();
  namespace fs = std::filesystem;
  int replays = 0, replayOk = 0, files = 0, same = 0;
  std::vector<std::pair<BuilderKind, AdversaryKind>> pairings = {{BuilderKind::maker, AdversaryKind::greedy_blocker},
                                                                 {BuilderKind::waiter, AdversaryKind::pair_degree_attacker}};
  for (auto [b, a] : pairings) {
    ExperimentConfig c;
    c.builder = b;
    c.adversary = a;
    c.seeds = {1, 2};
    auto base = fs::temp_directory_path() / "posgames_acceptance";
    c.out = (base / "first").string();
    fs::remove_all(c.out);
    auto run = run_experiment(c);
    ExperimentConfig again = config_from_json(nlohmann::json::parse(slurp(fs::path(c.out) / "config.json")));
    again.out = (base / "second").string();
    fs::remove_all(again.out);
    run_experiment(again);
    for (const auto& e : fs::directory_iterator(c.out)) {
      if (e.path().filename() == "config.json") continue;
      ++files;
      same += slurp(e.path()) == slurp(fs::path(again.out) / e.path().filename());
    }
    for (const auto& r : run.results) {
      ++replays;
      auto text = slurp(fs::path(c.out) / (match_stem(c, r.seed) + ".transcript.jsonl"));
      replayOk += replay(transcript_from_jsonl(text)) == r.final_state;
    }
    fs::remove_all(base);
  }
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    int n = 2 + static_cast<int>(rng() % 12);
    Rules r = i % 2 ? Rules::WC : Rules::MB;
    auto s = new_game(Board::plain(n), r, 1 + static_cast<int>(rng() % 2));
    while (!s.finished()) {
      auto moves = legal_moves(s);
      s.apply(moves[rng() % moves.size()]);
    }
    ++replays;
    replayOk += replay(transcript_from_json(nlohmann::json::parse(transcript_to_json(transcript_of(s)).dump()))) == s;
  }
  return {replayOk == replays && same == files && files > 0,
          std::to_string(replayOk) + "/" + std::to_string(replays) + " transcripts replay to the identical state, " +
              std::to_string(same) + "/" + std::to_string(files) + " re-run output files byte-identical, " +
              fmt(since(t0), 1) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-10"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> all = {
      {"ES soundness", criterion1},
      {"WC transversal soundness", criterion2},
      {"K55 forcing", criterion3},
      {"tree lemmas", criterion4},
      {"star matching oracle equivalence", criterion5},
      {"Dirac Hamilton", criterion6},
      {"end-to-end embedding at desk scale", criterion7},
      {"builder conditional guarantees", criterion8},
      {"large common degree on K_400", criterion9},
      {"determinism", criterion10},
  };
  int failed = 0;
  for (int i = 1; i <= 10; ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), i) == only.end()) continue;
    Verdict v;
    try {
      v = all[i - 1].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what(), {}};
    }
    failed += !v.pass;
    std::cout << "criterion " << i << " " << (v.pass ? "PASS" : "FAIL") << " " << all[i - 1].first << ": " << v.detail
              << std::endl;
    for (const auto& n : v.notes) std::cout << "    " << n << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
