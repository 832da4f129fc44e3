#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/embedding.hpp"
#include "posgames/error.hpp"
#include "posgames/graph.hpp"
#include "posgames/matching.hpp"
#include "posgames/params.hpp"
#include "posgames/routing.hpp"
#include "posgames/tree.hpp"

namespace posgames {

struct Certificate {
  std::vector<int> V1, V2;
  int x_star = -1;
  std::vector<int> S_star, R_star;
  CliqueFactor factor;
};

inline nlohmann::json certificate_to_json(const Certificate& c) {
  return {{"V1", c.V1},
          {"V2", c.V2},
          {"star", {{"x", c.x_star}, {"S", c.S_star}, {"R", c.R_star}}},
          {"cliques", c.factor.cliques},
          {"bad", c.factor.bad}};
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
  try {
    Certificate c;
    c.V1 = j.at("V1").get<std::vector<int>>();
    c.V2 = j.at("V2").get<std::vector<int>>();
    c.x_star = j.at("star").at("x").get<int>();
    c.S_star = j.at("star").at("S").get<std::vector<int>>();
    c.R_star = j.at("star").at("R").get<std::vector<int>>();
    c.factor = factor_from_json(j);
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("certificate: ") + e.what());
  }
}

struct PropertyCheck {
  std::string property;
  CheckStatus status = CheckStatus::unknown;
  std::string mode = "exact";
  std::string detail;
};

struct CertificateReport {
  std::vector<PropertyCheck> items;

  bool ok() const {
    return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.status == CheckStatus::pass; });
  }

  const PropertyCheck& at(const std::string& property) const {
    for (const auto& i : items)
      if (i.property == property) return i;
    fail(ErrorCode::invalid_parameter, "no property " + property);
  }

  std::optional<PropertyCheck> first_failure() const {
    for (const auto& i : items)
      if (i.status != CheckStatus::pass) return i;
    return std::nullopt;
  }
};

inline nlohmann::json report_to_json(const CertificateReport& r) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& i : r.items)
    items.push_back({{"property", i.property}, {"status", to_string(i.status)}, {"mode", i.mode}, {"detail", i.detail}});
  return {{"ok", r.ok()}, {"properties", items}};
}

struct HoleSearch {
  CheckStatus status = CheckStatus::unknown;
  std::vector<int> A, B;
  long nodes = 0;
};

// Property (4): searches for disjoint A in `side` and B in V(G), both of size m,
// with no edge between them.  Depth-first over increasing A; the candidate pool
// for B is the common non-neighbourhood of A minus A, which only shrinks as A
// grows, so branches with a pool below m are cut.  Exact unless the node budget
// runs out.
inline HoleSearch find_bipartite_hole(const Graph& G, const std::vector<int>& side, int m, long budget = 50000000) {
  HoleSearch out;
  int n = G.n();
  if (m <= 0 || static_cast<int>(side.size()) < m || n < 2 * m) {
    out.status = m <= 0 ? CheckStatus::fail : CheckStatus::pass;
    return out;
  }
  std::vector<Bitset> non(side.size());
  for (std::size_t i = 0; i < side.size(); ++i) {
    non[i] = ~G.row(side[i]);
    non[i].reset(side[i]);
  }
  std::vector<int> chosen;
  bool found = false, exhausted = false;
  std::function<void(std::size_t, const Bitset&)> rec = [&](std::size_t from, const Bitset& pool) {
    for (std::size_t i = from; i < side.size() && !found && !exhausted; ++i) {
      if (++out.nodes > budget) {
        exhausted = true;
        return;
      }
      Bitset next = pool & non[i];
      for (int a : chosen) next.reset(a);
      if (static_cast<int>(next.count()) < m) continue;
      chosen.push_back(side[i]);
      if (static_cast<int>(chosen.size()) == m) {
        found = true;
        out.A = chosen;
        auto b = bits_to_vector(next);
        out.B.assign(b.begin(), b.begin() + m);
      } else {
        rec(i + 1, next);
      }
      if (!found) chosen.pop_back();
    }
  };
  Bitset all(n);
  all.set();
  rec(0, all);
  out.status = found ? CheckStatus::fail : exhausted ? CheckStatus::unknown : CheckStatus::pass;
  return out;
}

namespace detail {

inline std::string list(const std::vector<int>& v, std::size_t cap = 12) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size() && i < cap; ++i) s += (i ? "," : "") + std::to_string(v[i]);
  if (v.size() > cap) s += ",...";
  return s + "}";
}

inline std::vector<int> star_repair_partners(const Graph& G, const Certificate& c, const std::vector<int>& pending) {
  std::vector<std::vector<int>> adj(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i)
    for (std::size_t j = 0; j < c.S_star.size(); ++j)
      if (G.has_edge(pending[i], c.S_star[j])) adj[i].push_back(static_cast<int>(j));
  auto m = bipartite_matching(adj, static_cast<int>(c.S_star.size()));
  std::vector<int> out(pending.size(), -1);
  for (std::size_t i = 0; i < pending.size(); ++i)
    if (m[i] >= 0) out[i] = c.S_star[m[i]];
  return out;
}

}  // namespace detail

// Checks properties (1)-(5) of a certificate.  Everything except (4) is an exact
// polynomial scan; (4) uses find_bipartite_hole and reports "unknown" when its
// node budget runs out.
inline CertificateReport verify_certificate(const Graph& G, const Certificate& c, const Params& p,
                                            long hole_budget = 50000000) {
  CertificateReport rep;
  const int n = G.n();
  const double logn = std::log(static_cast<double>(n));
  const int u = p.units();
  auto add = [&](std::string prop, bool ok, std::string detail, std::string mode = "exact") {
    rep.items.push_back({std::move(prop), ok ? CheckStatus::pass : CheckStatus::fail, std::move(mode), std::move(detail)});
  };
  auto in_range = [&](const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [&](int x) { return x >= 0 && x < n; });
  };

  // (1)
  std::vector<int> side(n, 0);
  bool partition = in_range(c.V1) && in_range(c.V2) && static_cast<int>(c.V1.size() + c.V2.size()) == n;
  if (partition) {
    for (int x : c.V1) side[x] |= 1;
    for (int x : c.V2) side[x] |= 2;
    partition = std::all_of(side.begin(), side.end(), [](int s) { return s == 1 || s == 2; });
  }
  if (!partition) {
    add("1", false, "V1 and V2 do not partition the vertex set");
    return rep;
  }
  add("1", static_cast<int>(c.V2.size()) == p.v2_size(),
      "|V2| = " + std::to_string(c.V2.size()) + ", required " + std::to_string(p.v2_size()));
  Bitset v1 = G.set_of(c.V1), v2 = G.set_of(c.V2);

  // (2a)
  bool starOk = c.x_star >= 0 && c.x_star < n && in_range(c.S_star) && in_range(c.R_star);
  Bitset S(n), R(n);
  std::string why;
  if (starOk) {
    for (int s : c.S_star) S.set(s);
    for (int r : c.R_star) R.set(r);
    if (static_cast<int>(S.count()) != static_cast<int>(c.S_star.size())) why = "S* has repeated vertices";
    else if (static_cast<int>(c.S_star.size()) != p.s_star_size())
      why = "|S*| = " + std::to_string(c.S_star.size()) + ", required " + std::to_string(p.s_star_size());
    else if (S.intersects(R)) why = "R* and S* intersect";
    else if (!S.is_subset_of(v1) || !R.is_subset_of(v1)) why = "R* or S* leaves V1";
    else if (!S.is_subset_of(G.row(c.x_star))) why = "S* is not inside N(x*)";
  } else {
    why = "star vertices out of range";
  }
  add("2a", why.empty(), why.empty() ? "|S*| = " + std::to_string(c.S_star.size()) : why);
  if (!why.empty()) starOk = false;

  // (2b)
  if (starOk) {
    std::vector<int> pending;
    for (int r : c.R_star)
      if (!G.has_edge(r, c.x_star)) pending.push_back(r);
    auto partners = detail::star_repair_partners(G, c, pending);
    int missing = -1;
    for (std::size_t i = 0; i < pending.size() && missing < 0; ++i)
      if (partners[i] < 0) missing = pending[i];
    bool ok = c.R_star.size() <= 25 && missing < 0;
    add("2b", ok,
        c.R_star.size() > 25 ? "|R*| = " + std::to_string(c.R_star.size())
        : missing >= 0       ? "no distinct S* partner for " + std::to_string(missing)
                             : std::to_string(pending.size()) + " R* vertices matched into S*");
  } else {
    add("2b", false, "star invalid");
  }

  // (2c)
  if (starOk) {
    double need = 2 * p.C0 * logn;
    int worst = -1, worstDeg = n + 1;
    for (int w = 0; w < n; ++w) {
      if (S[w] || R[w]) continue;
      int dw = G.degree_into(w, S);
      if (dw < worstDeg) {
        worstDeg = dw;
        worst = w;
      }
    }
    bool ok = worst < 0 || worstDeg >= need;
    add("2c", ok, "min d(w, S*) = " + std::to_string(worstDeg) + " at w = " + std::to_string(worst) + ", need " +
                      std::to_string(need));
  } else {
    add("2c", false, "star invalid");
  }

  // (3)
  {
    double floor3 = p.alpha * n;
    std::vector<int> lowCount(n, 0), lowWitness(n, -1);
    std::vector<Bitset> inV1(n);
    for (int v = 0; v < n; ++v) inV1[v] = G.row(v) & v1;
    for (int v = 0; v < n; ++v)
      for (int w = v + 1; w < n; ++w)
        if (static_cast<double>((inV1[v] & G.row(w)).count()) < floor3) {
          ++lowCount[v];
          ++lowCount[w];
          lowWitness[v] = w;
          lowWitness[w] = v;
        }
    int worst = static_cast<int>(std::max_element(lowCount.begin(), lowCount.end()) - lowCount.begin());
    bool ok = lowCount[worst] <= logn;
    add("3", ok,
        "vertex " + std::to_string(worst) + " has " + std::to_string(lowCount[worst]) + " low co-degree partners" +
            (lowWitness[worst] >= 0 ? " (e.g. " + std::to_string(lowWitness[worst]) + ")" : "") + ", allowed " +
            std::to_string(logn));
  }

  // (4)
  {
    auto hole = find_bipartite_hole(G, c.V1, p.m(), hole_budget);
    PropertyCheck pc{"4", hole.status, "exact-pruned", "searched " + std::to_string(hole.nodes) + " nodes, m = " +
                                                           std::to_string(p.m())};
    if (hole.status == CheckStatus::fail) pc.detail = "no edge between A = " + detail::list(hole.A) + " and B = " +
                                                     detail::list(hole.B);
    if (hole.status == CheckStatus::unknown) pc.detail = "node budget exhausted";
    rep.items.push_back(pc);
  }

  // (5a)
  const auto& f = c.factor;
  std::string w5;
  if (auto bad = factor_violation(G, f)) w5 = *bad;
  else if (f.size() != p.K * u) w5 = std::to_string(f.size()) + " cliques, required " + std::to_string(p.K * u);
  else if (static_cast<int>(f.bad.size()) != u) w5 = std::to_string(f.bad.size()) + " bad cliques, required " + std::to_string(u);
  else
    for (const auto& k : f.cliques)
      for (int x : k)
        if (!v2[x] && w5.empty()) w5 = "clique vertex " + std::to_string(x) + " outside V2";
  add("5a", w5.empty(), w5.empty() ? std::to_string(f.size()) + " cliques, " + std::to_string(u) + " bad" : w5);
  bool factorOk = w5.empty();

  // (5b)
  if (factorOk) {
    Bitset inGood(n);
    for (int i : f.good())
      for (int x : f.cliques[i]) inGood.set(x);
    int need = 40 * u, worst = -1, worstDeg = n + 1;
    for (int v = 0; v < n; ++v) {
      if (inGood[v]) continue;
      int dv = G.degree_into(v, v2);
      if (dv < worstDeg) {
        worstDeg = dv;
        worst = v;
      }
    }
    add("5b", worst < 0 || worstDeg >= need,
        "min d(v, V2) = " + std::to_string(worstDeg) + " at v = " + std::to_string(worst) + ", need " + std::to_string(need));
  } else {
    add("5b", false, "factor invalid");
  }

  // (5c)
  if (factorOk) {
    Graph H = build_clique_adjacency(G, f);
    auto good = f.good();
    int worst = -1, worstMiss = -1;
    for (int k : good) {
      int miss = static_cast<int>(good.size()) - 1 - H.degree(k);
      if (miss > worstMiss) {
        worstMiss = miss;
        worst = k;
      }
    }
    add("5c", worstMiss <= p.gamma * n,
        "clique " + std::to_string(worst) + " lacks a 3-matching to " + std::to_string(std::max(0, worstMiss)) +
            " good cliques, allowed " + std::to_string(p.gamma * n));
  } else {
    add("5c", false, "factor invalid");
  }
  return rep;
}

struct Synthesis {
  Graph G;
  Certificate cert;
  std::uint64_t seed_used = 0;
  int attempts = 0;
  CertificateReport report;
};

// Test-instance generator: random graph with edge probability p.edge_prob, V1 the
// low ids and V2 the top 5K floor(gamma n) ids, a planted star at x* = 0 with
// S* = 1..|S*| and up to 25 R* vertices at the top of V1 (non-adjacent to x*, each
// given a distinct S* partner), and a planted K5 factor on V2 whose first floor(gamma n) cliques are
// bad; pairs of good cliques lacking a 3-matching get one.  With universal_v1 every
// V1 vertex is joined to every other vertex before the star surgery.  Resamples
// seed, seed+1, ... until the verifier passes.
inline Synthesis synth_certificate_graph(const Params& p, std::uint64_t seed, int budget = 20) {
  p.validate();
  const int n = p.n, u = p.units(), nV2 = p.v2_size(), nV1 = n - nV2, s = p.s_star_size();
  if (u < 1) fail(ErrorCode::synthesis_failed, "floor(gamma n) is zero");
  if (nV2 >= n) fail(ErrorCode::synthesis_failed, "|V2| = " + std::to_string(nV2) + " leaves no room for V1");
  if (1 + s > nV1) fail(ErrorCode::synthesis_failed, "V1 cannot hold x* and S*");
  const int r = p.empty_r_star ? 0 : std::min({25, s, nV1 - 1 - s});
  std::string last;
  for (int attempt = 0; attempt < budget; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::bernoulli_distribution coin(p.edge_prob);
    Graph G(n);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coin(rng) || (p.universal_v1 && a < nV1)) G.add_edge(a, b);
    Certificate c;
    for (int x = 0; x < nV1; ++x) c.V1.push_back(x);
    for (int x = nV1; x < n; ++x) c.V2.push_back(x);
    c.x_star = 0;
    for (int i = 1; i <= s; ++i) {
      c.S_star.push_back(i);
      G.add_edge(0, i);
    }
    for (int i = 0; i < r; ++i) {
      int v = nV1 - r + i;
      c.R_star.push_back(v);
      G.remove_edge(0, v);
      G.add_edge(v, c.S_star[i]);
    }
    for (int i = 0; i < p.K * u; ++i) {
      Clique k;
      for (int a = 0; a < 5; ++a) k[a] = nV1 + 5 * i + a;
      for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) G.add_edge(k[a], k[b]);
      c.factor.cliques.push_back(k);
    }
    for (int i = 0; i < u; ++i) c.factor.bad.push_back(i);
    auto good = c.factor.good();
    for (std::size_t i = 0; i < good.size(); ++i)
      for (std::size_t j = i + 1; j < good.size(); ++j) {
        const auto& A = c.factor.cliques[good[i]];
        const auto& B = c.factor.cliques[good[j]];
        if (clique_matching(G, A, B).size() < 3)
          for (int a = 0; a < 3; ++a) G.add_edge(A[a], B[a]);
      }
    auto rep = verify_certificate(G, c, p);
    if (rep.ok()) return {std::move(G), std::move(c), seed + static_cast<std::uint64_t>(attempt), attempt + 1, rep};
    auto f = *rep.first_failure();
    last = "property (" + f.property + "): " + f.detail;
  }
  fail(ErrorCode::synthesis_failed, "no passing certificate in " + std::to_string(budget) + " attempts; last " + last);
}

// k(u) for the final star matching: the number of leaves of T not yet embedded
// whose neighbour is embedded onto u.
inline std::map<int, int> leaf_budget_map(const Tree& T, const Embedding& g, std::optional<int> expect_total = {},
                                          std::optional<int> d = {}) {
  std::map<int, int> k;
  long total = 0;
  if (T.n() >= 3)
    for (int v = 0; v < T.n(); ++v) {
      if (!T.is_leaf(v) || g.mapped(v)) continue;
      int parent = T.neighbors(v)[0];
      if (!g.mapped(parent)) fail(ErrorCode::accounting_error, "leaf " + std::to_string(v) + " has an unembedded parent");
      ++k[g[parent]];
      ++total;
    }
  if (expect_total && total != *expect_total)
    fail(ErrorCode::accounting_error,
         std::to_string(total) + " pending leaves for " + std::to_string(*expect_total) + " free vertices");
  if (d)
    for (auto [x, cnt] : k)
      if (cnt > *d) fail(ErrorCode::accounting_error, "vertex " + std::to_string(x) + " needs " + std::to_string(cnt) + " leaves");
  return k;
}

struct EmbedOptions {
  std::uint64_t seed = 1;
  bool verify = true;
  ExtendOptions extend{};
};

struct TreeEmbedding {
  Embedding g;
  std::string route;  // "1", "2.1" or "2.2"
  TreeClassification classification;
  std::optional<RoutePlan> plan;
  std::vector<std::pair<int, int>> repaired;  // (w in R*, s_w)
  int star_x = -1;                            // tree vertex placed on x* in Case 2.1
  int u_size = 0, w_size = 0;
  RandomEmbedReport random;
};

namespace detail {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string what = e.what();
    std::string prefix = std::string(to_string(e.code())) + ": ";
    if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
    throw Error(e.code(), name + ": " + what);
  }
}

inline void finish_with_star_matching(const Graph& G, const Tree& T, const Params& p, TreeEmbedding& out) {
  auto& g = out.g;
  std::vector<int> W;
  for (int x = 0; x < G.n(); ++x)
    if (!g.used(x)) W.push_back(x);
  auto k = leaf_budget_map(T, g, static_cast<int>(W.size()), p.d());
  std::vector<int> U;
  for (auto [x, cnt] : k) U.push_back(x);
  out.u_size = static_cast<int>(U.size());
  out.w_size = static_cast<int>(W.size());
  if (U.empty()) return;
  auto sm = star_matching(G, U, W, p.d(), p.m(), k);
  for (auto& [x, targets] : sm) {
    int parent = g.preimage(x);
    std::size_t next = 0;
    for (int leaf : T.neighbors(parent))
      if (T.is_leaf(leaf) && !g.mapped(leaf)) g.set(leaf, targets.at(next++));
  }
}

}  // namespace detail

// Embeds a tree on n vertices into a certified graph following the proof's case
// split: Case 1 routes floor(gamma n) bare paths through the clique factor,
// Case 2.1 anchors a hub of leaf parents at x*, Case 2.2 places the small subtree
// at random.  Every failure carries the stage where it happened.
inline TreeEmbedding embed_tree(const Graph& G, const Certificate& cert, const Params& p, const Tree& T,
                                const EmbedOptions& opt = {}) {
  const int n = T.n(), N = G.n();
  require(n == N, ErrorCode::invalid_parameter,
          "tree has " + std::to_string(n) + " vertices, graph has " + std::to_string(N));
  if (opt.verify) {
    auto rep = verify_certificate(G, cert, p);
    if (auto f = rep.first_failure())
      fail(ErrorCode::precondition_unmet, "certificate property (" + f->property + ") fails: " + f->detail);
  }
  TreeEmbedding out{Embedding(n, N), "", {}, std::nullopt, {}, -1, 0, 0, {}};
  out.classification = detail::stage("classify", [&] { return classify_tree(T, p); });
  const auto& cls = out.classification;
  Bitset v1 = G.set_of(cert.V1);

  if (cls.kind == TreeClassification::Kind::bare_paths) {
    out.route = "1";
    const int u = p.units();
    auto paths = cls.paths;
    require(static_cast<int>(paths.size()) >= u, ErrorCode::accounting_error, "fewer bare paths than floor(gamma n)");
    paths.resize(u);
    std::vector<char> inner(n, 0);
    for (const auto& P : paths)
      for (std::size_t j = 1; j + 1 < P.size(); ++j) inner[P[j]] = 1;
    std::vector<int> id(n, -1), back;
    for (int v = 0; v < n; ++v)
      if (!inner[v]) {
        id[v] = static_cast<int>(back.size());
        back.push_back(v);
      }
    std::vector<Edge> es;
    for (auto [a, b] : T.edges())
      if (!inner[a] && !inner[b]) es.push_back({id[a], id[b]});
    for (const auto& P : paths) es.push_back({id[P.front()], id[P.back()]});
    Tree T1 = Tree::from_edges(static_cast<int>(back.size()), es);
    auto e1 = detail::stage("case 1 / embed T1",
                            [&] { return haxell_extend(G, T1, Embedding(T1.n(), N), v1, opt.extend); });
    for (int i = 0; i < T1.n(); ++i) out.g.set(back[i], e1[i]);
    std::vector<int> R;
    for (int x : cert.V1)
      if (!out.g.used(x)) R.push_back(x);
    require(static_cast<int>(R.size()) == u, ErrorCode::accounting_error,
            std::to_string(R.size()) + " leftover V1 vertices for " + std::to_string(u) + " bare paths");
    out.plan = detail::stage("case 1 / route", [&] { return route_all_bare_paths(G, T, cert.factor, paths, R, out.g); });
  } else {
    std::vector<char> leaf(n, 0), inT1(n, 0), inT2(n, 0);
    for (int v : T.leaves()) leaf[v] = 1;
    for (int v = 0; v < n; ++v) inT2[v] = !leaf[v];
    std::vector<int> T1;
    for (int v : cls.subtree)
      if (!leaf[v]) {
        inT1[v] = 1;
        T1.push_back(v);
      }
    std::vector<char> inN1(n, 0);
    for (int v : cls.n1) inN1[v] = 1;
    int x = -1, best = -1;
    for (int v : T1) {
      int cnt = 0;
      for (int w : T.neighbors(v)) cnt += inN1[w];
      if (cnt > best) {
        best = cnt;
        x = v;
      }
    }
    const double logn = std::log(static_cast<double>(n));
    if (best >= 0.5 * p.C1() * logn) {
      out.route = "2.1";
      out.star_x = x;
      detail::stage("case 2.1 / anchor", [&] {
        auto& g = out.g;
        g.set(x, cert.x_star);
        std::vector<int> nx;
        for (int w : T.neighbors(x))
          if (inN1[w]) nx.push_back(w);
        std::vector<int> required = cert.S_star;
        for (int r : cert.R_star)
          if (G.has_edge(r, cert.x_star)) required.push_back(r);
        std::sort(required.begin(), required.end());
        if (nx.size() < required.size())
          fail(ErrorCode::precondition_unmet, std::to_string(nx.size()) + " leaf parents at the hub for " +
                                                  std::to_string(required.size()) + " star vertices");
        Bitset pool = (G.row(cert.x_star) & v1);
        for (int r : required) pool.reset(r);
        auto free = bits_to_vector(pool);
        for (std::size_t i = 0; i < nx.size(); ++i) {
          if (i < required.size()) g.set(nx[i], required[i]);
          else if (i - required.size() < free.size()) g.set(nx[i], free[i - required.size()]);
          else fail(ErrorCode::greedy_stuck, "N(x*) cap V1 too small for the hub's leaf parents");
        }
        g = greedy_embed_rest(G, T, g, v1, &inT1);
        return 0;
      });
      out.g = detail::stage("case 2.1 / extend to T2",
                            [&] { return haxell_extend(G, T, out.g, v1, opt.extend, &inT2); });
      detail::stage("case 2.1 / R* repair", [&] {
        std::vector<int> pending;
        for (int r : cert.R_star)
          if (!out.g.used(r)) {
            if (G.has_edge(r, cert.x_star)) fail(ErrorCode::accounting_error, "R* vertex in N(x*) left unused");
            pending.push_back(r);
          }
        auto partners = detail::star_repair_partners(G, cert, pending);
        for (std::size_t i = 0; i < pending.size(); ++i) {
          int sw = partners[i];
          if (sw < 0) fail(ErrorCode::accounting_error, "no S* partner for " + std::to_string(pending[i]));
          int a = out.g.preimage(sw);
          int leafAt = -1;
          for (int z : T.neighbors(a))
            if (leaf[z] && !out.g.mapped(z)) {
              leafAt = z;
              break;
            }
          if (leafAt < 0) fail(ErrorCode::accounting_error, "no pending leaf at the preimage of " + std::to_string(sw));
          out.g.set(leafAt, pending[i]);
          out.repaired.push_back({pending[i], sw});
        }
        return 0;
      });
    } else {
      out.route = "2.2";
      out.g = detail::stage("case 2.2 / random T1", [&] {
        return random_embed_subtree(G, T, T1, v1, cls.n1, p.alpha, p.C0, opt.seed, 50, &out.random);
      });
      out.g = detail::stage("case 2.2 / extend to T2",
                            [&] { return haxell_extend(G, T, out.g, v1, opt.extend, &inT2); });
    }
    detail::stage("case " + out.route + " / star matching", [&] {
      detail::finish_with_star_matching(G, T, p, out);
      return 0;
    });
  }
  if (auto bad = embedding_violation(G, T, out.g, true)) fail(ErrorCode::accounting_error, "final embedding: " + *bad);
  return out;
}

}  // namespace posgames
