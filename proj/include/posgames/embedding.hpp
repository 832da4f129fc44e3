#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"
#include "posgames/flow.hpp"
#include "posgames/graph.hpp"
#include "posgames/tree.hpp"

namespace posgames {

// Partial injective map V(T) -> V(G).
class Embedding {
 public:
  Embedding() = default;
  Embedding(int tree_n, int graph_n) : map_(tree_n, -1), used_(graph_n), owner_(graph_n, -1) {}

  int tree_size() const { return static_cast<int>(map_.size()); }
  int graph_size() const { return static_cast<int>(used_.size()); }
  int operator[](int v) const { return map_[v]; }
  bool mapped(int v) const { return map_[v] >= 0; }
  bool used(int x) const { return used_[x]; }
  int preimage(int x) const { return owner_[x]; }
  const Bitset& image() const { return used_; }
  int size() const { return static_cast<int>(used_.count()); }
  const std::vector<int>& map() const { return map_; }

  void set(int v, int x) {
    require(map_[v] < 0, ErrorCode::accounting_error, "tree vertex already embedded");
    require(!used_[x], ErrorCode::accounting_error, "graph vertex already used");
    map_[v] = x;
    used_[x] = true;
    owner_[x] = v;
  }

  void unset(int v) {
    if (map_[v] < 0) return;
    used_[map_[v]] = false;
    owner_[map_[v]] = -1;
    map_[v] = -1;
  }

  void move(int v, int x) {
    unset(v);
    set(v, x);
  }

 private:
  std::vector<int> map_;
  Bitset used_;
  std::vector<int> owner_;
};

inline nlohmann::json embedding_to_json(const Embedding& g) {
  nlohmann::json out = nlohmann::json::array();
  for (int x : g.map()) out.push_back(x < 0 ? nlohmann::json(nullptr) : nlohmann::json(x));
  return out;
}

inline Embedding embedding_from_json(const nlohmann::json& j, int graph_n) {
  try {
    require(j.is_array(), ErrorCode::parse_error, "embedding must be an array");
    Embedding g(static_cast<int>(j.size()), graph_n);
    for (int v = 0; v < static_cast<int>(j.size()); ++v)
      if (!j[v].is_null()) {
        int x = j[v].get<int>();
        require(x >= 0 && x < graph_n, ErrorCode::parse_error, "embedding image out of range");
        g.set(v, x);
      }
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("bad embedding: ") + e.what());
  }
}

// Structural check: injective, every T-edge with both ends mapped lands on a
// G-edge, and (if total) every vertex mapped.  Returns a description of the
// first violation.
inline std::optional<std::string> embedding_violation(const Graph& G, const Tree& T, const Embedding& g, bool total) {
  if (g.tree_size() != T.n() || g.graph_size() != G.n()) return "embedding dimensions do not match";
  std::vector<int> seen(G.n(), -1);
  for (int v = 0; v < T.n(); ++v) {
    if (!g.mapped(v)) {
      if (total) return "tree vertex " + std::to_string(v) + " unmapped";
      continue;
    }
    int x = g[v];
    if (seen[x] >= 0) return "graph vertex " + std::to_string(x) + " used twice";
    seen[x] = v;
  }
  for (auto [u, v] : T.edges())
    if (g.mapped(u) && g.mapped(v) && !G.has_edge(g[u], g[v]))
      return "tree edge " + std::to_string(u) + "-" + std::to_string(v) + " not preserved";
  return std::nullopt;
}

struct ExpansionSpec {
  int d = 1;
  int k = 1;
  Bitset region;
  Bitset reserved;
  // If set: any two disjoint region sets of this size are joined by an edge
  // (property (4) with m = this value, verified elsewhere).
  std::optional<int> disjoint_edge_bound;
};

enum class CheckStatus { pass, fail, unknown };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::unknown: return "unknown";
  }
  return "?";
}

struct ExpansionReport {
  std::string mode;  // "exhaustive" or "sufficient"
  CheckStatus p1 = CheckStatus::unknown, p2 = CheckStatus::unknown;
  std::vector<int> p1_witness, p2_witness;
};

namespace detail {

inline void for_each_subset(const std::vector<int>& pool, int max_size, const std::function<bool(const std::vector<int>&)>& f) {
  std::vector<int> cur;
  std::function<bool(std::size_t)> rec = [&](std::size_t from) {
    if (!cur.empty() && !f(cur)) return false;
    if (static_cast<int>(cur.size()) == max_size) return true;
    for (std::size_t i = from; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      if (!rec(i + 1)) return false;
      cur.pop_back();
    }
    return true;
  };
  rec(0);
}

inline double subset_count(int n, int k) {
  double total = 0, c = 1;
  for (int i = 1; i <= k && i <= n; ++i) {
    c = c * (n - i + 1) / i;
    total += c;
  }
  return total;
}

}  // namespace detail

// (P1) |N(X) cap region \ reserved| >= d|X| + 1 for X in region, 1 <= |X| <= 2k.
// (P2) |N(X) cap region| >= d|X| + target for X in region, k < |X| <= 2k.
// Exhaustive when k <= 3 or |region| <= 24 and the subset count stays below
// `exhaustive_budget`; otherwise sufficient degree conditions plus sampling.
inline ExpansionReport check_expansion(const Graph& G, const ExpansionSpec& spec, int target, std::uint64_t seed = 1,
                                       double exhaustive_budget = 5e6, int samples = 2000) {
  require(spec.k >= 1, ErrorCode::invalid_parameter, "expansion threshold k must be positive");
  ExpansionReport rep;
  Bitset region = spec.region;
  Bitset avail = region - spec.reserved;
  auto pool = bits_to_vector(region);
  int R = static_cast<int>(pool.size());
  int d = spec.d, k = spec.k;
  auto nbhd = [&](const std::vector<int>& X) {
    Bitset u(G.n());
    for (int x : X) u |= G.row(x);
    return u;
  };
  auto p1_ok = [&](const std::vector<int>& X) {
    return static_cast<int>((nbhd(X) & avail).count()) >= d * static_cast<int>(X.size()) + 1;
  };
  auto p2_ok = [&](const std::vector<int>& X) {
    return static_cast<int>((nbhd(X) & region).count()) >= d * static_cast<int>(X.size()) + target;
  };
  bool exhaustive = (k <= 3 || R <= 24) && detail::subset_count(R, 2 * k) <= exhaustive_budget;
  if (exhaustive) {
    rep.mode = "exhaustive";
    rep.p1 = rep.p2 = CheckStatus::pass;
    detail::for_each_subset(pool, 2 * k, [&](const std::vector<int>& X) {
      if (rep.p1 == CheckStatus::pass && !p1_ok(X)) {
        rep.p1 = CheckStatus::fail;
        rep.p1_witness = X;
      }
      if (rep.p2 == CheckStatus::pass && static_cast<int>(X.size()) > k && !p2_ok(X)) {
        rep.p2 = CheckStatus::fail;
        rep.p2_witness = X;
      }
      return rep.p1 == CheckStatus::pass || rep.p2 == CheckStatus::pass;
    });
    if (R == 0) rep.p1 = rep.p2 = CheckStatus::pass;
    return rep;
  }
  rep.mode = "sufficient";
  // Single vertices are exact witnesses for (P1).
  int minAvail = std::numeric_limits<int>::max(), maxNon = 0;
  for (int x : pool) {
    int a = static_cast<int>((G.row(x) & avail).count());
    if (a < d + 1 && rep.p1 != CheckStatus::fail) {
      rep.p1 = CheckStatus::fail;
      rep.p1_witness = {x};
    }
    minAvail = std::min(minAvail, a);
    Bitset non = region - G.row(x);
    non.reset(x);
    maxNon = std::max(maxNon, static_cast<int>(non.count()));
  }
  if (rep.p1 != CheckStatus::fail && minAvail >= 2 * k * d + 1) rep.p1 = CheckStatus::pass;
  // (P2) is impossible once d(k+1) + target exceeds the region.
  if (R > k && d * (k + 1) + target > R) {
    rep.p2 = CheckStatus::fail;
    rep.p2_witness.assign(pool.begin(), pool.begin() + (k + 1));
  } else if (R > k) {
    // |N(X) cap region| >= R - |X| - |Z(X)|, Z(X) the common non-neighbours.
    int zBound = maxNon;
    if (spec.disjoint_edge_bound && *spec.disjoint_edge_bound <= k + 1) zBound = std::min(zBound, *spec.disjoint_edge_bound - 1);
    bool ok = true;
    for (int s = k + 1; s <= 2 * k; ++s) ok = ok && R - s - zBound >= d * s + target;
    if (ok) rep.p2 = CheckStatus::pass;
  } else {
    rep.p2 = CheckStatus::pass;
  }
  std::mt19937_64 rng(seed);
  for (int it = 0; it < samples && R > 0 && (rep.p1 == CheckStatus::unknown || rep.p2 == CheckStatus::unknown); ++it) {
    int s = 1 + static_cast<int>(rng() % std::min(2 * k, R));
    std::vector<int> X = pool;
    for (int i = 0; i < s; ++i) std::swap(X[i], X[i + rng() % (R - i)]);
    X.resize(s);
    std::sort(X.begin(), X.end());
    if (rep.p1 == CheckStatus::unknown && !p1_ok(X)) {
      rep.p1 = CheckStatus::fail;
      rep.p1_witness = X;
    }
    if (rep.p2 == CheckStatus::unknown && s > k && !p2_ok(X)) {
      rep.p2 = CheckStatus::fail;
      rep.p2_witness = X;
    }
  }
  return rep;
}

// Assignment of k(u) distinct vertices of W to each u in U, each inside N(u),
// by max-flow.  Returns nullopt when infeasible.  Sum of k need not equal |W|.
inline std::optional<std::map<int, std::vector<int>>> b_matching(const Graph& G, const std::vector<int>& U,
                                                                  const std::map<int, int>& k, const std::vector<int>& W) {
  int nu = static_cast<int>(U.size()), nw = static_cast<int>(W.size());
  int source = nu + nw, sink = source + 1;
  MaxFlow f(sink + 1);
  long want = 0;
  for (int i = 0; i < nu; ++i) {
    int need = k.count(U[i]) ? k.at(U[i]) : 0;
    want += need;
    f.add_arc(source, i, need);
  }
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nw; ++j)
      if (G.has_edge(U[i], W[j])) arcs.push_back({f.add_arc(i, nu + j, 1), i * nw + j});
  for (int j = 0; j < nw; ++j) f.add_arc(nu + j, sink, 1);
  if (f.run(source, sink) != want) return std::nullopt;
  std::map<int, std::vector<int>> out;
  for (int u : U) out[u];
  for (auto [arc, code] : arcs)
    if (f.flow(arc) > 0) out[U[code / nw]].push_back(W[code % nw]);
  return out;
}

// Star matching: partition W into sets W_u of size k(u) inside N(u).
inline std::map<int, std::vector<int>> star_matching(const Graph& G, const std::vector<int>& U, const std::vector<int>& W,
                                                     int d, int m, const std::map<int, int>& k) {
  (void)m;
  long total = 0;
  for (int u : U) {
    int ku = k.count(u) ? k.at(u) : 0;
    require(ku >= 1 && ku <= d, ErrorCode::invalid_parameter, "k(u) must lie in [1, d]");
    total += ku;
  }
  require(total == static_cast<long>(W.size()), ErrorCode::invalid_parameter, "sum of k(u) must equal |W|");
  Bitset inU(G.n());
  for (int u : U) inU.set(u);
  for (int w : W) require(!inU[w], ErrorCode::invalid_parameter, "U and W must be disjoint");
  auto r = b_matching(G, U, k, W);
  if (!r) fail(ErrorCode::no_star_matching, "no star matching exists for the given budgets");
  return *r;
}

struct ExtendOptions {
  int repair_depth = 3;
  int restarts = 20;
  std::uint64_t seed = 0;
};

struct ExtendStats {
  int attempts = 0;
  int repairs = 0;
};

namespace detail {

class Extender {
 public:
  Extender(const Graph& G, const Tree& T, const Bitset& region, const std::vector<char>& in, const std::vector<char>& fixed,
           int depth)
      : G_(G), T_(T), region_(region), in_(in), fixed_(fixed), depth_(depth) {}

  // Tries to free graph vertex y (adjacent to what the caller needs) by moving
  // its tree vertex elsewhere along a chain of at most depth_ relocations.
  bool free_vertex(Embedding& g, int y, int depth, Bitset& tried, int& repairs) {
    int u = g.preimage(y);
    if (u < 0) return true;
    if (fixed_[u]) return false;
    Bitset cand = region_;
    for (int w : T_.neighbors(u))
      if (in_[w] && g.mapped(w)) cand &= G_.row(g[w]);
    cand.reset(y);
    Bitset freeCand = cand - g.image();
    auto z = freeCand.find_first();
    if (z != Bitset::npos) {
      g.move(u, static_cast<int>(z));
      ++repairs;
      return true;
    }
    if (depth == 0) return false;
    tried.set(y);
    Bitset occupied = (cand & g.image()) - tried;
    for (auto y2 = occupied.find_first(); y2 != Bitset::npos; y2 = occupied.find_next(y2)) {
      int u2 = g.preimage(static_cast<int>(y2));
      if (std::binary_search(T_.neighbors(u).begin(), T_.neighbors(u).end(), u2)) continue;
      if (free_vertex(g, static_cast<int>(y2), depth - 1, tried, repairs)) {
        g.move(u, static_cast<int>(y2));
        ++repairs;
        return true;
      }
    }
    return false;
  }

 private:
  const Graph& G_;
  const Tree& T_;
  const Bitset& region_;
  const std::vector<char>& in_;
  const std::vector<char>& fixed_;
  int depth_;
};

}  // namespace detail

// Extends g (an embedding of a subtree S of T[within]) to all of T[within]
// inside `region`.  Non-leaves are placed in BFS order from S: a vertex with
// children still to come takes the free neighbour of its parent's image with
// the most free region neighbours, a vertex without takes the one with the
// fewest.  When a parent image has no free neighbour, a chain of relocations
// of already placed vertices (outside S) is searched.  Leaves are placed last
// by a b-matching flow.  Failed attempts restart with randomised tie-breaking.
inline Embedding haxell_extend(const Graph& G, const Tree& T, const Embedding& g0, const Bitset& region,
                               const ExtendOptions& opt = {}, const std::vector<char>* within = nullptr,
                               ExtendStats* stats = nullptr) {
  int n = T.n();
  std::vector<char> in = within ? *within : std::vector<char>(n, 1);
  std::vector<char> fixed(n, 0);
  int nIn = 0;
  for (int v = 0; v < n; ++v) {
    nIn += in[v];
    if (g0.mapped(v)) {
      require(in[v], ErrorCode::invalid_configuration, "embedded vertex outside the target subtree");
      require(region[g0[v]], ErrorCode::invalid_configuration, "embedded vertex outside the region");
      fixed[v] = 1;
    }
  }
  if (auto bad = embedding_violation(G, T, g0, false)) fail(ErrorCode::invalid_configuration, "initial embedding: " + *bad);
  std::vector<int> degIn(n, 0);
  for (int v = 0; v < n; ++v)
    if (in[v])
      for (int w : T.neighbors(v)) degIn[v] += in[w];
  std::vector<char> core(n, 0), leafTarget(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!in[v]) continue;
    leafTarget[v] = nIn >= 3 && degIn[v] == 1 && !g0.mapped(v);
    core[v] = !leafTarget[v];
  }
  std::vector<int> sources;
  for (int v = 0; v < n; ++v)
    if (core[v] && g0.mapped(v)) sources.push_back(v);
  int root = -1;
  if (sources.empty()) {
    root = core[T.root()] ? T.root() : static_cast<int>(std::find(core.begin(), core.end(), 1) - core.begin());
    if (root >= n) return g0;
    sources.push_back(root);
  }
  std::vector<int> order, parent(n, -1);
  std::vector<char> seen(n, 0);
  for (int s : sources) {
    seen[s] = 1;
    order.push_back(s);
  }
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : T.neighbors(order[i]))
      if (core[w] && !seen[w]) {
        seen[w] = 1;
        parent[w] = order[i];
        order.push_back(w);
      }
  for (int v = 0; v < n; ++v)
    require(!core[v] || seen[v], ErrorCode::invalid_configuration, "target vertices do not form a connected subtree");

  std::vector<int> stuck;
  int repairs = 0;
  for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
    std::mt19937_64 rng(opt.seed * 1000003ULL + attempt);
    Embedding g = g0;
    detail::Extender ext(G, T, region, in, fixed, opt.repair_depth);
    auto freeRegion = [&] { return region - g.image(); };
    auto pendingChildren = [&](int v) {
      int c = 0;
      for (int w : T.neighbors(v)) c += in[w] && !g.mapped(w) && w != parent[v];
      return c;
    };
    bool ok = true;
    for (int v : order) {
      if (g.mapped(v)) continue;
      Bitset cand = freeRegion();
      if (parent[v] >= 0) cand &= G.row(g[parent[v]]);
      if (cand.none() && parent[v] >= 0) {
        Bitset tried(G.n());
        Bitset occupied = (G.row(g[parent[v]]) & region & g.image());
        for (auto y = occupied.find_first(); y != Bitset::npos; y = occupied.find_next(y)) {
          if (g.preimage(static_cast<int>(y)) == parent[v]) continue;
          Embedding trial = g;
          if (ext.free_vertex(trial, static_cast<int>(y), opt.repair_depth, tried, repairs) &&
              trial[parent[v]] == g[parent[v]] && !embedding_violation(G, T, trial, false)) {
            g = trial;
            break;
          }
        }
        cand = freeRegion() & G.row(g[parent[v]]);
      }
      if (cand.none()) {
        ok = false;
        stuck = {v};
        break;
      }
      bool wantsRoom = pendingChildren(v) > 0;
      int best = -1;
      double bestScore = 0;
      Bitset fr = freeRegion();
      for (auto x = cand.find_first(); x != Bitset::npos; x = cand.find_next(x)) {
        double s = static_cast<double>((G.row(x) & fr).count());
        if (!wantsRoom) s = -s;
        if (attempt > 0) s += std::uniform_real_distribution<double>(0, 3)(rng);
        if (best < 0 || s > bestScore) {
          best = static_cast<int>(x);
          bestScore = s;
        }
      }
      g.set(v, best);
    }
    if (ok) {
      std::vector<int> U;
      std::map<int, int> k;
      for (int v = 0; v < n; ++v)
        if (leafTarget[v]) {
          int p = -1;
          for (int w : T.neighbors(v))
            if (in[w]) p = w;
          if (k[g[p]]++ == 0) U.push_back(g[p]);
        }
      if (!U.empty()) {
        std::sort(U.begin(), U.end());
        auto W = bits_to_vector(freeRegion());
        auto match = b_matching(G, U, k, W);
        if (!match) {
          ok = false;
          stuck.clear();
          for (int v = 0; v < n; ++v)
            if (leafTarget[v]) stuck.push_back(v);
        } else {
          for (int v = 0; v < n; ++v)
            if (leafTarget[v]) {
              int p = -1;
              for (int w : T.neighbors(v))
                if (in[w]) p = w;
              auto& pool = (*match)[g[p]];
              g.set(v, pool.back());
              pool.pop_back();
            }
        }
      }
    }
    if (ok) {
      if (stats) {
        stats->attempts = attempt + 1;
        stats->repairs = repairs;
      }
      return g;
    }
  }
  std::string w;
  for (std::size_t i = 0; i < stuck.size() && i < 10; ++i) w += (i ? "," : "") + std::to_string(stuck[i]);
  fail(ErrorCode::extension_failed, "extension failed after " + std::to_string(opt.restarts + 1) + " attempts; stuck at {" + w + "}");
}

// Embeds every vertex of T[within] not yet embedded, in BFS order from the
// embedded part, onto the lowest-id free region neighbour of its parent.
inline Embedding greedy_embed_rest(const Graph& G, const Tree& T, const Embedding& g0, const Bitset& region,
                                   const std::vector<char>* within = nullptr) {
  int n = T.n();
  std::vector<char> in = within ? *within : std::vector<char>(n, 1);
  Embedding g = g0;
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int v = 0; v < n; ++v)
    if (in[v] && g.mapped(v)) {
      seen[v] = 1;
      order.push_back(v);
    }
  require(!order.empty(), ErrorCode::invalid_configuration, "greedy embedding needs an embedded prefix");
  for (std::size_t i = 0; i < order.size(); ++i) {
    int u = order[i];
    for (int v : T.neighbors(u)) {
      if (!in[v] || seen[v]) continue;
      seen[v] = 1;
      order.push_back(v);
      Bitset cand = (G.row(g[u]) & region) - g.image();
      auto x = cand.find_first();
      if (x == Bitset::npos) fail(ErrorCode::greedy_stuck, "no free neighbour for tree vertex " + std::to_string(v));
      g.set(v, static_cast<int>(x));
    }
  }
  return g;
}

struct RandomEmbedReport {
  int attempts = 0;
  bool b_ok = false;
  bool d_ok = false;
  int d_min = 0;             // min over w outside the image of d_G(w, g(N1))
  int d_witness = -1;
  int b_witness = -1;
  std::uint64_t seed_used = 0;
};

// Random embedding of T[subtree] into `region` in BFS order (v_i uniform among
// free region neighbours of g(v_i^-)), resampled until
//   (B) every w in V(G) has at most one bad vertex among the parents of N1,
//       where v is bad for w if |N(g(v)) cap N(w) cap region| < alpha n, and
//   (D) every w outside the image has d_G(w, g(N1)) >= 2 C0 log n.
inline Embedding random_embed_subtree(const Graph& G, const Tree& T, const std::vector<int>& subtree, const Bitset& region,
                                      const std::vector<int>& N1, double alpha, double C0, std::uint64_t seed,
                                      int budget = 50, RandomEmbedReport* report = nullptr) {
  int n = T.n(), N = G.n();
  require(!subtree.empty(), ErrorCode::invalid_parameter, "empty subtree");
  std::vector<char> in(n, 0);
  for (int v : subtree) in[v] = 1;
  int first = *std::min_element(subtree.begin(), subtree.end());
  std::vector<int> order{first}, parent(n, -1);
  std::vector<char> seen(n, 0);
  seen[first] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : T.neighbors(order[i]))
      if (in[w] && !seen[w]) {
        seen[w] = 1;
        parent[w] = order[i];
        order.push_back(w);
      }
  require(order.size() == subtree.size(), ErrorCode::invalid_configuration, "subtree is not connected");
  std::vector<int> P1;
  for (int v : N1)
    if (parent[v] >= 0) P1.push_back(parent[v]);
  std::sort(P1.begin(), P1.end());
  P1.erase(std::unique(P1.begin(), P1.end()), P1.end());
  double badBelow = alpha * N;
  double dNeed = 2 * C0 * std::log(static_cast<double>(N));

  RandomEmbedReport rep;
  std::string last = "no attempt";
  for (int attempt = 0; attempt < budget; ++attempt) {
    std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    std::mt19937_64 rng(s);
    Embedding g(n, N);
    bool placed = true;
    for (int v : order) {
      Bitset cand = region - g.image();
      if (parent[v] >= 0) cand &= G.row(g[parent[v]]);
      auto pool = bits_to_vector(cand);
      if (pool.empty()) {
        placed = false;
        last = "no candidate for tree vertex " + std::to_string(v);
        break;
      }
      g.set(v, pool[rng() % pool.size()]);
    }
    rep.attempts = attempt + 1;
    if (!placed) continue;
    // (B)
    rep.b_ok = true;
    rep.b_witness = -1;
    for (int w = 0; w < N && rep.b_ok; ++w) {
      int bad = 0;
      Bitset nw = G.row(w) & region;
      for (int p : P1)
        if (static_cast<double>((G.row(g[p]) & nw).count()) < badBelow) ++bad;
      if (bad > 1) {
        rep.b_ok = false;
        rep.b_witness = w;
      }
    }
    // (D)
    Bitset img(N);
    for (int v : N1) img.set(g[v]);
    rep.d_ok = true;
    rep.d_min = std::numeric_limits<int>::max();
    rep.d_witness = -1;
    for (int w = 0; w < N; ++w) {
      if (g.used(w)) continue;
      int dw = static_cast<int>((G.row(w) & img).count());
      if (dw < rep.d_min) {
        rep.d_min = dw;
        if (dw < dNeed) rep.d_witness = w;
      }
      if (dw < dNeed) rep.d_ok = false;
    }
    if (rep.b_ok && rep.d_ok) {
      rep.seed_used = s;
      if (report) *report = rep;
      return g;
    }
    last = !rep.b_ok ? "(B) failed for w = " + std::to_string(rep.b_witness)
                     : "(D) failed for w = " + std::to_string(rep.d_witness) + " with degree " + std::to_string(rep.d_min);
  }
  if (report) *report = rep;
  fail(ErrorCode::randomized_embedding_failed, "random embedding failed after " + std::to_string(budget) + " seeds: " + last);
}

}  // namespace posgames
