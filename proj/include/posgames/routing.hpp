#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/embedding.hpp"
#include "posgames/error.hpp"
#include "posgames/graph.hpp"
#include "posgames/matching.hpp"
#include "posgames/tree.hpp"

namespace posgames {

using Clique = std::array<int, 5>;

// Vertex-disjoint K5 copies; bad lists indices into cliques.
struct CliqueFactor {
  std::vector<Clique> cliques;
  std::vector<int> bad;

  int size() const { return static_cast<int>(cliques.size()); }

  std::vector<char> bad_mask() const {
    std::vector<char> m(cliques.size(), 0);
    for (int b : bad) m[b] = 1;
    return m;
  }

  std::vector<int> good() const {
    auto m = bad_mask();
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (!m[i]) out.push_back(i);
    return out;
  }
};

inline std::optional<std::string> factor_violation(const Graph& G, const CliqueFactor& f) {
  std::vector<char> seen(G.n(), 0);
  for (int i = 0; i < f.size(); ++i) {
    const auto& c = f.cliques[i];
    for (int a = 0; a < 5; ++a) {
      if (c[a] < 0 || c[a] >= G.n()) return "clique " + std::to_string(i) + " has an out-of-range vertex";
      if (seen[c[a]]) return "vertex " + std::to_string(c[a]) + " lies in two cliques";
      seen[c[a]] = 1;
      for (int b = a + 1; b < 5; ++b)
        if (!G.has_edge(c[a], c[b])) return "clique " + std::to_string(i) + " is not complete";
    }
  }
  std::set<int> bad;
  for (int b : f.bad) {
    if (b < 0 || b >= f.size()) return "bad clique index " + std::to_string(b) + " out of range";
    if (!bad.insert(b).second) return "bad clique index " + std::to_string(b) + " repeated";
  }
  return std::nullopt;
}

inline nlohmann::json factor_to_json(const CliqueFactor& f) {
  return {{"cliques", f.cliques}, {"bad", f.bad}};
}

inline CliqueFactor factor_from_json(const nlohmann::json& j) {
  try {
    CliqueFactor f;
    f.cliques = j.at("cliques").get<std::vector<Clique>>();
    f.bad = j.at("bad").get<std::vector<int>>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("clique factor: ") + e.what());
  }
}

// Maximum matching between the vertex sets of two disjoint cliques, as (a, b) pairs.
inline std::vector<Edge> clique_matching(const Graph& G, const Clique& A, const Clique& B) {
  std::vector<Edge> es;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (G.has_edge(A[i], B[j])) es.push_back({i, 5 + j});
  auto mate = max_matching(10, es);
  std::vector<Edge> out;
  for (int i = 0; i < 5; ++i)
    if (mate[i] >= 0) out.push_back({A[i], B[mate[i] - 5]});
  return out;
}

// Graph on all clique indices; K ~ K' iff both are good and G has a matching of
// size 3 between them.
inline Graph build_clique_adjacency(const Graph& G, const CliqueFactor& f) {
  Graph H(f.size());
  auto good = f.good();
  for (std::size_t i = 0; i < good.size(); ++i)
    for (std::size_t j = i + 1; j < good.size(); ++j)
      if (clique_matching(G, f.cliques[good[i]], f.cliques[good[j]]).size() >= 3) H.add_edge(good[i], good[j]);
  return H;
}

inline bool is_hamilton_cycle(const Graph& H, const std::vector<int>& cycle) {
  if (static_cast<int>(cycle.size()) != H.n() || H.n() < 3) return false;
  std::vector<char> seen(H.n(), 0);
  for (int v : cycle) {
    if (v < 0 || v >= H.n() || seen[v]) return false;
    seen[v] = 1;
  }
  for (std::size_t i = 0; i < cycle.size(); ++i)
    if (!H.has_edge(cycle[i], cycle[(i + 1) % cycle.size()])) return false;
  return true;
}

// Rotation-extension construction of a Hamilton cycle under Dirac's condition.
inline std::vector<int> dirac_hamilton_cycle(const Graph& H) {
  int n = H.n();
  if (n < 3) fail(ErrorCode::dirac_unmet, "need at least 3 vertices, got " + std::to_string(n));
  if (2 * H.min_degree() < n)
    fail(ErrorCode::dirac_unmet,
         "minimum degree " + std::to_string(H.min_degree()) + " below half of " + std::to_string(n));
  std::vector<int> path{0};
  Bitset on(n);
  on.set(0);
  auto free_neighbor = [&](int v) {
    Bitset off = H.row(v) - on;
    auto i = off.find_first();
    return i == Bitset::npos ? -1 : static_cast<int>(i);
  };
  while (true) {
    if (int u = free_neighbor(path.back()); u >= 0) {
      path.push_back(u);
      on.set(u);
      continue;
    }
    if (int u = free_neighbor(path.front()); u >= 0) {
      path.insert(path.begin(), u);
      on.set(u);
      continue;
    }
    // Both ends saturated on the path: close it into a cycle.
    int k = static_cast<int>(path.size());
    std::vector<int> cycle;
    if (H.has_edge(path.front(), path.back())) {
      cycle = path;
    } else {
      for (int i = 0; i + 1 < k - 1 && cycle.empty(); ++i) {
        if (H.has_edge(path.front(), path[i + 1]) && H.has_edge(path.back(), path[i])) {
          cycle.assign(path.begin(), path.begin() + i + 1);
          for (int j = k - 1; j > i; --j) cycle.push_back(path[j]);
        }
      }
      if (cycle.empty()) fail(ErrorCode::dirac_unmet, "no crossing pair while closing the path");
    }
    if (k == n) {
      if (!is_hamilton_cycle(H, cycle)) fail(ErrorCode::dirac_unmet, "constructed cycle failed verification");
      return cycle;
    }
    // Open the cycle at a vertex with an outside neighbour.
    bool opened = false;
    for (int i = 0; i < k && !opened; ++i) {
      int u = free_neighbor(cycle[i]);
      if (u < 0) continue;
      path.clear();
      path.push_back(u);
      for (int j = 0; j < k; ++j) path.push_back(cycle[(i + j) % k]);
      std::reverse(path.begin(), path.end());
      on.set(u);
      opened = true;
    }
    if (!opened) fail(ErrorCode::dirac_unmet, "graph is disconnected");
  }
}

inline std::vector<std::vector<int>> split_cycle_into_paths(const std::vector<int>& cycle, int q) {
  if (q <= 0 || cycle.size() % q != 0)
    fail(ErrorCode::bad_split, "cycle of length " + std::to_string(cycle.size()) + " cannot be cut into " +
                                   std::to_string(q) + "-vertex paths");
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < cycle.size(); i += q) out.emplace_back(cycle.begin() + i, cycle.begin() + i + q);
  return out;
}

// Perfect matching of the bipartite graph F (adj[a] lists B indices); returns
// matchA.  Throws hall-violation naming a deficient set of A vertices.
inline std::vector<int> match_pairs_to_paths(const std::vector<std::vector<int>>& adj, int nb) {
  if (static_cast<int>(adj.size()) != nb)
    fail(ErrorCode::invalid_parameter,
         "sides differ: " + std::to_string(adj.size()) + " pairs, " + std::to_string(nb) + " paths");
  auto m = bipartite_matching(adj, nb);
  auto w = hall_witness(adj, m, nb);
  if (!w.empty()) fail(ErrorCode::hall_violation, "witness " + nlohmann::json(w).dump());
  return m;
}

// Simple path through every vertex of the clique sequence, starting at first
// (in seq.front()) and ending at last (in seq.back()).  Consecutive cliques must be
// joined by matchings of size 3.
inline std::vector<int> assemble_connector(const Graph& G, const std::vector<Clique>& seq, int first, int last) {
  int k = static_cast<int>(seq.size());
  require(k >= 2, ErrorCode::invalid_parameter, "connector needs at least two cliques");
  auto contains = [](const Clique& c, int v) { return std::find(c.begin(), c.end(), v) != c.end(); };
  require(contains(seq.front(), first) && contains(seq.back(), last), ErrorCode::invalid_parameter,
          "connector endpoints must lie in the end cliques");
  std::vector<int> entry(k), exit(k);
  entry[0] = first;
  exit[k - 1] = last;
  for (int j = 0; j + 1 < k; ++j) {
    auto m = clique_matching(G, seq[j], seq[j + 1]);
    if (m.size() < 3)
      fail(ErrorCode::connector_failed, "cliques " + std::to_string(j) + " and " + std::to_string(j + 1) +
                                            " are joined by a matching of size " + std::to_string(m.size()));
    bool picked = false;
    for (auto [a, b] : m) {
      if (a == entry[j] || (j + 1 == k - 1 && b == last)) continue;
      exit[j] = a;
      entry[j + 1] = b;
      picked = true;
      break;
    }
    if (!picked) fail(ErrorCode::connector_failed, "no independent matching edge after clique " + std::to_string(j));
  }
  std::vector<int> out;
  for (int j = 0; j < k; ++j) {
    out.push_back(entry[j]);
    for (int v : seq[j])
      if (v != entry[j] && v != exit[j]) out.push_back(v);
    out.push_back(exit[j]);
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i)
    if (!G.has_edge(out[i], out[i + 1])) fail(ErrorCode::connector_failed, "assembled walk leaves G");
  return out;
}

struct PathRoute {
  int v = -1, w = -1, r = -1;
  int bad = -1, x = -1, y = -1;
  std::array<int, 6> cliques{};
  std::array<int, 6> attach{};
  std::array<std::vector<int>, 3> clique_paths;
  std::vector<int> image;
};

struct RoutePlan {
  int q = 0;
  std::vector<PathRoute> routes;
};

inline nlohmann::json route_plan_to_json(const RoutePlan& p) {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : p.routes)
    rs.push_back({{"v", r.v},
                  {"w", r.w},
                  {"r", r.r},
                  {"bad", r.bad},
                  {"x", r.x},
                  {"y", r.y},
                  {"cliques", r.cliques},
                  {"attach", r.attach},
                  {"clique_paths", r.clique_paths},
                  {"image", r.image}});
  return {{"q", p.q}, {"routes", rs}};
}

// Finishes a Case 1 embedding: paths are bare paths of T whose ends are mapped by g
// and whose inner vertices are not; R holds one reserve vertex per path.
inline RoutePlan route_all_bare_paths(const Graph& G, const Tree& T, const CliqueFactor& f,
                                      const std::vector<std::vector<int>>& paths, const std::vector<int>& R,
                                      Embedding& g) {
  const int u = static_cast<int>(paths.size());
  require(u > 0, ErrorCode::invalid_parameter, "no bare paths to route");
  require(static_cast<int>(R.size()) == u && static_cast<int>(f.bad.size()) == u, ErrorCode::invalid_parameter,
          "need exactly one reserve vertex and one bad clique per path");
  if (auto bad = factor_violation(G, f)) fail(ErrorCode::invalid_parameter, *bad);
  auto good = f.good();
  const int rest = static_cast<int>(good.size()) - 6 * u;
  if (rest <= 0 || rest % (3 * u) != 0)
    fail(ErrorCode::invalid_parameter, std::to_string(good.size()) + " good cliques do not leave 3q per path");
  RoutePlan plan;
  plan.q = rest / (3 * u);
  const int inner = 15 * (plan.q + 2) + 6;
  for (const auto& P : paths)
    require(static_cast<int>(P.size()) == inner + 2, ErrorCode::invalid_parameter,
            "bare path has " + std::to_string(P.size()) + " vertices, expected " + std::to_string(inner + 2));

  std::vector<char> taken(f.size(), 0);
  for (int i = 0; i < u; ++i) {
    const auto& P = paths[i];
    PathRoute pr;
    require(g.mapped(P.front()) && g.mapped(P.back()), ErrorCode::invalid_parameter, "bare path ends must be embedded");
    pr.v = g[P.front()];
    pr.w = g[P.back()];
    pr.r = R[i];
    pr.bad = f.bad[i];
    pr.x = f.cliques[pr.bad][0];
    pr.y = f.cliques[pr.bad][1];
    const std::array<int, 6> targets{pr.v, pr.r, pr.r, pr.x, pr.y, pr.w};
    for (int s = 0; s < 6; ++s) {
      bool found = false;
      for (int c : good) {
        if (taken[c]) continue;
        for (int z : f.cliques[c]) {
          if (!G.has_edge(targets[s], z)) continue;
          if (!found || z < pr.attach[s]) pr.attach[s] = z;
          found = true;
        }
        if (found) {
          pr.cliques[s] = c;
          taken[c] = 1;
          break;
        }
      }
      if (!found)
        fail(ErrorCode::routing_failed, "clique selection: path " + std::to_string(i) + " slot " +
                                            std::to_string(s + 1) + " vertex " + std::to_string(targets[s]));
    }
    plan.routes.push_back(pr);
  }

  Graph Hall = build_clique_adjacency(G, f);
  std::vector<int> remaining;
  for (int c : good)
    if (!taken[c]) remaining.push_back(c);
  Graph Hp(static_cast<int>(remaining.size()));
  for (std::size_t a = 0; a < remaining.size(); ++a)
    for (std::size_t b = a + 1; b < remaining.size(); ++b)
      if (Hall.has_edge(remaining[a], remaining[b])) Hp.add_edge(static_cast<int>(a), static_cast<int>(b));
  std::vector<int> cycle;
  try {
    cycle = dirac_hamilton_cycle(Hp);
  } catch (const Error& e) {
    fail(ErrorCode::routing_failed, std::string("hamilton cycle: ") + e.what());
  }
  for (int& c : cycle) c = remaining[c];
  auto qpaths = split_cycle_into_paths(cycle, plan.q);

  // F: pair (i, s) ~ clique-path Q iff its ends can be matched onto (K_s, K_{s+1}) in H.
  const int nA = 3 * u;
  std::vector<std::vector<int>> adj(nA);
  auto orient = [&](int a, int b) {
    const auto& r = plan.routes[a / 3];
    int k1 = r.cliques[2 * (a % 3)], k2 = r.cliques[2 * (a % 3) + 1];
    const auto& Q = qpaths[b];
    if (Hall.has_edge(k1, Q.front()) && Hall.has_edge(Q.back(), k2)) return 1;
    if (Hall.has_edge(k1, Q.back()) && Hall.has_edge(Q.front(), k2)) return -1;
    return 0;
  };
  for (int a = 0; a < nA; ++a)
    for (int b = 0; b < nA; ++b)
      if (orient(a, b)) adj[a].push_back(b);
  std::vector<int> match;
  try {
    match = match_pairs_to_paths(adj, nA);
  } catch (const Error& e) {
    fail(ErrorCode::routing_failed, std::string("pair matching: ") + e.what());
  }

  for (int i = 0; i < u; ++i) {
    auto& pr = plan.routes[i];
    std::array<std::vector<int>, 3> hats;
    for (int s = 0; s < 3; ++s) {
      int a = 3 * i + s;
      auto Q = qpaths[match[a]];
      if (orient(a, match[a]) < 0) std::reverse(Q.begin(), Q.end());
      pr.clique_paths[s] = Q;
      std::vector<Clique> seq{f.cliques[pr.cliques[2 * s]]};
      for (int c : Q) seq.push_back(f.cliques[c]);
      seq.push_back(f.cliques[pr.cliques[2 * s + 1]]);
      hats[s] = assemble_connector(G, seq, pr.attach[2 * s], pr.attach[2 * s + 1]);
    }
    const auto& K = f.cliques[pr.bad];
    std::vector<int> qxy{pr.x};
    for (int z : K)
      if (z != pr.x && z != pr.y) qxy.push_back(z);
    qxy.push_back(pr.y);
    auto& img = pr.image;
    img.insert(img.end(), hats[0].begin(), hats[0].end());
    img.push_back(pr.r);
    img.insert(img.end(), hats[1].begin(), hats[1].end());
    img.insert(img.end(), qxy.begin(), qxy.end());
    img.insert(img.end(), hats[2].begin(), hats[2].end());
    const auto& P = paths[i];
    for (int j = 0; j < inner; ++j) g.set(P[j + 1], img[j]);
  }
  if (auto bad = embedding_violation(G, T, g, false)) fail(ErrorCode::routing_failed, "validation: " + *bad);
  return plan;
}

}  // namespace posgames
