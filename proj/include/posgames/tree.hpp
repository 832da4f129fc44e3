#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"
#include "posgames/graph.hpp"
#include "posgames/params.hpp"

namespace posgames {

class Tree {
 public:
  Tree() = default;

  // parent[root] == -1; every other entry names a tree neighbour.
  static Tree from_parents(const std::vector<int>& parent) {
    Tree t;
    t.n_ = static_cast<int>(parent.size());
    require(t.n_ >= 1, ErrorCode::invalid_configuration, "a tree needs at least one vertex");
    t.parent_ = parent;
    t.adj_.assign(t.n_, {});
    int roots = 0;
    for (int v = 0; v < t.n_; ++v) {
      int p = parent[v];
      if (p < 0) {
        ++roots;
        t.root_ = v;
        continue;
      }
      require(p < t.n_ && p != v, ErrorCode::invalid_configuration, "bad parent entry at " + std::to_string(v));
      t.adj_[v].push_back(p);
      t.adj_[p].push_back(v);
    }
    require(roots == 1, ErrorCode::invalid_configuration, "a tree needs exactly one root");
    for (auto& a : t.adj_) std::sort(a.begin(), a.end());
    require(static_cast<int>(t.bfs_order(t.root_).size()) == t.n_, ErrorCode::invalid_configuration,
            "parent array is not connected");
    return t;
  }

  static Tree from_edges(int n, const std::vector<Edge>& edges) {
    require(static_cast<int>(edges.size()) == n - 1, ErrorCode::invalid_configuration, "a tree on n vertices has n-1 edges");
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
      require(u >= 0 && v >= 0 && u < n && v < n && u != v, ErrorCode::invalid_configuration, "bad tree edge");
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::vector<int> parent(n, -2);
    parent[0] = -1;
    std::deque<int> q{0};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (parent[v] == -2) {
          parent[v] = u;
          q.push_back(v);
        }
    }
    for (int v = 0; v < n; ++v) require(parent[v] != -2, ErrorCode::invalid_configuration, "edge list is not connected");
    return from_parents(parent);
  }

  int n() const { return n_; }
  int root() const { return root_; }
  int parent(int v) const { return parent_[v]; }
  const std::vector<int>& parents() const { return parent_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  bool is_leaf(int v) const { return degree(v) == 1; }

  int max_degree() const {
    int d = 0;
    for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
    return d;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int v = 0; v < n_; ++v)
      if (parent_[v] >= 0) out.push_back(make_edge(v, parent_[v]));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (is_leaf(v)) out.push_back(v);
    return out;
  }

  // N_T(L(T)): vertices adjacent to a leaf.
  std::vector<int> leaf_parents() const {
    std::vector<char> mark(n_, 0);
    for (int v = 0; v < n_; ++v)
      if (is_leaf(v)) mark[adj_[v][0]] = 1;
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (mark[v]) out.push_back(v);
    return out;
  }

  std::vector<int> bfs_order(int from) const {
    std::vector<int> order{from};
    std::vector<char> seen(n_, 0);
    seen[from] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (int v : adj_[order[i]])
        if (!seen[v]) {
          seen[v] = 1;
          order.push_back(v);
        }
    return order;
  }

  // Whether `vertices` induces a connected subtree.
  bool induces_subtree(const std::vector<int>& vertices) const {
    if (vertices.empty()) return false;
    std::vector<char> in(n_, 0), seen(n_, 0);
    for (int v : vertices) in[v] = 1;
    std::vector<int> stack{vertices[0]};
    seen[vertices[0]] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj_[u])
        if (in[v] && !seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
    }
    std::size_t distinct = 0;
    for (int v = 0; v < n_; ++v) distinct += in[v];
    return reached == distinct;
  }

  Graph as_graph() const {
    Graph g(n_);
    for (auto [u, v] : edges()) g.add_edge(u, v);
    return g;
  }

 private:
  int n_ = 0;
  int root_ = 0;
  std::vector<int> parent_;
  std::vector<std::vector<int>> adj_;
};

inline nlohmann::json tree_to_json(const Tree& t) {
  nlohmann::json parent = nlohmann::json::array();
  for (int p : t.parents()) parent.push_back(p < 0 ? nlohmann::json(nullptr) : nlohmann::json(p));
  return {{"n", t.n()}, {"parent", parent}};
}

inline Tree tree_from_json(const nlohmann::json& j) {
  try {
    int n = j.at("n").get<int>();
    const auto& arr = j.at("parent");
    require(arr.is_array() && static_cast<int>(arr.size()) == n, ErrorCode::parse_error, "parent array must have n entries");
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = arr[v].is_null() ? -1 : arr[v].get<int>();
    return Tree::from_parents(parent);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("bad tree file: ") + e.what());
  }
}

namespace detail {

struct SubtreeSplit {
  std::vector<int> a, b;
};

// Small-subtree split of T[S] rooted at the lowest id of S.
inline SubtreeSplit split_within(const Tree& t, const std::vector<int>& S, int k) {
  int n = t.n();
  std::vector<char> in(n, 0);
  for (int v : S) in[v] = 1;
  int root = *std::min_element(S.begin(), S.end());
  std::vector<int> order{root}, par(n, -1);
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int v : t.neighbors(order[i]))
      if (in[v] && !seen[v]) {
        seen[v] = 1;
        par[v] = order[i];
        order.push_back(v);
      }
  std::vector<int> size(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    size[*it] += 1;
    if (par[*it] >= 0) size[par[*it]] += size[*it];
  }
  int w = -1;
  for (int v : order)
    if (size[v] >= 2 * k && (w < 0 || size[v] < size[w] || (size[v] == size[w] && v < w))) w = v;
  std::vector<int> children;
  for (int v : t.neighbors(w))
    if (in[v] && par[v] == w) children.push_back(v);

  auto collect = [&](int top, std::vector<char>& mark) {
    std::vector<int> stack{top};
    mark[top] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : t.neighbors(u))
        if (in[v] && par[v] == u && !mark[v]) {
          mark[v] = 1;
          stack.push_back(v);
        }
    }
  };

  std::vector<char> inA(n, 0);
  SubtreeSplit out;
  bool shared = false;
  auto big = std::find_if(children.begin(), children.end(), [&](int c) { return size[c] >= k; });
  if (big != children.end()) {
    collect(*big, inA);
  } else {
    inA[w] = 1;
    shared = true;
    int total = 1;
    for (int c : children) {
      if (total >= k) break;
      collect(c, inA);
      total += size[c];
    }
  }
  for (int v : S) {
    if (inA[v]) out.a.push_back(v);
    if (!inA[v] || (shared && v == w)) out.b.push_back(v);
  }
  std::sort(out.a.begin(), out.a.end());
  std::sort(out.b.begin(), out.b.end());
  return out;
}

}  // namespace detail

// V(T) = V_A cup V_B with both sides inducing trees, |V_A cap V_B| <= 1 and
// k <= |V_A| < 2k.  Rooted at vertex 0.
inline std::pair<std::vector<int>, std::vector<int>> small_subtree_split(const Tree& t, int k) {
  require(k >= 1, ErrorCode::invalid_parameter, "k must be positive");
  require(t.n() >= 2 * k, ErrorCode::tree_too_small,
          "tree has " + std::to_string(t.n()) + " vertices, need at least " + std::to_string(2 * k));
  std::vector<int> all(t.n());
  std::iota(all.begin(), all.end(), 0);
  auto s = detail::split_within(t, all, k);
  return {s.a, s.b};
}

// Cover of V(T) by at most ceil(n/(k-1)) + 1 subtrees of fewer than 2k vertices:
// peel V_A off repeatedly and recurse on V_B (rooted at its lowest id).
inline std::vector<std::vector<int>> subtree_cover(const Tree& t, int k) {
  require(k >= 2, ErrorCode::invalid_parameter, "subtree cover needs k >= 2");
  std::vector<int> rest(t.n());
  std::iota(rest.begin(), rest.end(), 0);
  std::vector<std::vector<int>> parts;
  while (static_cast<int>(rest.size()) >= 2 * k) {
    auto s = detail::split_within(t, rest, k);
    parts.push_back(std::move(s.a));
    rest = std::move(s.b);
  }
  parts.push_back(std::move(rest));
  return parts;
}

// Maximal chains whose inner vertices have degree 2, as vertex sequences
// between vertices of degree != 2.  A path tree gives a single chain.
inline std::vector<std::vector<int>> degree_two_chains(const Tree& t) {
  std::vector<std::vector<int>> chains;
  std::vector<char> used(static_cast<std::size_t>(t.n()), 0);
  // An edge is identified by its child endpoint.
  auto edge_id = [&](int u, int v) { return t.parent(u) == v ? u : v; };
  for (int b = 0; b < t.n(); ++b) {
    if (t.degree(b) == 2) continue;
    for (int u : t.neighbors(b)) {
      if (used[edge_id(b, u)]) continue;
      std::vector<int> chain{b, u};
      used[edge_id(b, u)] = 1;
      int prev = b, cur = u;
      while (t.degree(cur) == 2) {
        int next = t.neighbors(cur)[0] == prev ? t.neighbors(cur)[1] : t.neighbors(cur)[0];
        used[edge_id(cur, next)] = 1;
        chain.push_back(next);
        prev = cur;
        cur = next;
      }
      chains.push_back(std::move(chain));
    }
  }
  return chains;
}

// Greedy vertex-disjoint bare paths with ell edges: each degree-2 chain is cut
// into consecutive blocks of ell+1 vertices not used by earlier blocks.
inline std::vector<std::vector<int>> find_bare_paths(const Tree& t, int ell) {
  require(ell >= 1, ErrorCode::invalid_parameter, "path length must be positive");
  std::vector<std::vector<int>> paths;
  std::vector<char> used(t.n(), 0);
  for (const auto& chain : degree_two_chains(t)) {
    std::vector<int> block;
    for (int v : chain) {
      if (used[v]) {
        block.clear();
        continue;
      }
      block.push_back(v);
      if (static_cast<int>(block.size()) == ell + 1) {
        for (int x : block) used[x] = 1;
        paths.push_back(block);
        block.clear();
      }
    }
  }
  return paths;
}

inline bool is_bare_path(const Tree& t, const std::vector<int>& path) {
  if (path.size() < 2) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& nb = t.neighbors(path[i]);
    if (!std::binary_search(nb.begin(), nb.end(), path[i + 1])) return false;
  }
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    if (t.degree(path[i]) != 2) return false;
  return true;
}

struct TreeClassification {
  enum class Kind { bare_paths, leaves } kind = Kind::bare_paths;
  std::vector<std::vector<int>> paths;  // bare-paths case
  std::vector<int> subtree;             // leaves case: V(T')
  std::vector<int> n1;                  // leaves case: floor(C1 log n) leaf parents in T'
  int leaf_count = 0;
  int cover_parts = 0;
};

inline std::string to_string(TreeClassification::Kind k) {
  return k == TreeClassification::Kind::bare_paths ? "bare-paths" : "leaves";
}

// Dichotomy for trees of maximum degree at most d: gamma n bare paths of length
// ell, or many leaves together with a subtree T' of at most delta n vertices
// holding floor(C1 log n) leaf parents, found by a subtree cover with
// k = floor(0.4 delta n) and pigeonhole.
inline TreeClassification classify_tree(const Tree& t, const Params& p) {
  int n = t.n();
  require(t.max_degree() <= p.d(), ErrorCode::degree_bound_violated,
          "max degree " + std::to_string(t.max_degree()) + " exceeds d = " + std::to_string(p.d()));
  TreeClassification out;
  out.leaf_count = static_cast<int>(t.leaves().size());
  double gn = p.gamma * n;
  auto paths = find_bare_paths(t, p.ell());
  if (paths.size() >= gn) {
    out.kind = TreeClassification::Kind::bare_paths;
    out.paths = std::move(paths);
    return out;
  }
  out.kind = TreeClassification::Kind::leaves;
  double logn = std::log(static_cast<double>(n));
  require(out.leaf_count >= p.C1() * gn, ErrorCode::classification_failed,
          "neither branch holds: " + std::to_string(paths.size()) + " bare paths (need " + std::to_string(gn) + "), " +
              std::to_string(out.leaf_count) + " leaves (need " + std::to_string(p.C1() * gn) + ")");
  int k = static_cast<int>(std::floor(0.4 * p.delta() * n));
  require(k >= 2, ErrorCode::classification_failed, "leaves branch: 0.4 delta n is below 2");
  auto parts = subtree_cover(t, k);
  out.cover_parts = static_cast<int>(parts.size());
  std::vector<char> lp(n, 0);
  for (int v : t.leaf_parents()) lp[v] = 1;
  std::size_t best = 0;
  int bestCount = -1;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    int cnt = 0;
    for (int v : parts[i]) cnt += lp[v];
    if (cnt > bestCount) {
      bestCount = cnt;
      best = i;
    }
  }
  int need = static_cast<int>(std::floor(p.C1() * logn));
  require(bestCount >= need, ErrorCode::classification_failed,
          "leaves branch: best cover part holds " + std::to_string(bestCount) + " leaf parents, need " + std::to_string(need));
  require(parts[best].size() <= p.delta() * n, ErrorCode::classification_failed, "leaves branch: subtree exceeds delta n");
  out.subtree = parts[best];
  for (int v : out.subtree)
    if (lp[v] && static_cast<int>(out.n1.size()) < need) out.n1.push_back(v);
  return out;
}

namespace trees {

inline Tree path(int n) {
  std::vector<int> parent(n);
  for (int v = 0; v < n; ++v) parent[v] = v - 1;
  return Tree::from_parents(parent);
}

inline Tree star(int leaves) {
  std::vector<int> parent(leaves + 1, 0);
  parent[0] = -1;
  return Tree::from_parents(parent);
}

// Uniform random labelled tree via a Pruefer sequence.
inline Tree random(int n, std::mt19937_64& rng) {
  if (n == 1) return Tree::from_parents({-1});
  if (n == 2) return Tree::from_parents({-1, 0});
  std::vector<int> seq(n - 2), degree(n, 1);
  for (int& x : seq) {
    x = static_cast<int>(rng() % n);
    ++degree[x];
  }
  std::vector<Edge> edges;
  int ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int x : seq) {
    edges.push_back(make_edge(leaf, x));
    if (--degree[x] == 1 && x < ptr) {
      leaf = x;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.push_back(make_edge(leaf, n - 1));
  return Tree::from_edges(n, edges);
}

// Random recursive tree whose degrees stay at most max_degree.
inline Tree random_bounded(int n, int max_degree, std::mt19937_64& rng) {
  require(max_degree >= 2 || n <= 2, ErrorCode::invalid_parameter, "degree bound too small");
  std::vector<int> parent(n, -1), degree(n, 0), open{0};
  for (int v = 1; v < n; ++v) {
    std::size_t i = rng() % open.size();
    int p = open[i];
    parent[v] = p;
    if (++degree[p] == max_degree) {
      open[i] = open.back();
      open.pop_back();
    }
    ++degree[v];
    if (degree[v] < max_degree) open.push_back(v);
  }
  return Tree::from_parents(parent);
}

// A path of `spine` vertices with `leaves` pendant leaves, at most per_vertex on
// each of the first spine vertices.
inline Tree broom(int spine, int leaves, int per_vertex) {
  std::vector<int> parent;
  for (int v = 0; v < spine; ++v) parent.push_back(v - 1);
  for (int i = 0; i < leaves; ++i) {
    int host = i / per_vertex;
    require(host < spine, ErrorCode::invalid_parameter, "broom spine too short for its leaves");
    parent.push_back(host);
  }
  return Tree::from_parents(parent);
}

// A path of `spine` vertices where every `stride`-th vertex gets one leaf,
// until `leaves` leaves are placed.
inline Tree caterpillar(int spine, int leaves, int stride) {
  std::vector<int> parent;
  for (int v = 0; v < spine; ++v) parent.push_back(v - 1);
  for (int i = 0; i < leaves; ++i) {
    int host = (i * stride) % spine;
    parent.push_back(host);
  }
  return Tree::from_parents(parent);
}

// A path of `spine` vertices with pendant paths of `tooth` vertices hung on
// every `stride`-th spine vertex, until the tree has n vertices.
inline Tree subdivided_comb(int n, int spine, int tooth, int stride) {
  std::vector<int> parent;
  for (int v = 0; v < spine && v < n; ++v) parent.push_back(v - 1);
  for (int host = 0; static_cast<int>(parent.size()) < n; host = (host + stride) % spine) {
    int prev = host;
    for (int i = 0; i < tooth && static_cast<int>(parent.size()) < n; ++i) {
      parent.push_back(prev);
      prev = static_cast<int>(parent.size()) - 1;
    }
  }
  return Tree::from_parents(parent);
}

// Vertex 0 with `children` children carrying per_child leaves each, plus a path of
// `spine` vertices hanging from vertex 0 whose vertices receive spine_leaves
// leaves in turn.
inline Tree hub(int children, int per_child, int spine, int spine_leaves) {
  require(spine > 0 || spine_leaves == 0, ErrorCode::invalid_parameter, "spine leaves need a spine");
  std::vector<int> parent{-1};
  for (int i = 0; i < children; ++i) parent.push_back(0);
  int first = static_cast<int>(parent.size());
  for (int i = 0; i < spine; ++i) parent.push_back(i == 0 ? 0 : first + i - 1);
  for (int c = 1; c <= children; ++c)
    for (int i = 0; i < per_child; ++i) parent.push_back(c);
  for (int i = 0; i < spine_leaves; ++i) parent.push_back(first + i % spine);
  return Tree::from_parents(parent);
}

inline Tree spider(int legs, int leg_length) {
  std::vector<int> parent{-1};
  for (int l = 0; l < legs; ++l) {
    int prev = 0;
    for (int i = 0; i < leg_length; ++i) {
      parent.push_back(prev);
      prev = static_cast<int>(parent.size()) - 1;
    }
  }
  return Tree::from_parents(parent);
}

}  // namespace trees

}  // namespace posgames
