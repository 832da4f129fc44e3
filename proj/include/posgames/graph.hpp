#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <nlohmann/json.hpp>

#include "posgames/error.hpp"

namespace posgames {

using Bitset = boost::dynamic_bitset<std::uint64_t>;
using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// Simple undirected graph with both adjacency lists and bitset rows.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n), rows_(n, Bitset(n)) {}

  int n() const { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const { return m_; }

  bool add_edge(int u, int v) {
    check(u);
    check(v);
    if (u == v) fail(ErrorCode::invalid_parameter, "self-loop at " + std::to_string(u));
    if (rows_[u][v]) return false;
    rows_[u][v] = true;
    rows_[v][u] = true;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    ++m_;
    sorted_ = false;
    return true;
  }

  bool remove_edge(int u, int v) {
    if (!rows_[u][v]) return false;
    rows_[u][v] = false;
    rows_[v][u] = false;
    std::erase(adj_[u], v);
    std::erase(adj_[v], u);
    --m_;
    return true;
  }

  bool has_edge(int u, int v) const { return rows_[u][v]; }
  const Bitset& row(int v) const { return rows_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  const std::vector<int>& neighbors(int v) const {
    if (!sorted_) sort_lists();
    return adj_[v];
  }

  int degree_into(int v, const Bitset& set) const { return static_cast<int>((rows_[v] & set).count()); }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (int u = 0; u < n(); ++u)
      for (int v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  int min_degree() const {
    int best = n() == 0 ? 0 : degree(0);
    for (int v = 1; v < n(); ++v) best = std::min(best, degree(v));
    return best;
  }

  int max_degree() const {
    int best = 0;
    for (int v = 0; v < n(); ++v) best = std::max(best, degree(v));
    return best;
  }

  Bitset empty_set() const { return Bitset(n()); }

  Bitset set_of(const std::vector<int>& vs) const {
    Bitset b(n());
    for (int v : vs) b[v] = true;
    return b;
  }

  static Graph complete(int n) {
    Graph g(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
  }

  static Graph from_edges(int n, const std::vector<Edge>& es) {
    Graph g(n);
    for (auto [u, v] : es) g.add_edge(u, v);
    return g;
  }

  bool operator==(const Graph& o) const { return rows_ == o.rows_; }

 private:
  void check(int v) const {
    if (v < 0 || v >= n()) fail(ErrorCode::invalid_parameter, "vertex out of range: " + std::to_string(v));
  }
  void sort_lists() const {
    for (auto& l : adj_) std::sort(l.begin(), l.end());
    sorted_ = true;
  }

  mutable std::vector<std::vector<int>> adj_;
  std::vector<Bitset> rows_;
  std::size_t m_ = 0;
  mutable bool sorted_ = true;
};

inline std::vector<int> bits_to_vector(const Bitset& b) {
  std::vector<int> out;
  for (auto i = b.find_first(); i != Bitset::npos; i = b.find_next(i)) out.push_back(static_cast<int>(i));
  return out;
}

inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json es = nlohmann::json::array();
  for (auto [u, v] : g.edges()) es.push_back({u, v});
  return {{"n", g.n()}, {"edges", es}};
}

inline Graph graph_from_json(const nlohmann::json& j) {
  try {
    Graph g(j.at("n").get<int>());
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    return g;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::parse_error, std::string("graph: ") + ex.what());
  }
}

}  // namespace posgames
