#pragma once

#include <algorithm>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "posgames/graph.hpp"

namespace posgames {

// Maximum cardinality matching on a general graph given by an edge list.
// Returns mate[v] (or -1 when v is unmatched).
inline std::vector<int> max_matching(int n, const std::vector<Edge>& edges) {
  using G = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  using V = boost::graph_traits<G>::vertex_descriptor;
  G g(n);
  for (auto [u, v] : edges) boost::add_edge(u, v, g);
  std::vector<V> mate(n);
  boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
  std::vector<int> out(n, -1);
  const V none = boost::graph_traits<G>::null_vertex();
  for (int v = 0; v < n; ++v)
    if (mate[v] != none) out[v] = static_cast<int>(mate[v]);
  return out;
}

// Bipartite matching between sides of sizes na and nb, adj[a] listing b indices.
// Returns matchA[a] (or -1).
inline std::vector<int> bipartite_matching(const std::vector<std::vector<int>>& adj, int nb) {
  int na = static_cast<int>(adj.size());
  std::vector<Edge> es;
  for (int a = 0; a < na; ++a)
    for (int b : adj[a]) es.push_back({a, na + b});
  auto mate = max_matching(na + nb, es);
  std::vector<int> out(na, -1);
  for (int a = 0; a < na; ++a)
    if (mate[a] >= 0) out[a] = mate[a] - na;
  return out;
}

// Given a maximum matching that leaves some A vertex unmatched, returns a set S of
// A vertices with |N(S)| < |S|: the A vertices reachable by alternating paths from
// the first unmatched A vertex. Empty when the matching saturates A.
inline std::vector<int> hall_witness(const std::vector<std::vector<int>>& adj, const std::vector<int>& matchA, int nb) {
  int na = static_cast<int>(adj.size());
  std::vector<int> matchB(nb, -1);
  for (int a = 0; a < na; ++a)
    if (matchA[a] >= 0) matchB[matchA[a]] = a;
  int start = -1;
  for (int a = 0; a < na && start < 0; ++a)
    if (matchA[a] < 0) start = a;
  if (start < 0) return {};
  std::vector<char> seenA(na, 0), seenB(nb, 0);
  std::vector<int> queue{start}, out;
  seenA[start] = 1;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int a = queue[i];
    out.push_back(a);
    for (int b : adj[a]) {
      if (seenB[b]) continue;
      seenB[b] = 1;
      int next = matchB[b];
      if (next >= 0 && !seenA[next]) {
        seenA[next] = 1;
        queue.push_back(next);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace posgames
