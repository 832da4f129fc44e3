#pragma once

#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

namespace posgames {

// Integer max-flow on a directed network, solved with Boost's push-relabel.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : g_(nodes) {}

  // Returns an arc handle whose flow can be read after run().
  int add_arc(int from, int to, long capacity) {
    auto cap = boost::get(boost::edge_capacity, g_);
    auto rev = boost::get(boost::edge_reverse, g_);
    auto e = boost::add_edge(from, to, g_).first;
    auto r = boost::add_edge(to, from, g_).first;
    cap[e] = capacity;
    cap[r] = 0;
    rev[e] = r;
    rev[r] = e;
    arcs_.push_back(e);
    return static_cast<int>(arcs_.size()) - 1;
  }

  long run(int source, int sink) {
    return boost::push_relabel_max_flow(g_, static_cast<Vertex>(source), static_cast<Vertex>(sink));
  }

  long flow(int arc) const {
    auto cap = boost::get(boost::edge_capacity, g_);
    auto res = boost::get(boost::edge_residual_capacity, g_);
    return cap[arcs_[arc]] - res[arcs_[arc]];
  }

 private:
  using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
  using Network = boost::adjacency_list<
      boost::vecS, boost::vecS, boost::directedS, boost::no_property,
      boost::property<boost::edge_capacity_t, long,
                      boost::property<boost::edge_residual_capacity_t, long,
                                      boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
  using Vertex = boost::graph_traits<Network>::vertex_descriptor;
  using Arc = boost::graph_traits<Network>::edge_descriptor;

  Network g_;
  std::vector<Arc> arcs_;
};

}  // namespace posgames
