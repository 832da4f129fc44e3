#include <iostream>

#include "posgames/universality.hpp"

using namespace posgames;

// Synthesises certified graphs on 600 vertices and embeds one tree per case.
int main() {
  struct Job {
    const char* name;
    Params p;
    Tree t;
  };
  Job jobs[] = {{"path on 600 vertices", Params::desk(), trees::path(600)},
                {"comb with 80-vertex teeth", Params::desk(), trees::subdivided_comb(600, 120, 80, 20)},
                {"hub with 60 leaf parents", Params::desk_leaves(), trees::hub(60, 6, 140, 39)},
                {"caterpillar on a 200-vertex spine", Params::desk_leaves(), trees::caterpillar(200, 400, 1)}};
  for (auto& j : jobs) {
    auto s = synth_certificate_graph(j.p, 1);
    auto e = embed_tree(s.G, s.cert, j.p, j.t);
    bool ok = !embedding_violation(s.G, j.t, e.g, true);
    std::cout << j.name << ": case " << e.route << ", " << (ok ? "valid" : "INVALID") << " embedding into G with "
              << s.G.edges().size() << " edges\n";
  }
}
