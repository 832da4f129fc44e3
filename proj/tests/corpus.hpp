#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "posgames/strategy.hpp"

namespace corpus {

struct Hypergraph {
  int elements;
  posgames::Family sets;
};

// Every hypergraph with at most max_elements elements and at most max_sets
// distinct nonempty sets whose sum 2^{1-|F|} is below 1, up to isomorphism.
// An element is described by its column: the bitmask of sets containing it,
// so a hypergraph is a multiset of columns; isomorphic copies are merged by
// taking the least column multiset over all permutations of the sets.
inline std::vector<Hypergraph> es_corpus(int max_elements = 8, int max_sets = 4) {
  std::vector<Hypergraph> out;
  for (int m = 1; m <= max_sets; ++m) {
    std::vector<int> perm(m);
    std::vector<std::vector<int>> perms;
    std::iota(perm.begin(), perm.end(), 0);
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    int types = 1 << m;
    for (int n = 1; n <= max_elements; ++n) {
      std::set<std::vector<int>> seen;
      std::vector<int> cols;
      std::function<void(int)> rec = [&](int lo) {
        if (static_cast<int>(cols.size()) == n) {
          std::vector<int> sizes(m, 0);
          for (int c : cols)
            for (int r = 0; r < m; ++r) sizes[r] += c >> r & 1;
          double crit = 0;
          for (int r = 0; r < m; ++r) {
            if (sizes[r] == 0) return;
            crit += std::ldexp(1.0, 1 - sizes[r]);
          }
          if (crit >= 1) return;
          std::vector<std::vector<int>> rows(m);
          for (int i = 0; i < n; ++i)
            for (int r = 0; r < m; ++r)
              if (cols[i] >> r & 1) rows[r].push_back(i);
          for (int r = 0; r < m; ++r)
            for (int q = r + 1; q < m; ++q)
              if (rows[r] == rows[q]) return;
          std::vector<int> best;
          for (const auto& p : perms) {
            std::vector<int> mapped(n);
            for (int i = 0; i < n; ++i) {
              int c = 0;
              for (int r = 0; r < m; ++r)
                if (cols[i] >> r & 1) c |= 1 << p[r];
              mapped[i] = c;
            }
            std::sort(mapped.begin(), mapped.end());
            if (best.empty() || mapped < best) best = mapped;
          }
          if (!seen.insert(best).second) return;
          out.push_back({n, rows});
          return;
        }
        for (int c = lo; c < types; ++c) {
          cols.push_back(c);
          rec(c);
          cols.pop_back();
        }
      };
      rec(0);
    }
  }
  return out;
}

}  // namespace corpus
