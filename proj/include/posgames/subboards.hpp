#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/game.hpp"
#include "posgames/graph.hpp"
#include "posgames/universality.hpp"

namespace posgames {

// Element id of edge uv on the board of K_n built by complete_board(n).
inline int kn_edge(int n, int u, int v) {
  if (u > v) std::swap(u, v);
  return u * n - u * (u + 1) / 2 + (v - u - 1);
}

inline Board complete_board(int n) {
  std::vector<Edge> es;
  es.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) es.emplace_back(u, v);
  return Board{static_cast<int>(es.size()), std::move(es)};
}

// Graph formed by the board elements owned by `o` (or free, for Owner::free).
inline Graph owned_graph(const GameState& s, int n, Owner o) {
  Graph g(n);
  const auto& lab = s.board().labels;
  for (int e = 0; e < static_cast<int>(lab.size()); ++e)
    if (s.owner(e) == o) g.add_edge(lab[e].first, lab[e].second);
  return g;
}

// A subgame's exit guarantee, checked only when its entry condition held.
struct ConditionalCheck {
  std::string name;
  CheckStatus entry = CheckStatus::unknown;
  bool exit_ok = false;
  std::string detail;
  bool conditioned() const { return entry == CheckStatus::pass; }
  bool passed() const { return !conditioned() || exit_ok; }
};

inline nlohmann::json check_to_json(const ConditionalCheck& c) {
  return {{"name", c.name}, {"entry", to_string(c.entry)}, {"exit", c.exit_ok}, {"detail", c.detail}};
}

// Edge-disjoint named subboards of a game board.
struct SubboardPlan {
  std::vector<std::string> names;
  std::vector<std::int8_t> board_of;  // per element, -1 when outside every subboard
  std::uint64_t seed = 0;
  int attempts = 0;
  bool passed = false;
  std::vector<PropertyCheck> checks;

  int index(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
  }

  std::vector<int> elements(int b) const {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(board_of.size()); ++e)
      if (board_of[e] == b) out.push_back(e);
    return out;
  }

  int count(int b) const { return static_cast<int>(std::count(board_of.begin(), board_of.end(), b)); }

  Graph graph(int b, const Board& board, int n) const {
    Graph g(n);
    for (int e = 0; e < static_cast<int>(board_of.size()); ++e)
      if (board_of[e] == b) g.add_edge(board.labels[e].first, board.labels[e].second);
    return g;
  }

  const PropertyCheck* check(const std::string& property) const {
    for (const auto& c : checks)
      if (c.property == property) return &c;
    return nullptr;
  }
};

inline nlohmann::json plan_to_json(const SubboardPlan& p) {
  nlohmann::json boards = nlohmann::json::array();
  for (int b = 0; b < static_cast<int>(p.names.size()); ++b) boards.push_back({{"name", p.names[b]}, {"edges", p.count(b)}});
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : p.checks)
    checks.push_back({{"property", c.property}, {"status", to_string(c.status)}, {"mode", c.mode}, {"detail", c.detail}});
  return {{"boards", boards}, {"seed", p.seed}, {"attempts", p.attempts}, {"passed", p.passed}, {"checks", checks}};
}

// Elements in a fixed order; next() skips claimed ones.  Elements never become
// free again, so the cursor only moves forward.
class FreeList {
 public:
  FreeList() = default;
  explicit FreeList(std::vector<int> els) : els_(std::move(els)) {}
  std::optional<int> next(const GameState& s) {
    while (pos_ < els_.size() && !s.is_free(els_[pos_])) ++pos_;
    if (pos_ == els_.size()) return std::nullopt;
    return els_[pos_];
  }
  std::optional<int> second(const GameState& s) {
    auto first = next(s);
    if (!first) return std::nullopt;
    for (std::size_t i = pos_ + 1; i < els_.size(); ++i)
      if (s.is_free(els_[i])) return els_[i];
    return std::nullopt;
  }
  std::size_t size() const { return els_.size(); }

 private:
  std::vector<int> els_;
  std::size_t pos_ = 0;
};

// Disjoint pairs of elements grouped by a centre vertex: each group is the
// edge set of one star, paired consecutively.
class StarPairing {
 public:
  StarPairing() = default;
  explicit StarPairing(int board_size) : index_(board_size, -1) {}

  void add_group(int centre, const std::vector<int>& elements) {
    int g = static_cast<int>(centres_.size());
    centres_.push_back(centre);
    group_pairs_.emplace_back();
    for (std::size_t i = 0; i + 1 < elements.size(); i += 2) add_pair(elements[i], elements[i + 1], g);
    if (elements.size() % 2) unpaired_.push_back(elements.back());
  }

  void add_pair(int x, int y, int group) {
    require(x != y && index_[x] < 0 && index_[y] < 0, ErrorCode::invalid_configuration, "pairing pairs overlap");
    int p = static_cast<int>(pairs_.size());
    pairs_.emplace_back(x, y);
    group_of_.push_back(group);
    index_[x] = p;
    index_[y] = p;
    group_pairs_[group].push_back(p);
  }

  int add_empty_group(int centre) {
    centres_.push_back(centre);
    group_pairs_.emplace_back();
    return static_cast<int>(centres_.size()) - 1;
  }

  int pair_of(int e) const { return e >= 0 && e < static_cast<int>(index_.size()) ? index_[e] : -1; }
  int partner(int e) const {
    int p = pair_of(e);
    if (p < 0) return -1;
    return pairs_[p].first == e ? pairs_[p].second : pairs_[p].first;
  }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const std::vector<int>& unpaired() const { return unpaired_; }
  int groups() const { return static_cast<int>(centres_.size()); }
  int centre(int g) const { return centres_[g]; }
  int group_of_pair(int p) const { return group_of_[p]; }
  const std::vector<int>& group(int g) const { return group_pairs_[g]; }

  // Pairs of which `o` owns no element.
  std::vector<int> missed(const GameState& s, Owner o) const {
    std::vector<int> out;
    for (int p = 0; p < static_cast<int>(pairs_.size()); ++p)
      if (s.owner(pairs_[p].first) != o && s.owner(pairs_[p].second) != o) out.push_back(p);
    return out;
  }

 private:
  std::vector<int> index_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> group_of_;
  std::vector<int> centres_;
  std::vector<std::vector<int>> group_pairs_;
  std::vector<int> unpaired_;
};

// log of the binomial coefficient, for family-size bounds.
inline double ln_binom(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Small-sample search for two disjoint sets A (from `side`, size a) and B (size b)
// spanning few edges of g: random A, best B, best A for that B, repeated.
struct SparsePair {
  std::vector<int> A, B;
  int edges = -1;
};

inline SparsePair sparse_pair_search(const Graph& g, const std::vector<int>& side, int a, int b, int starts,
                                     std::mt19937_64& rng) {
  const int n = g.n();
  SparsePair best;
  if (a <= 0 || b <= 0 || static_cast<int>(side.size()) < a || n < a + b) return best;
  auto pick_lowest = [&](const std::vector<int>& pool, const Bitset& other, const Bitset& banned, int k) {
    std::vector<std::pair<int, int>> score;
    for (int v : pool)
      if (!banned[v]) score.emplace_back(g.degree_into(v, other), v);
    std::sort(score.begin(), score.end());
    std::vector<int> out;
    for (int i = 0; i < k && i < static_cast<int>(score.size()); ++i) out.push_back(score[i].second);
    return out;
  };
  std::vector<int> all(n);
  for (int v = 0; v < n; ++v) all[v] = v;
  for (int t = 0; t < starts; ++t) {
    std::vector<int> A = side;
    std::shuffle(A.begin(), A.end(), rng);
    A.resize(a);
    std::vector<int> B;
    for (int round = 0; round < 3; ++round) {
      Bitset setA = g.set_of(A);
      B = pick_lowest(all, setA, setA, b);
      Bitset setB = g.set_of(B);
      if (static_cast<int>(B.size()) < b) break;
      auto A2 = pick_lowest(side, setB, setB, a);
      if (static_cast<int>(A2.size()) < a) break;
      A = A2;
    }
    Bitset setA = g.set_of(A);
    B = pick_lowest(all, setA, setA, b);
    if (static_cast<int>(B.size()) < b) continue;
    Bitset setB = g.set_of(B);
    int e = 0;
    for (int x : A) e += g.degree_into(x, setB);
    if (best.edges < 0 || e < best.edges) best = {A, B, e};
  }
  std::sort(best.A.begin(), best.A.end());
  std::sort(best.B.begin(), best.B.end());
  return best;
}

}  // namespace posgames
