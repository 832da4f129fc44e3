#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"
#include "posgames/game.hpp"

namespace posgames {

// Waiter playbook forcing a Client perfect matching on K_{5,5}.  Element
// 5*i + j is the edge between left vertex i and right vertex 5 + j.
namespace k55 {

constexpr int kEdges = 25;
constexpr std::uint32_t kAll = (1u << kEdges) - 1;

inline int edge(int i, int j) { return 5 * i + j; }

inline Board board() {
  std::vector<Edge> es;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) es.emplace_back(i, 5 + j);
  return Board::of_edges(es);
}

inline bool has_perfect_matching(std::uint32_t mask, int row = 0, unsigned used = 0) {
  if (row == 5) return true;
  for (int j = 0; j < 5; ++j)
    if (!(used >> j & 1u) && (mask >> edge(row, j) & 1u) && has_perfect_matching(mask, row + 1, used | (1u << j)))
      return true;
  return false;
}

// Five edges of a perfect matching inside mask, or empty when there is none.
inline std::vector<int> extract_matching(std::uint32_t mask) {
  std::vector<int> out;
  std::function<bool(int, unsigned)> rec = [&](int row, unsigned used) {
    if (row == 5) return true;
    for (int j = 0; j < 5; ++j) {
      if ((used >> j & 1u) || !(mask >> edge(row, j) & 1u)) continue;
      out.push_back(edge(row, j));
      if (rec(row + 1, used | (1u << j))) return true;
      out.pop_back();
    }
    return false;
  };
  if (!rec(0, 0)) out.clear();
  return out;
}

struct Node {
  std::array<int, 2> offer{};
  std::array<std::unique_ptr<Node>, 2> child;  // child[k] follows Client picking offer[k]
};

class Playbook {
 public:
  const Node* root() const { return root_.get(); }
  std::size_t searched_states() const { return searched_; }

  static Playbook search() {
    Playbook p;
    Searcher s;
    if (!s.win(0, 0)) fail(ErrorCode::strategy_not_found, "no forcing strategy found on K_{5,5}");
    p.searched_ = s.memo.size();
    p.root_ = s.build(0, 0);
    return p;
  }

  static Playbook load_or_search(const std::string& path) {
    if (!path.empty() && std::filesystem::exists(path)) {
      std::ifstream in(path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::parse_error, std::string("k55 playbook: ") + ex.what());
      }
      return from_json(j);
    }
    Playbook p = search();
    if (!path.empty()) {
      auto dir = std::filesystem::path(path).parent_path();
      if (!dir.empty()) std::filesystem::create_directories(dir);
      std::ofstream out(path);
      out << p.to_json().dump() << "\n";
    }
    return p;
  }

  nlohmann::json to_json() const { return node_json(root_.get()); }

  static Playbook from_json(const nlohmann::json& j) {
    Playbook p;
    try {
      p.root_ = node_from(j);
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::parse_error, std::string("k55 playbook: ") + ex.what());
    }
    return p;
  }

  // Offer at the node reached by following the given Client picks.
  static const Node* walk(const Node* n, const std::vector<int>& picks) {
    for (int e : picks) {
      if (!n) return nullptr;
      int k = n->offer[0] == e ? 0 : (n->offer[1] == e ? 1 : -1);
      if (k < 0) return nullptr;
      n = n->child[k].get();
    }
    return n;
  }

 private:
  struct Key {
    std::uint32_t c, w;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return (static_cast<std::size_t>(k.c) << 25) ^ k.w; }
  };

  struct Searcher {
    std::unordered_map<Key, int, KeyHash> memo;  // -1 lost, otherwise packed best offer

    static std::vector<std::array<int, 2>> ordered_offers(std::uint32_t c, std::uint32_t w) {
      std::uint32_t fr = kAll & ~(c | w);
      std::array<int, 10> cdeg{};
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          if (c >> edge(i, j) & 1u) {
            ++cdeg[i];
            ++cdeg[5 + j];
          }
      std::vector<std::pair<int, std::array<int, 2>>> scored;
      for (int x = 0; x < kEdges; ++x) {
        if (!(fr >> x & 1u)) continue;
        for (int y = x + 1; y < kEdges; ++y) {
          if (!(fr >> y & 1u)) continue;
          int xi = x / 5, xj = 5 + x % 5, yi = y / 5, yj = 5 + y % 5;
          int shared = xi == yi ? xi : (xj == yj ? xj : -1);
          int score = shared < 0 ? 100 : cdeg[shared] * 10;
          score += cdeg[xi] + cdeg[xj] + cdeg[yi] + cdeg[yj];
          scored.push_back({score, {x, y}});
        }
      }
      std::stable_sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first < b.first; });
      std::vector<std::array<int, 2>> out;
      for (auto& s : scored) out.push_back(s.second);
      return out;
    }

    bool win(std::uint32_t c, std::uint32_t w) {
      if (has_perfect_matching(c)) return true;
      std::uint32_t fr = kAll & ~(c | w);
      int nfree = __builtin_popcount(fr);
      if (nfree < 2) return false;
      if (!has_perfect_matching(c | fr)) return false;
      Key key{c, w};
      if (auto it = memo.find(key); it != memo.end()) return it->second >= 0;
      memo[key] = -1;
      for (auto [x, y] : ordered_offers(c, w)) {
        std::uint32_t bx = 1u << x, by = 1u << y;
        if (win(c | bx, w | by) && win(c | by, w | bx)) {
          memo[key] = x * 32 + y;
          return true;
        }
      }
      return false;
    }

    std::unique_ptr<Node> build(std::uint32_t c, std::uint32_t w) {
      std::uint32_t fr = kAll & ~(c | w);
      if (__builtin_popcount(fr) < 2) return nullptr;
      auto n = std::make_unique<Node>();
      int x, y;
      auto it = memo.find(Key{c, w});
      if (!has_perfect_matching(c) && it != memo.end() && it->second >= 0) {
        x = it->second / 32;
        y = it->second % 32;
      } else {
        // Matching already secured (or forced earlier): offer the two lowest free edges.
        x = __builtin_ctz(fr);
        y = __builtin_ctz(fr & ~(1u << x));
      }
      n->offer = {x, y};
      n->child[0] = build(c | (1u << x), w | (1u << y));
      n->child[1] = build(c | (1u << y), w | (1u << x));
      return n;
    }
  };

  static nlohmann::json node_json(const Node* n) {
    if (!n) return nullptr;
    nlohmann::json children = nlohmann::json::object();
    for (int k = 0; k < 2; ++k)
      if (n->child[k]) children[std::to_string(n->offer[k])] = node_json(n->child[k].get());
    return {{"offer", {n->offer[0], n->offer[1]}}, {"children", children}};
  }

  static std::unique_ptr<Node> node_from(const nlohmann::json& j) {
    if (j.is_null()) return nullptr;
    auto n = std::make_unique<Node>();
    n->offer = {j.at("offer").at(0).get<int>(), j.at("offer").at(1).get<int>()};
    const auto& ch = j.at("children");
    for (int k = 0; k < 2; ++k) {
      auto key = std::to_string(n->offer[k]);
      if (ch.contains(key)) n->child[k] = node_from(ch[key]);
    }
    return n;
  }

  std::unique_ptr<Node> root_;
  std::size_t searched_ = 0;
};

inline std::string default_cache_path() {
#ifdef POSGAMES_DATA_DIR
  return std::string(POSGAMES_DATA_DIR) + "/k55_playbook.json";
#else
  return "k55_playbook.json";
#endif
}

}  // namespace k55

// Waiter's K_{5,5} perfect-matching playbook, searched once and cached on disk.
inline const k55::Playbook& wc_k55_matching_strategy(const std::string& cache = k55::default_cache_path()) {
  static const k55::Playbook book = k55::Playbook::load_or_search(cache);
  return book;
}

}  // namespace posgames
