#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"
#include "posgames/graph.hpp"

namespace posgames {

enum class Rules { MB, WC, CW, AE };
enum class Owner : std::uint8_t { free = 0, a = 1, b = 2 };
enum class Side { a, b };
enum class Actor { maker, breaker, waiter, client, avoider, enforcer };
enum class Outcome { builder_wins, blocker_wins, ongoing };

inline std::string to_string(Rules r) {
  switch (r) {
    case Rules::MB: return "MB";
    case Rules::WC: return "WC";
    case Rules::CW: return "CW";
    case Rules::AE: return "AE";
  }
  return "?";
}

inline Rules rules_from_string(const std::string& s) {
  if (s == "MB") return Rules::MB;
  if (s == "WC") return Rules::WC;
  if (s == "CW") return Rules::CW;
  if (s == "AE") return Rules::AE;
  fail(ErrorCode::parse_error, "unknown rules tag " + s);
}

inline std::string to_string(Actor a) {
  switch (a) {
    case Actor::maker: return "maker";
    case Actor::breaker: return "breaker";
    case Actor::waiter: return "waiter";
    case Actor::client: return "client";
    case Actor::avoider: return "avoider";
    case Actor::enforcer: return "enforcer";
  }
  return "?";
}

inline Actor actor_from_string(const std::string& s) {
  for (Actor a : {Actor::maker, Actor::breaker, Actor::waiter, Actor::client, Actor::avoider, Actor::enforcer})
    if (to_string(a) == s) return a;
  fail(ErrorCode::parse_error, "unknown actor " + s);
}

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::builder_wins: return "builder-wins";
    case Outcome::blocker_wins: return "blocker-wins";
    case Outcome::ongoing: return "ongoing";
  }
  return "?";
}

// Side a is the side whose holdings are judged against the family:
// Maker, Client, Avoider.  Side b is Breaker, Waiter, Enforcer.
inline Actor actor_of(Rules r, Side s) {
  switch (r) {
    case Rules::MB: return s == Side::a ? Actor::maker : Actor::breaker;
    case Rules::WC:
    case Rules::CW: return s == Side::a ? Actor::client : Actor::waiter;
    case Rules::AE: return s == Side::a ? Actor::avoider : Actor::enforcer;
  }
  return Actor::maker;
}

inline Side side_of(Actor a) {
  return (a == Actor::maker || a == Actor::client || a == Actor::avoider) ? Side::a : Side::b;
}

inline Owner owner_of(Side s) { return s == Side::a ? Owner::a : Owner::b; }

// Elements are the ids 0..size-1.  Graph boards carry the edge for each id.
struct Board {
  int size = 0;
  std::vector<Edge> labels;

  static Board plain(int n) { return Board{n, {}}; }
  static Board of_edges(std::vector<Edge> es) {
    for (auto& e : es) e = make_edge(e.first, e.second);
    int sz = static_cast<int>(es.size());
    return Board{sz, std::move(es)};
  }
  static Board of_graph(const Graph& g) { return of_edges(g.edges()); }
  bool operator==(const Board&) const = default;
};

using Family = std::vector<std::vector<int>>;

struct Move {
  Actor actor;
  std::vector<int> elements;
  bool operator==(const Move&) const = default;
};

struct HistoryEntry {
  int round;
  Move move;
  bool operator==(const HistoryEntry&) const = default;
};

class GameState {
 public:
  GameState() = default;

  static GameState start(Board board, Rules rules, int bias, std::optional<Side> first = std::nullopt) {
    require(board.size > 0, ErrorCode::invalid_configuration, "empty board");
    require(bias >= 1, ErrorCode::invalid_configuration, "bias must be positive");
    require(rules != Rules::AE || bias == 1, ErrorCode::invalid_configuration,
            "Avoider-Enforcer is implemented for the strict (1:1) version only");
    require(!(first && (rules == Rules::WC || rules == Rules::CW)), ErrorCode::invalid_configuration,
            "Waiter always opens an offer game");
    GameState s;
    s.board_ = std::move(board);
    s.rules_ = rules;
    s.bias_ = bias;
    s.owner_.assign(s.board_.size, Owner::free);
    s.free_ = s.board_.size;
    if (rules == Rules::WC || rules == Rules::CW) {
      s.first_ = Side::b;
    } else {
      s.first_ = first.value_or(Side::a);
    }
    s.to_move_ = actor_of(rules, s.first_);
    return s;
  }

  const Board& board() const { return board_; }
  Rules rules() const { return rules_; }
  int bias() const { return bias_; }
  Side first() const { return first_; }
  Actor to_move() const { return to_move_; }
  const std::vector<int>& pending_offer() const { return pending_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  const std::vector<Owner>& owners() const { return owner_; }
  Owner owner(int e) const { return owner_[e]; }
  bool is_free(int e) const { return owner_[e] == Owner::free; }
  int free_count() const { return free_; }
  int count_a() const { return count_a_; }
  int count_b() const { return count_b_; }
  int round() const { return round_; }
  bool finished() const { return free_ == 0 && pending_.empty(); }
  bool offer_game() const { return rules_ == Rules::WC || rules_ == Rules::CW; }

  std::vector<int> free_elements() const {
    std::vector<int> out;
    out.reserve(free_);
    for (int e = 0; e < board_.size; ++e)
      if (owner_[e] == Owner::free) out.push_back(e);
    return out;
  }

  std::vector<int> owned_by(Side s) const {
    std::vector<int> out;
    Owner o = owner_of(s);
    for (int e = 0; e < board_.size; ++e)
      if (owner_[e] == o) out.push_back(e);
    return out;
  }

  // Number of elements the mover must act on in a claiming game.
  int claim_size(Actor a) const {
    if (rules_ == Rules::MB && a == Actor::breaker) return std::min(bias_, free_);
    return std::min(1, free_);
  }

  // True when Waiter is to move but fewer than b+1 elements remain.
  bool leftover_turn() const { return offer_game() && to_move_ == Actor::waiter && free_ > 0 && free_ < bias_ + 1; }

  Actor leftover_receiver() const { return rules_ == Rules::WC ? Actor::waiter : Actor::client; }

  void apply(const Move& mv) {
    require(!finished(), ErrorCode::game_over, "game is finished");
    const auto& els = mv.elements;
    for (int e : els)
      if (e < 0 || e >= board_.size) fail(ErrorCode::illegal_move, "element out of range: " + std::to_string(e));
    require_distinct(els);
    if (!offer_game()) {
      if (mv.actor != to_move_) fail(ErrorCode::illegal_move, to_string(mv.actor) + " is not to move");
      if (static_cast<int>(els.size()) != claim_size(mv.actor))
        fail(ErrorCode::illegal_move, "wrong number of elements for " + to_string(mv.actor));
      for (int e : els) if (owner_[e] != Owner::free) fail(ErrorCode::illegal_move, "element not free: " + std::to_string(e));
      if (side_of(mv.actor) == first_) ++round_;
      Owner o = owner_of(side_of(mv.actor));
      for (int e : els) take(e, o);
      history_.push_back({round_, mv});
      to_move_ = actor_of(rules_, side_of(mv.actor) == Side::a ? Side::b : Side::a);
      return;
    }
    if (to_move_ == Actor::waiter) {
      if (leftover_turn()) {
        if (mv.actor != leftover_receiver())
          fail(ErrorCode::illegal_move, "leftover elements go to " + to_string(leftover_receiver()));
        require(static_cast<int>(els.size()) == free_, ErrorCode::illegal_move, "leftover move must take every free element");
        for (int e : els) if (owner_[e] != Owner::free) fail(ErrorCode::illegal_move, "element not free: " + std::to_string(e));
        ++round_;
        Owner o = owner_of(side_of(mv.actor));
        for (int e : els) take(e, o);
        history_.push_back({round_, mv});
        return;
      }
      require(mv.actor == Actor::waiter, ErrorCode::illegal_move, "Waiter must offer");
      require(static_cast<int>(els.size()) == bias_ + 1, ErrorCode::illegal_move, "offer must contain b+1 elements");
      for (int e : els) if (owner_[e] != Owner::free) fail(ErrorCode::illegal_move, "element not free: " + std::to_string(e));
      ++round_;
      pending_ = els;
      history_.push_back({round_, mv});
      to_move_ = Actor::client;
      return;
    }
    require(mv.actor == Actor::client, ErrorCode::illegal_move, "Client must choose from the offer");
    require(els.size() == 1, ErrorCode::illegal_move, "Client chooses exactly one element");
    require(std::find(pending_.begin(), pending_.end(), els[0]) != pending_.end(), ErrorCode::illegal_move,
            "chosen element not offered: " + std::to_string(els[0]));
    for (int e : pending_) take(e, e == els[0] ? Owner::a : Owner::b);
    pending_.clear();
    history_.push_back({round_, mv});
    to_move_ = Actor::waiter;
  }

  bool operator==(const GameState&) const = default;

 private:
  void take(int e, Owner o) {
    owner_[e] = o;
    --free_;
    (o == Owner::a ? count_a_ : count_b_)++;
  }

  static void require_distinct(const std::vector<int>& els) {
    if (els.size() < 2) return;
    auto copy = els;
    std::sort(copy.begin(), copy.end());
    require(std::adjacent_find(copy.begin(), copy.end()) == copy.end(), ErrorCode::illegal_move, "repeated element in move");
  }

  Board board_;
  Rules rules_ = Rules::MB;
  int bias_ = 1;
  Side first_ = Side::a;
  Actor to_move_ = Actor::maker;
  std::vector<Owner> owner_;
  std::vector<int> pending_;
  std::vector<HistoryEntry> history_;
  int free_ = 0;
  int count_a_ = 0;
  int count_b_ = 0;
  int round_ = 0;
};

inline GameState new_game(Board board, Rules rules, int bias, std::optional<Side> first = std::nullopt) {
  return GameState::start(std::move(board), rules, bias, first);
}

inline GameState apply_move(GameState state, const Move& mv) {
  state.apply(mv);
  return state;
}

namespace detail {
inline void combinations(const std::vector<int>& pool, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(cur.size()) == k) {
      f(cur);
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}
}  // namespace detail

// Enumerates every legal move; intended for small boards.
inline std::vector<Move> legal_moves(const GameState& s) {
  require(!s.finished(), ErrorCode::game_over, "game is finished");
  std::vector<Move> out;
  auto free = s.free_elements();
  if (!s.offer_game()) {
    int k = s.claim_size(s.to_move());
    detail::combinations(free, k, [&](const std::vector<int>& c) { out.push_back({s.to_move(), c}); });
  } else if (s.to_move() == Actor::client) {
    for (int e : s.pending_offer()) out.push_back({Actor::client, {e}});
  } else if (s.leftover_turn()) {
    out.push_back({s.leftover_receiver(), free});
  } else {
    detail::combinations(free, s.bias() + 1, [&](const std::vector<int>& c) { out.push_back({Actor::waiter, c}); });
  }
  return out;
}

inline bool set_owned_by(const GameState& s, const std::vector<int>& set, Owner o) {
  for (int e : set)
    if (s.owner(e) != o) return false;
  return true;
}

inline bool set_touched_by(const GameState& s, const std::vector<int>& set, Owner o) {
  for (int e : set)
    if (s.owner(e) == o) return true;
  return false;
}

inline Outcome outcome(const GameState& s, const Family& family) {
  for (const auto& f : family)
    if (set_owned_by(s, f, Owner::a)) return Outcome::builder_wins;
  if (s.rules() == Rules::AE) return s.finished() ? Outcome::blocker_wins : Outcome::ongoing;
  for (const auto& f : family)
    if (!set_touched_by(s, f, Owner::b)) return Outcome::ongoing;
  return Outcome::blocker_wins;
}

// Role that wins when side a fully claims a winning set.
inline Actor builder_win_role(Rules r) {
  switch (r) {
    case Rules::MB: return Actor::maker;
    case Rules::WC: return Actor::waiter;
    case Rules::CW: return Actor::client;
    case Rules::AE: return Actor::enforcer;
  }
  return Actor::maker;
}

inline Actor blocker_win_role(Rules r) {
  switch (r) {
    case Rules::MB: return Actor::breaker;
    case Rules::WC: return Actor::client;
    case Rules::CW: return Actor::waiter;
    case Rules::AE: return Actor::avoider;
  }
  return Actor::breaker;
}

namespace detail {

struct MaskKey {
  std::uint64_t a, b;
  int turn;
  bool operator==(const MaskKey&) const = default;
};

struct MaskKeyHash {
  std::size_t operator()(const MaskKey& k) const {
    std::uint64_t h = k.a * 0x9E3779B97F4A7C15ULL ^ (k.b + 0x632BE59BD9B4E019ULL + (k.a << 6) + (k.a >> 2));
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(k.turn) * 0xBF58476D1CE4E5B9ULL);
  }
};

// Exhaustive solver over ownership masks.  Returns true iff side a can force a full set.
class Solver {
 public:
  Solver(int size, const Family& family, Rules rules, int bias, Side first, std::size_t budget)
      : size_(size), rules_(rules), bias_(bias), first_(first), budget_(budget) {
    require(size <= 64, ErrorCode::oracle_budget_exceeded, "board too large for exhaustive search");
    for (const auto& f : family) {
      std::uint64_t m = 0;
      for (int e : f) m |= 1ULL << e;
      sets_.push_back(m);
    }
    all_ = size == 64 ? ~0ULL : ((1ULL << size) - 1);
  }

  bool builder_wins() {
    if (rules_ == Rules::WC || rules_ == Rules::CW) return offer_node(0, 0);
    return claim_node(0, 0, first_);
  }

  std::size_t nodes() const { return nodes_; }

 private:
  // 1 = builder already won, 0 = builder cannot win any more, -1 = undecided
  int decided(std::uint64_t a, std::uint64_t b) const {
    bool all_blocked = true;
    for (auto m : sets_) {
      if ((a & m) == m) return 1;
      if (!(b & m)) all_blocked = false;
    }
    if (all_blocked) return 0;
    if ((a | b) == all_) return 0;
    return -1;
  }

  void tick() {
    if (++nodes_ > budget_) fail(ErrorCode::oracle_budget_exceeded, "node budget " + std::to_string(budget_) + " exhausted");
  }

  template <class F>
  void for_each_subset(std::uint64_t freeMask, int k, F&& f) {
    std::vector<int> pool;
    for (int e = 0; e < size_; ++e)
      if (freeMask >> e & 1ULL) pool.push_back(e);
    std::vector<int> idx(k);
    std::function<bool(int, int, std::uint64_t)> rec = [&](int start, int depth, std::uint64_t acc) -> bool {
      if (depth == k) return f(acc);
      for (int i = start; i < static_cast<int>(pool.size()); ++i)
        if (rec(i + 1, depth + 1, acc | (1ULL << pool[i]))) return true;
      return false;
    };
    rec(0, 0, 0);
  }

  bool claim_node(std::uint64_t a, std::uint64_t b, Side turn) {
    int d = decided(a, b);
    if (d >= 0) return d == 1;
    MaskKey key{a, b, turn == Side::a ? 0 : 1};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    tick();
    std::uint64_t freeMask = all_ & ~(a | b);
    int nfree = __builtin_popcountll(freeMask);
    // In MB side a pushes towards a full set; in AE it is Enforcer (side b) who does.
    bool a_wants_full = rules_ != Rules::AE;
    bool result;
    if (turn == Side::a) {
      bool want = a_wants_full;
      result = !want;
      for (int e = 0; e < size_ && result != want; ++e)
        if (freeMask >> e & 1ULL) result = claim_node(a | (1ULL << e), b, Side::b);
    } else {
      int k = rules_ == Rules::MB ? std::min(bias_, nfree) : 1;
      bool want = !a_wants_full;
      bool hit = false;
      for_each_subset(freeMask, k, [&](std::uint64_t pick) {
        if (claim_node(a, b | pick, Side::a) == want) hit = true;
        return hit;
      });
      result = hit ? want : !want;
    }
    memo_.emplace(key, result);
    return result;
  }

  bool offer_node(std::uint64_t a, std::uint64_t b) {
    int d = decided(a, b);
    if (d >= 0) return d == 1;
    MaskKey key{a, b, 2};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    tick();
    std::uint64_t freeMask = all_ & ~(a | b);
    int nfree = __builtin_popcountll(freeMask);
    bool result;
    if (nfree < bias_ + 1) {
      result = rules_ == Rules::WC ? offer_node(a, b | freeMask) : offer_node(a | freeMask, b);
    } else {
      // WC: Waiter (side b) wants side a full; CW: Client (side a) wants it, Waiter opposes.
      bool waiter_wants_full = rules_ == Rules::WC;
      bool waiter_success = false;
      for_each_subset(freeMask, bias_ + 1, [&](std::uint64_t offer) {
        bool client_escape = false;
        for (int e = 0; e < size_ && !client_escape; ++e) {
          if (!(offer >> e & 1ULL)) continue;
          bool full = offer_node(a | (1ULL << e), b | (offer & ~(1ULL << e)));
          if (full != waiter_wants_full) client_escape = true;
        }
        waiter_success = !client_escape;
        return waiter_success;
      });
      result = waiter_success == waiter_wants_full;
    }
    memo_.emplace(key, result);
    return result;
  }

  int size_;
  Rules rules_;
  int bias_;
  Side first_;
  std::size_t budget_;
  std::uint64_t all_ = 0;
  std::vector<std::uint64_t> sets_;
  std::unordered_map<MaskKey, bool, MaskKeyHash> memo_;
  std::size_t nodes_ = 0;
};

}  // namespace detail

inline Actor brute_force_winner(const Board& board, const Family& family, Rules rules, int bias,
                                std::optional<Side> first = std::nullopt, std::size_t budget = 20'000'000) {
  require(board.size > 0, ErrorCode::invalid_configuration, "empty board");
  require(rules != Rules::AE || bias == 1, ErrorCode::invalid_configuration, "Avoider-Enforcer needs bias 1");
  Side f = (rules == Rules::WC || rules == Rules::CW) ? Side::b : first.value_or(Side::a);
  detail::Solver solver(board.size, family, rules, bias, f, budget);
  return solver.builder_wins() ? builder_win_role(rules) : blocker_win_role(rules);
}

struct Transcript {
  Rules rules = Rules::MB;
  int bias = 1;
  Side first = Side::a;
  Board board;
  std::vector<HistoryEntry> moves;
  bool operator==(const Transcript&) const = default;
};

inline Transcript transcript_of(const GameState& s) {
  return Transcript{s.rules(), s.bias(), s.first(), s.board(), s.history()};
}

inline GameState replay(const Transcript& t) {
  std::optional<Side> first;
  if (t.rules == Rules::MB || t.rules == Rules::AE) first = t.first;
  GameState s = new_game(t.board, t.rules, t.bias, first);
  for (const auto& h : t.moves) s.apply(h.move);
  return s;
}

inline nlohmann::json move_line(const HistoryEntry& h) {
  return {{"round", h.round}, {"actor", to_string(h.move.actor)}, {"elements", h.move.elements}};
}

inline nlohmann::json transcript_to_json(const Transcript& t) {
  nlohmann::json moves = nlohmann::json::array();
  for (const auto& h : t.moves) moves.push_back(move_line(h));
  nlohmann::json board = {{"size", t.board.size}};
  if (!t.board.labels.empty()) {
    nlohmann::json es = nlohmann::json::array();
    for (auto [u, v] : t.board.labels) es.push_back({u, v});
    board["edges"] = es;
  }
  return {{"rules", to_string(t.rules)},
          {"bias", t.bias},
          {"first", to_string(actor_of(t.rules, t.first))},
          {"board", board},
          {"moves", moves}};
}

// One JSON object per line: a header line followed by one line per move.
inline std::string transcript_to_jsonl(const Transcript& t) {
  auto j = transcript_to_json(t);
  std::ostringstream os;
  nlohmann::json header = j;
  header.erase("moves");
  os << header.dump() << "\n";
  for (const auto& m : j["moves"]) os << m.dump() << "\n";
  return os.str();
}

inline Transcript transcript_from_json(const nlohmann::json& j) {
  try {
    Transcript t;
    t.rules = rules_from_string(j.at("rules").get<std::string>());
    t.bias = j.at("bias").get<int>();
    t.first = side_of(actor_from_string(j.at("first").get<std::string>()));
    const auto& b = j.at("board");
    t.board.size = b.at("size").get<int>();
    if (b.contains("edges"))
      for (const auto& e : b["edges"]) t.board.labels.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    for (const auto& m : j.at("moves"))
      t.moves.push_back({m.at("round").get<int>(),
                         Move{actor_from_string(m.at("actor").get<std::string>()), m.at("elements").get<std::vector<int>>()}});
    return t;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::parse_error, std::string("transcript: ") + ex.what());
  }
}

inline Transcript transcript_from_jsonl(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  nlohmann::json j;
  bool header = true;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto row = nlohmann::json::parse(line);
      if (header) {
        j = row;
        j["moves"] = nlohmann::json::array();
        header = false;
      } else {
        j["moves"].push_back(row);
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::parse_error, std::string("transcript: ") + ex.what());
  }
  require(!header, ErrorCode::parse_error, "empty transcript");
  return transcript_from_json(j);
}

inline nlohmann::json family_to_json(const Family& f) { return f; }

inline Family family_from_json(const nlohmann::json& j) {
  try {
    return j.get<Family>();
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::parse_error, std::string("family: ") + ex.what());
  }
}

inline void validate_family(const Board& board, const Family& family) {
  for (const auto& f : family) {
    require(!f.empty(), ErrorCode::invalid_configuration, "empty winning set");
    for (int e : f)
      require(e >= 0 && e < board.size, ErrorCode::invalid_configuration, "winning set element outside the board");
  }
}

}  // namespace posgames
