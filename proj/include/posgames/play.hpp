#pragma once

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/strategy.hpp"

namespace posgames {

inline Board board_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("edges")) {
      std::vector<Edge> es;
      for (const auto& e : j["edges"]) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      return Board::of_edges(std::move(es));
    }
    return Board::plain(j.at("size").get<int>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("board: ") + e.what());
  }
}

// Engine moves for the (1:1) Maker-Breaker and Waiter-Client games, all driven by
// the danger weights of the sets side b has not touched:
//   Maker   claims the free element of largest danger
//   Breaker es_blocker_move
//   Waiter  offers the two free elements of largest danger
//   Client  takes the offered element of smaller danger
inline Move engine_move(const GameState& s, const Family& fam) {
  if (s.leftover_turn()) return {s.leftover_receiver(), s.free_elements()};
  auto w = detail::danger(s.owners(), fam, Owner::b);
  switch (s.to_move()) {
    case Actor::maker: return {Actor::maker, {detail::argmax_free(s.owners(), w)}};
    case Actor::breaker: return {Actor::breaker, {es_blocker_move(s, fam)}};
    case Actor::waiter: {
      auto free = s.free_elements();
      std::stable_sort(free.begin(), free.end(), [&](int x, int y) { return w[x] > w[y]; });
      std::vector<int> offer{free[0], free[1]};
      std::sort(offer.begin(), offer.end());
      return {Actor::waiter, offer};
    }
    case Actor::client: {
      const auto& o = s.pending_offer();
      int pick = o[0];
      for (int e : o)
        if (w[e] < w[pick]) pick = e;
      return {Actor::client, {pick}};
    }
    default: break;
  }
  fail(ErrorCode::invalid_configuration, "no engine for " + to_string(s.to_move()));
}

struct PlayResult {
  GameState state;
  bool quit = false;
  Outcome result = Outcome::ongoing;
};

// Text session: the human plays `human`, the engine the other role.  Each
// human move is one line of element ids ("quit" ends the session); illegal
// input is reported and re-prompted.  End of input counts as quit.
inline PlayResult play_session(const Board& board, const Family& fam, Rules rules, Actor human, std::istream& in,
                               std::ostream& out) {
  require(rules == Rules::MB || rules == Rules::WC, ErrorCode::invalid_configuration,
          "interactive play supports MB and WC");
  validate_family(board, fam);
  PlayResult r;
  r.state = GameState::start(board, rules, 1);
  auto& s = r.state;
  require(actor_of(rules, side_of(human)) == human, ErrorCode::invalid_configuration,
          to_string(human) + " does not play " + to_string(rules));
  auto show = [&] {
    out << "free:";
    for (int e : s.free_elements()) out << ' ' << e;
    if (!s.pending_offer().empty()) {
      out << "  offer:";
      for (int e : s.pending_offer()) out << ' ' << e;
    }
    out << "\n";
  };
  while (!s.finished() && outcome(s, fam) == Outcome::ongoing) {
    if (s.to_move() != human || s.leftover_turn()) {
      Move mv = engine_move(s, fam);
      s.apply(mv);
      out << to_string(mv.actor) << ":";
      for (int e : mv.elements) out << ' ' << e;
      out << "\n";
      continue;
    }
    show();
    out << to_string(human) << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line) || line == "quit" || line == "q") {
      r.quit = true;
      out << "\n";
      break;
    }
    std::istringstream ls(line);
    std::vector<int> els;
    std::string tok;
    bool ok = true;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        els.push_back(std::stoi(tok, &used));
        ok = ok && used == tok.size();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || els.empty()) {
      out << "illegal: expected element ids or quit\n";
      continue;
    }
    try {
      std::sort(els.begin(), els.end());
      s.apply({human, els});
    } catch (const Error& e) {
      out << "illegal: " << e.what() << "\n";
    }
  }
  r.result = outcome(s, fam);
  if (!r.quit) out << "result: " << to_string(r.result) << "\n";
  return r;
}

}  // namespace posgames
