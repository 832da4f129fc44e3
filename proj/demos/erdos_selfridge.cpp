#include <algorithm>
#include <iostream>

#include "posgames/game.hpp"
#include "posgames/strategy.hpp"

using namespace posgames;

// Breaker follows the potential strategy on a family with sum 2^{1-|F|} < 1,
// while Maker grabs the free element lying in the most sets.
int main() {
  Family fam = {{0, 1, 2, 3}, {3, 4, 5, 6}, {6, 7, 8, 0}, {1, 4, 7, 9}};
  std::cout << "criterion sum 2^{1-|F|} = " << es_criterion(fam) << "\n";
  auto s = new_game(Board::plain(10), Rules::MB, 1);
  while (!s.finished()) {
    if (s.to_move() == Actor::maker) {
      int best = -1, bestCount = -1;
      for (int e : s.free_elements()) {
        int c = 0;
        for (const auto& f : fam) c += std::count(f.begin(), f.end(), e);
        if (c > bestCount) best = e, bestCount = c;
      }
      s.apply({Actor::maker, {best}});
    } else {
      s.apply({Actor::breaker, {es_blocker_move(s, fam)}});
    }
    const auto& h = s.history().back();
    std::cout << "round " << h.round << ": " << to_string(h.move.actor) << " takes " << h.move.elements[0]
              << ", potential " << es_potential(s, fam) << "\n";
  }
  std::cout << "result: " << to_string(outcome(s, fam)) << "\n";
  std::cout << "exhaustive search agrees: " << to_string(brute_force_winner(Board::plain(10), fam, Rules::MB, 1)) << " wins\n";
}
