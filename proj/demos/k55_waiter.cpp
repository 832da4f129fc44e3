#include <iostream>
#include <random>

#include "posgames/k55.hpp"

using namespace posgames;

// Waiter walks the cached K_{5,5} playbook against a random Client and ends
// with a Client perfect matching.
int main(int argc, char** argv) {
  std::mt19937_64 rng(argc > 1 ? std::stoull(argv[1]) : 1);
  const auto& book = wc_k55_matching_strategy();
  auto s = new_game(k55::board(), Rules::WC, 1);
  for (const k55::Node* n = book.root(); n;) {
    s.apply({Actor::waiter, {n->offer[0], n->offer[1]}});
    int k = static_cast<int>(rng() % 2);
    s.apply({Actor::client, {n->offer[k]}});
    std::cout << "offer (" << n->offer[0] / 5 << "," << n->offer[0] % 5 << ") (" << n->offer[1] / 5 << ","
              << n->offer[1] % 5 << "), Client takes the " << (k ? "second" : "first") << "\n";
    n = n->child[k].get();
  }
  if (s.leftover_turn()) s.apply({s.leftover_receiver(), s.free_elements()});
  std::uint32_t mask = 0;
  for (int e = 0; e < 25; ++e)
    if (s.owner(e) == Owner::a) mask |= 1u << e;
  std::cout << "Client perfect matching:";
  for (int e : k55::extract_matching(mask)) std::cout << " " << e / 5 << "-" << e % 5;
  std::cout << "\n";
}
