#include <iostream>

#include "posgames/players.hpp"

using namespace posgames;

// One desk-profile match; prints every conditional check and the certificate verdict.
int main(int argc, char** argv) {
  BuilderKind b = argc > 1 ? builder_from_string(argv[1]) : BuilderKind::maker;
  AdversaryKind a = argc > 2 ? adversary_from_string(argv[2]) : AdversaryKind::random;
  auto r = run_match(b, a, Params::desk(), argc > 3 ? std::stoull(argv[3]) : 1);
  std::cout << to_string(b) << " vs " << to_string(a) << ": " << r.final_state.round() << " rounds, "
            << r.seconds << " s\n";
  for (const auto& c : r.checks)
    std::cout << "  " << c.name << ": entry " << to_string(c.entry) << ", exit " << (c.exit_ok ? "ok" : "violated")
              << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
  if (r.report)
    for (const auto& i : r.report->items)
      std::cout << "  property (" << i.property << ") " << to_string(i.status) << ": " << i.detail << "\n";
  std::cout << "flags " << flags_to_json(r.flags).dump() << "\n";
}
