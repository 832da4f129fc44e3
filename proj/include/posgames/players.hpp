#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/adversary.hpp"
#include "posgames/error.hpp"
#include "posgames/game.hpp"
#include "posgames/maker.hpp"
#include "posgames/params.hpp"
#include "posgames/subboards.hpp"
#include "posgames/universality.hpp"
#include "posgames/waiter.hpp"

namespace posgames {

enum class BuilderKind { maker, waiter };

inline std::string to_string(BuilderKind b) { return b == BuilderKind::maker ? "maker" : "waiter"; }

inline BuilderKind builder_from_string(const std::string& s) {
  if (s == "maker") return BuilderKind::maker;
  if (s == "waiter") return BuilderKind::waiter;
  fail(ErrorCode::invalid_configuration, "unknown builder: " + s);
}

struct MatchFlags {
  std::vector<std::string> forfeits;
  bool partition_failed = false;
  bool factor_failed = false;
  int failed_parts = 0;
  int degree_violations = 0;
  int off_board_replies = 0;
};

struct MatchOptions {
  int partition_budget = 20;
  int split_budget = 3;
  long hole_budget = 2000000;
};

struct MatchResult {
  BuilderKind builder = BuilderKind::maker;
  AdversaryKind adversary = AdversaryKind::random;
  std::uint64_t seed = 0;
  GameState final_state;
  MatchFlags flags;
  std::vector<ConditionalCheck> checks;
  std::optional<Certificate> certificate;
  std::optional<CertificateReport> report;
  nlohmann::json plan;
  double seconds = 0;

  bool certificate_ok() const { return report && report->ok(); }
  int conditioned() const {
    int k = 0;
    for (const auto& c : checks) k += c.conditioned();
    return k;
  }
  int conditioned_failures() const {
    int k = 0;
    for (const auto& c : checks) k += c.conditioned() && !c.exit_ok;
    return k;
  }
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Plays one (1:1) game on K_n to board exhaustion, then extracts the
// certificate from the builder's bookkeeping and verifies it against the
// builder's graph.
inline MatchResult run_match(BuilderKind builder, AdversaryKind adversary, const Params& p, std::uint64_t seed,
                             const MatchOptions& opt = {}) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = p.n;
  MatchResult r;
  r.builder = builder;
  r.adversary = adversary;
  r.seed = seed;
  Adversary adv(adversary, n, detail::mix_seed(seed, 2));
  if (builder == BuilderKind::maker) {
    GameState s = GameState::start(complete_board(n), Rules::MB, 1);
    MakerBuilder mk(p, detail::mix_seed(seed, 1), opt.partition_budget);
    DamageHint hint = [&mk](const GameState& st) { return mk.damage(st); };
    while (!s.finished()) {
      bool maker = s.to_move() == Actor::maker;
      int e = maker ? mk.move(s) : adv.claim(s, hint);
      s.apply({s.to_move(), {e}});
      Owner o = maker ? Owner::a : Owner::b;
      mk.observe(s, e, o);
      adv.observe(s, e, o);
    }
    const auto& st = mk.state();
    r.flags.forfeits = st.forfeits;
    r.flags.partition_failed = st.stage == "II" && !st.plan.passed;
    r.flags.factor_failed = !mk.factor_complete();
    r.flags.degree_violations = st.degree_violations;
    r.flags.off_board_replies = mk.off_board_replies();
    r.checks = mk.checks(s);
    r.certificate = mk.certificate();
    if (st.stage == "II") r.plan = plan_to_json(st.plan);
    r.final_state = std::move(s);
  } else {
    GameState s = GameState::start(complete_board(n), Rules::WC, 1);
    WaiterBuilder wt(p, detail::mix_seed(seed, 1), opt.partition_budget, opt.split_budget);
    while (!s.finished()) {
      if (s.leftover_turn()) {
        s.apply({s.leftover_receiver(), s.free_elements()});
        break;
      }
      auto offer = wt.offer(s);
      s.apply({Actor::waiter, offer});
      int c = adv.choose(s);
      s.apply({Actor::client, {c}});
      wt.observe(s, offer, c);
      for (int e : offer) adv.observe(s, e, e == c ? Owner::a : Owner::b);
    }
    const auto& st = wt.state();
    r.flags.forfeits = st.forfeits;
    r.flags.partition_failed = wt.certificate().has_value() && !st.plan.passed;
    r.flags.failed_parts = wt.failed_parts();
    r.flags.factor_failed = wt.failed_parts() > 0;
    r.checks = wt.checks(s);
    r.certificate = wt.certificate();
    if (r.certificate) r.plan = plan_to_json(st.plan);
    r.final_state = std::move(s);
  }
  if (r.certificate) {
    Graph g = owned_graph(r.final_state, n, Owner::a);
    r.report = verify_certificate(g, *r.certificate, p, opt.hole_budget);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline nlohmann::json flags_to_json(const MatchFlags& f) {
  return {{"forfeits", f.forfeits},
          {"partitionFailed", f.partition_failed},
          {"factorFailed", f.factor_failed},
          {"failedParts", f.failed_parts},
          {"degreeViolations", f.degree_violations},
          {"offBoardReplies", f.off_board_replies}};
}

// Match summary without the transcript; seconds is left out so the output is
// reproducible byte for byte.
inline nlohmann::json match_to_json(const MatchResult& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  nlohmann::json j = {{"seed", r.seed},
                      {"builder", to_string(r.builder)},
                      {"adversary", to_string(r.adversary)},
                      {"rounds", r.final_state.round()},
                      {"flags", flags_to_json(r.flags)},
                      {"checks", checks},
                      {"conditioned", r.conditioned()},
                      {"conditionedFailures", r.conditioned_failures()},
                      {"certificateOk", r.certificate_ok()},
                      {"plan", r.plan}};
  j["verifyReport"] = r.report ? report_to_json(*r.report) : nlohmann::json(nullptr);
  return j;
}

}  // namespace posgames
