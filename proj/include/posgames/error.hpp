#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posgames {

enum class ErrorCode {
  invalid_configuration,
  game_over,
  illegal_move,
  oracle_budget_exceeded,
  pairing_violated,
  precondition_unmet,
  split_unavailable,
  criterion_unmet,
  strategy_not_found,
  tree_too_small,
  invalid_parameter,
  degree_bound_violated,
  classification_failed,
  extension_failed,
  no_star_matching,
  greedy_stuck,
  randomized_embedding_failed,
  dirac_unmet,
  bad_split,
  hall_violation,
  connector_failed,
  routing_failed,
  accounting_error,
  synthesis_failed,
  partition_failed,
  subgame_failed,
  forfeit,
  parse_error,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_configuration: return "invalid-configuration";
    case ErrorCode::game_over: return "game-over";
    case ErrorCode::illegal_move: return "illegal-move";
    case ErrorCode::oracle_budget_exceeded: return "oracle-budget-exceeded";
    case ErrorCode::pairing_violated: return "pairing-violated";
    case ErrorCode::precondition_unmet: return "precondition-unmet";
    case ErrorCode::split_unavailable: return "split-unavailable";
    case ErrorCode::criterion_unmet: return "criterion-unmet";
    case ErrorCode::strategy_not_found: return "strategy-not-found";
    case ErrorCode::tree_too_small: return "tree-too-small";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::degree_bound_violated: return "degree-bound-violated";
    case ErrorCode::classification_failed: return "classification-failed";
    case ErrorCode::extension_failed: return "extension-failed";
    case ErrorCode::no_star_matching: return "no-star-matching";
    case ErrorCode::greedy_stuck: return "greedy-stuck";
    case ErrorCode::randomized_embedding_failed: return "randomized-embedding-failed";
    case ErrorCode::dirac_unmet: return "dirac-unmet";
    case ErrorCode::bad_split: return "bad-split";
    case ErrorCode::hall_violation: return "hall-violation";
    case ErrorCode::connector_failed: return "connector-failed";
    case ErrorCode::routing_failed: return "routing-failed";
    case ErrorCode::accounting_error: return "accounting-error";
    case ErrorCode::synthesis_failed: return "synthesis-failed";
    case ErrorCode::partition_failed: return "partition-failed";
    case ErrorCode::subgame_failed: return "subgame-failed";
    case ErrorCode::forfeit: return "forfeit";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace posgames
