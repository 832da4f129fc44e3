#pragma once

#include <algorithm>
#include <atomic>
#include <climits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"
#include "posgames/params.hpp"
#include "posgames/players.hpp"

namespace posgames {

// Builtin profiles, then <POSGAMES_PROFILE_DIR>/<name>.json.
inline Params profile_params(const std::string& name) {
  if (name == "desk") return Params::desk();
  if (name == "desk-leaves") return Params::desk_leaves();
  if (name == "paper") return Params::paper();
#ifdef POSGAMES_PROFILE_DIR
  std::string path = std::string(POSGAMES_PROFILE_DIR) + "/" + name + ".json";
  if (std::filesystem::exists(path)) return load_params(path);
#endif
  fail(ErrorCode::invalid_configuration, "unknown profile: " + name);
}

// Why a parameter set cannot be played on K_n, if it cannot.
inline std::optional<std::string> simulation_refusal(const Params& p, const std::string& profile) {
  const long need = 1L + p.s_star_size() + p.v2_size();
  std::ostringstream os;
  if (profile == "paper") {
    os << "profile 'paper' holds the asymptotic constants (alpha = " << p.alpha << ", C0 = " << p.C0
       << ") and cannot be simulated: |S*| = " << p.s_star_size() << " and |V2| = " << p.v2_size()
       << " need 1 + |S*| + |V2| = " << need << " vertices";
    if (need > p.n) os << ", more than n = " << p.n;
    os << ", and the board K_n has " << static_cast<long>(p.n) * (p.n - 1) / 2 << " edges";
    return os.str();
  }
  if (p.units() < 1) return "floor(gamma n) is zero";
  if (need > p.n) {
    os << "1 + |S*| + |V2| = " << need << " exceeds n = " << p.n;
    return os.str();
  }
  return std::nullopt;
}

struct ExperimentConfig {
  std::string command = "simulate";
  BuilderKind builder = BuilderKind::maker;
  AdversaryKind adversary = AdversaryKind::random;
  std::string profile = "desk";
  Params params = Params::desk();
  std::vector<std::uint64_t> seeds{1};
  std::string out = "out";
  MatchOptions options;
  bool exact_mode = false;
  int jobs = 1;
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"command", c.command},
          {"builder", to_string(c.builder)},
          {"adversary", to_string(c.adversary)},
          {"profile", c.profile},
          {"params", params_to_json(c.params)},
          {"seeds", c.seeds},
          {"out", c.out},
          {"options",
           {{"partitionBudget", c.options.partition_budget},
            {"splitBudget", c.options.split_budget},
            {"holeBudget", c.options.hole_budget}}},
          {"exactMode", c.exact_mode}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.command = j.value("command", "simulate");
    require(c.command == "simulate", ErrorCode::invalid_configuration, "unsupported command: " + c.command);
    c.builder = builder_from_string(j.at("builder").get<std::string>());
    c.adversary = adversary_from_string(j.at("adversary").get<std::string>());
    c.profile = j.value("profile", "custom");
    c.params = params_from_json(j.at("params"));
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.out = j.value("out", "out");
    if (j.contains("options")) {
      const auto& o = j["options"];
      c.options.partition_budget = o.value("partitionBudget", c.options.partition_budget);
      c.options.split_budget = o.value("splitBudget", c.options.split_budget);
      c.options.hole_budget = o.value("holeBudget", c.options.hole_budget);
    }
    c.exact_mode = j.value("exactMode", false);
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
}

inline std::string match_stem(const ExperimentConfig& c, std::uint64_t seed) {
  return to_string(c.builder) + "-" + to_string(c.adversary) + "-seed" + std::to_string(seed);
}

struct ExperimentRun {
  std::vector<MatchResult> results;
  nlohmann::json summary;
  std::string table;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::invalid_configuration, "cannot write " + path.string());
  out << text;
}

inline std::string summary_table(const ExperimentConfig& c, const std::vector<MatchResult>& rs) {
  std::ostringstream os;
  os << to_string(c.builder) << " vs " << to_string(c.adversary) << ", profile " << c.profile << ", n = " << c.params.n
     << "\n";
  os << std::left << std::setw(8) << "seed" << std::setw(8) << "rounds" << std::setw(13) << "conditioned"
     << std::setw(8) << "failed" << std::setw(8) << "cert" << std::setw(10) << "forfeits" << "flags\n";
  for (const auto& r : rs) {
    std::string flags;
    if (r.flags.partition_failed) flags += "partition ";
    if (r.flags.factor_failed) flags += "factor ";
    if (r.flags.failed_parts) flags += "parts=" + std::to_string(r.flags.failed_parts) + " ";
    if (r.flags.degree_violations) flags += "degree=" + std::to_string(r.flags.degree_violations) + " ";
    if (r.flags.off_board_replies) flags += "offboard=" + std::to_string(r.flags.off_board_replies) + " ";
    os << std::setw(8) << r.seed << std::setw(8) << r.final_state.round() << std::setw(13) << r.conditioned()
       << std::setw(8) << r.conditioned_failures() << std::setw(8) << (r.certificate_ok() ? "ok" : "-")
       << std::setw(10) << r.flags.forfeits.size() << flags << "\n";
  }
  return os.str();
}

}  // namespace detail

// Runs every seed of the config, writing per seed <stem>.json (match result),
// <stem>.transcript.jsonl and <stem>.certificate.json, then summary.json,
// summary.txt and config.json.  Seeds run on `jobs` threads; each match is
// sequential and the outputs do not depend on the thread count.
inline ExperimentRun run_experiment(const ExperimentConfig& c) {
  if (auto why = simulation_refusal(c.params, c.profile)) fail(ErrorCode::invalid_configuration, *why);
  require(!c.seeds.empty(), ErrorCode::invalid_configuration, "no seeds");
  namespace fs = std::filesystem;
  fs::create_directories(c.out);
  MatchOptions opt = c.options;
  if (c.exact_mode) opt.hole_budget = LONG_MAX;

  ExperimentRun run;
  run.results.resize(c.seeds.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(c.seeds.size());
  auto worker = [&] {
    for (std::size_t i; (i = next++) < c.seeds.size();) {
      try {
        auto r = run_match(c.builder, c.adversary, c.params, c.seeds[i], opt);
        std::string stem = match_stem(c, r.seed);
        auto j = match_to_json(r);
        j["transcriptFile"] = stem + ".transcript.jsonl";
        j["certificateFile"] = r.certificate ? nlohmann::json(stem + ".certificate.json") : nlohmann::json(nullptr);
        detail::write_text(fs::path(c.out) / (stem + ".transcript.jsonl"),
                           transcript_to_jsonl(transcript_of(r.final_state)));
        if (r.certificate)
          detail::write_text(fs::path(c.out) / (stem + ".certificate.json"), certificate_to_json(*r.certificate).dump(1) + "\n");
        detail::write_text(fs::path(c.out) / (stem + ".json"), j.dump(1) + "\n");
        run.results[i] = std::move(r);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int jobs = std::clamp(c.jobs, 1, static_cast<int>(c.seeds.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  int conditioned = 0, failures = 0, certOk = 0, forfeits = 0, partition = 0, factor = 0, clean = 0;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : run.results) {
    conditioned += r.conditioned();
    failures += r.conditioned_failures();
    certOk += r.certificate_ok();
    forfeits += static_cast<int>(r.flags.forfeits.size());
    partition += r.flags.partition_failed;
    factor += r.flags.factor_failed;
    clean += r.conditioned_failures() == 0;
    runs.push_back({{"seed", r.seed},
                    {"file", match_stem(c, r.seed) + ".json"},
                    {"conditioned", r.conditioned()},
                    {"conditionedFailures", r.conditioned_failures()},
                    {"certificateOk", r.certificate_ok()},
                    {"flags", flags_to_json(r.flags)}});
  }
  const double total = static_cast<double>(run.results.size());
  run.summary = {{"builder", to_string(c.builder)},
                 {"adversary", to_string(c.adversary)},
                 {"profile", c.profile},
                 {"params", params_to_json(c.params)},
                 {"matches", run.results.size()},
                 {"conditionedChecks", conditioned},
                 {"conditionedFailures", failures},
                 {"conditionedCleanRate", clean / total},
                 {"certificateRate", certOk / total},
                 {"forfeits", forfeits},
                 {"partitionFailed", partition},
                 {"factorFailed", factor},
                 {"runs", runs}};
  run.table = detail::summary_table(c, run.results);
  detail::write_text(fs::path(c.out) / "summary.json", run.summary.dump(1) + "\n");
  detail::write_text(fs::path(c.out) / "summary.txt", run.table);
  detail::write_text(fs::path(c.out) / "config.json", config_to_json(c).dump(1) + "\n");
  return run;
}

}  // namespace posgames
