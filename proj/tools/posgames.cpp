#include <climits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "posgames/experiment.hpp"
#include "posgames/play.hpp"
#include "posgames/tree.hpp"
#include "posgames/universality.hpp"

using namespace posgames;
using nlohmann::json;

namespace {

// Exit codes; documented in README.md.
enum Exit : int {
  kOk = 0,
  kVerdictFailed = 1,
  kUsage = 2,
  kParse = 3,
  kCertificateRejected = 4,
  kDegreeBound = 5,
  kEmbedFailed = 6,
  kInternal = 7,
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  std::string profile;
  std::string params_file;

  void add(CLI::App* app) {
    app->add_option("--profile", profile, "parameter profile: desk, desk-leaves, paper or a file stem in profiles/");
    app->add_option("--params", params_file, "JSON parameter overrides applied on top of the profile");
  }

  bool given() const { return !profile.empty() || !params_file.empty(); }

  Params resolve() const {
    if (!given()) throw Usage("missing profile: pass --profile or --params");
    Params base = profile.empty() ? Params::desk() : profile_params(profile);
    return params_file.empty() ? base : load_params(params_file, base);
  }

  std::string name() const { return profile.empty() ? "custom" : profile; }
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::parse_error, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, path + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::parse_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::invalid_configuration, "cannot write " + path);
  out << text;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(1) << "\n";
  else write_text(out, j.dump(1) + "\n");
}

Tree load_tree(const std::string& path) { return tree_from_json(read_json(path)); }

Graph graph_of_transcript(const Transcript& t, int n) {
  GameState s = replay(t);
  require(!t.board.labels.empty(), ErrorCode::parse_error, "transcript board has no edge labels");
  return owned_graph(s, n, Owner::a);
}

// ---- simulate

struct SimulateFlags {
  ParamFlags params;
  std::string builder = "maker", adversary = "random", out = "out", config;
  std::uint64_t seed = 1;
  int seeds = 1, jobs = 1, partition_budget = 20, split_budget = 3;
  bool exact = false;
};

int cmd_simulate(const SimulateFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = config_from_json(read_json(f.config));
  } else {
    c.params = f.params.resolve();
    c.profile = f.params.name();
    c.builder = builder_from_string(f.builder);
    c.adversary = adversary_from_string(f.adversary);
    if (f.seeds < 1) throw Usage("--seeds must be positive");
    c.seeds.clear();
    for (int i = 0; i < f.seeds; ++i) c.seeds.push_back(f.seed + static_cast<std::uint64_t>(i));
    c.options.partition_budget = f.partition_budget;
    c.options.split_budget = f.split_budget;
    c.exact_mode = f.exact;
  }
  if (f.config.empty() || f.out != "out") c.out = f.out;
  c.jobs = f.jobs;
  if (auto why = simulation_refusal(c.params, c.profile)) throw Usage(*why);
  auto run = run_experiment(c);
  std::cout << run.table;
  std::cout << "conditioned checks " << run.summary["conditionedChecks"] << ", failures "
            << run.summary["conditionedFailures"] << ", certificate rate " << run.summary["certificateRate"]
            << "\nwrote " << c.seeds.size() << " result files to " << c.out << "\n";
  return run.summary["conditionedFailures"].get<int>() == 0 ? kOk : kVerdictFailed;
}

// ---- synth / verify / embed

int cmd_synth(const ParamFlags& pf, std::uint64_t seed, const std::string& out) {
  Params p = pf.resolve();
  auto s = synth_certificate_graph(p, seed);
  std::filesystem::create_directories(out);
  write_text(out + "/graph.json", graph_to_json(s.G).dump() + "\n");
  write_text(out + "/certificate.json", certificate_to_json(s.cert).dump(1) + "\n");
  std::cout << json{{"seedUsed", s.seed_used}, {"attempts", s.attempts}, {"verifyReport", report_to_json(s.report)}}.dump(1)
            << "\n";
  return kOk;
}

int cmd_verify(const ParamFlags& pf, const std::string& graph, const std::string& transcript, const std::string& cert,
               bool exact, const std::string& out) {
  Params p = pf.resolve();
  if (graph.empty() == transcript.empty()) throw Usage("pass exactly one of --graph and --transcript");
  Graph G = graph.empty() ? graph_of_transcript(transcript_from_jsonl(read_text(transcript)), p.n)
                          : graph_from_json(read_json(graph));
  Certificate c = certificate_from_json(read_json(cert));
  auto rep = verify_certificate(G, c, p, exact ? LONG_MAX : 50000000L);
  emit(report_to_json(rep), out);
  return rep.ok() ? kOk : kVerdictFailed;
}

int cmd_embed(const ParamFlags& pf, const std::string& graph, const std::string& cert, const std::string& tree,
              std::uint64_t seed, const std::string& out) {
  Params p = pf.resolve();
  Graph G = graph_from_json(read_json(graph));
  Certificate c = certificate_from_json(read_json(cert));
  Tree T = load_tree(tree);
  if (T.max_degree() > p.d()) {
    std::cerr << "degree bound: max degree " << T.max_degree() << " exceeds d = " << p.d() << "\n";
    return kDegreeBound;
  }
  auto rep = verify_certificate(G, c, p);
  if (auto f = rep.first_failure()) {
    std::cerr << "certificate rejected: property (" << f->property << ") " << to_string(f->status) << ": " << f->detail
              << "\n";
    return kCertificateRejected;
  }
  EmbedOptions opt;
  opt.seed = seed;
  opt.verify = false;
  TreeEmbedding e;
  try {
    e = embed_tree(G, c, p, T, opt);
  } catch (const Error& err) {
    std::cerr << "embedding failed: " << err.what() << "\n";
    return kEmbedFailed;
  }
  auto bad = embedding_violation(G, T, e.g, true);
  json j = {{"case", e.route}, {"classification", to_string(e.classification.kind)}, {"embedding", embedding_to_json(e.g)}};
  if (e.plan) j["routePlan"] = route_plan_to_json(*e.plan);
  if (e.star_x >= 0) j["hub"] = e.star_x;
  j["valid"] = !bad;
  if (!out.empty()) write_text(out, j.dump() + "\n");
  std::cout << "case " << e.route << ": " << (bad ? "invalid, " + *bad : std::string("valid embedding")) << "\n";
  return bad ? kVerdictFailed : kOk;
}

// ---- tree

json check(bool ok, const std::string& what) { return {{"check", what}, {"ok", ok}}; }

bool all_ok(const json& checks) {
  for (const auto& c : checks)
    if (!c["ok"].get<bool>()) return false;
  return true;
}

int cmd_tree(const std::string& sub, const std::string& file, const ParamFlags& pf, int k, int ell, const std::string& out) {
  Tree T = load_tree(file);
  const int n = T.n();
  json j = {{"n", n}, {"maxDegree", T.max_degree()}};
  json checks = json::array();
  if (sub == "classify") {
    Params p = pf.resolve();
    auto c = classify_tree(T, p);
    j["kind"] = to_string(c.kind);
    j["leafCount"] = c.leaf_count;
    checks.push_back(check(T.max_degree() <= p.d(), "max degree <= d = " + std::to_string(p.d())));
    if (c.kind == TreeClassification::Kind::bare_paths) {
      j["barePaths"] = c.paths.size();
      j["ell"] = p.ell();
      checks.push_back(check(c.paths.size() >= p.gamma * n, "bare paths >= gamma n = " + std::to_string(p.gamma * n)));
    } else {
      j["subtree"] = c.subtree;
      j["leafParents"] = c.n1;
      j["coverParts"] = c.cover_parts;
      checks.push_back(check(c.leaf_count >= p.C1() * p.gamma * n, "leaves >= C1 gamma n = " + std::to_string(p.C1() * p.gamma * n)));
      checks.push_back(check(c.subtree.size() <= p.delta() * n, "|T'| <= delta n = " + std::to_string(p.delta() * n)));
      checks.push_back(check(T.induces_subtree(c.subtree), "T' is a subtree"));
      checks.push_back(check(static_cast<int>(c.n1.size()) == static_cast<int>(std::floor(p.C1() * std::log(n))),
                             "leaf parents in T' = floor(C1 log n)"));
    }
  } else if (sub == "split") {
    auto [A, B] = small_subtree_split(T, k);
    std::vector<int> both;
    std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(both));
    j["VA"] = A;
    j["VB"] = B;
    int a = static_cast<int>(A.size());
    checks.push_back(check(k <= a && a < 2 * k, "k <= |V_A| < 2k"));
    checks.push_back(check(both.size() <= 1, "|V_A cap V_B| <= 1"));
    checks.push_back(check(T.induces_subtree(A) && T.induces_subtree(B), "both sides induce trees"));
    checks.push_back(check(static_cast<int>(A.size() + B.size() - both.size()) == n, "V_A cup V_B = V(T)"));
  } else if (sub == "cover") {
    auto parts = subtree_cover(T, k);
    j["parts"] = parts;
    long bound = (n + k - 2) / (k - 1) + 1;
    bool small = true, trees = true;
    for (const auto& P : parts) {
      small = small && static_cast<int>(P.size()) < 2 * k;
      trees = trees && T.induces_subtree(P);
    }
    checks.push_back(check(static_cast<long>(parts.size()) <= bound, "parts <= ceil(n/(k-1)) + 1 = " + std::to_string(bound)));
    checks.push_back(check(small, "every part has fewer than 2k vertices"));
    checks.push_back(check(trees, "every part induces a tree"));
  } else {
    auto paths = find_bare_paths(T, ell);
    int leaves = static_cast<int>(T.leaves().size());
    double bound = (n - (2.0 * leaves - 2) * (ell + 1)) / (ell + 1);
    j["paths"] = paths;
    j["leafCount"] = leaves;
    bool bare = true;
    for (const auto& P : paths) bare = bare && static_cast<int>(P.size()) == ell + 1 && is_bare_path(T, P);
    checks.push_back(check(bare, "every path is bare with ell edges"));
    checks.push_back(check(paths.size() >= bound, "paths >= (n - (2L-2)(ell+1))/(ell+1) = " + std::to_string(bound)));
  }
  j["checks"] = checks;
  emit(j, out);
  return all_ok(checks) ? kOk : kVerdictFailed;
}

// ---- gen-tree

int cmd_gen_tree(const std::string& family, const std::vector<int>& a, std::uint64_t seed, const std::string& out) {
  auto need = [&](std::size_t k, const char* shape) {
    if (a.size() != k) throw Usage(family + " takes " + shape);
  };
  std::mt19937_64 rng(seed);
  Tree T;
  if (family == "path") need(1, "n"), T = trees::path(a[0]);
  else if (family == "star") need(1, "leaves"), T = trees::star(a[0]);
  else if (family == "random") need(1, "n"), T = trees::random(a[0], rng);
  else if (family == "bounded") need(2, "n max_degree"), T = trees::random_bounded(a[0], a[1], rng);
  else if (family == "broom") need(3, "spine leaves per_vertex"), T = trees::broom(a[0], a[1], a[2]);
  else if (family == "caterpillar") need(3, "spine leaves stride"), T = trees::caterpillar(a[0], a[1], a[2]);
  else if (family == "comb") need(4, "n spine tooth stride"), T = trees::subdivided_comb(a[0], a[1], a[2], a[3]);
  else if (family == "hub") need(4, "children per_child spine spine_leaves"), T = trees::hub(a[0], a[1], a[2], a[3]);
  else if (family == "spider") need(2, "legs leg_length"), T = trees::spider(a[0], a[1]);
  else throw Usage("unknown tree family: " + family);
  emit(tree_to_json(T), out);
  return kOk;
}

// ---- play / replay

int cmd_play(const std::string& rules, const std::string& board, const std::string& family, const std::string& human,
             const std::string& transcript) {
  Family fam = family_from_json(read_json(family));
  Board b;
  if (board.empty()) {
    int size = 0;
    for (const auto& f : fam)
      for (int e : f) size = std::max(size, e + 1);
    b = Board::plain(size);
  } else {
    b = board_from_json(read_json(board));
  }
  auto r = play_session(b, fam, rules_from_string(rules), actor_from_string(human), std::cin, std::cout);
  write_text(transcript, transcript_to_jsonl(transcript_of(r.state)));
  std::cout << "transcript: " << transcript << "\n";
  return kOk;
}

int cmd_replay(const std::string& file, const std::string& out) {
  Transcript t = transcript_from_jsonl(read_text(file));
  GameState s = replay(t);
  json j = {{"rules", to_string(t.rules)},
            {"moves", t.moves.size()},
            {"rounds", s.round()},
            {"finished", s.finished()},
            {"sideA", s.owned_by(Side::a)},
            {"sideB", s.owned_by(Side::b)}};
  emit(j, out);
  return kOk;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::parse_error: return kParse;
    case ErrorCode::invalid_configuration:
    case ErrorCode::invalid_parameter:
    case ErrorCode::tree_too_small: return kUsage;
    case ErrorCode::degree_bound_violated: return kDegreeBound;
    default: return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positional games and spanning tree universality toolkit"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "play seeded builder-vs-adversary matches and write result files");
  sim.params.add(simulate);
  simulate->add_option("--builder", sim.builder, "maker or waiter");
  simulate->add_option("--adversary", sim.adversary, "random, greedy-blocker, pair-degree-attacker or isolator");
  simulate->add_option("--seed", sim.seed, "first seed");
  simulate->add_option("--seeds", sim.seeds, "number of consecutive seeds");
  simulate->add_option("--out", sim.out, "output directory");
  simulate->add_option("--jobs", sim.jobs, "parallel matches");
  simulate->add_option("--partition-budget", sim.partition_budget, "preparatory split attempts");
  simulate->add_option("--split-budget", sim.split_budget, "pair-degree split attempts");
  simulate->add_option("--config", sim.config, "re-run a stored config.json");
  simulate->add_flag("--exact-mode", sim.exact, "no node budget for the property (4) search");

  ParamFlags synthP;
  std::uint64_t synthSeed = 1;
  std::string synthOut = "instance";
  auto* synth = app.add_subcommand("synth", "generate a certified graph (graph.json, certificate.json)");
  synthP.add(synth);
  synth->add_option("--seed", synthSeed);
  synth->add_option("--out", synthOut, "output directory");

  ParamFlags verP;
  std::string verGraph, verTranscript, verCert, verOut;
  bool verExact = false;
  auto* verify = app.add_subcommand("verify", "check certificate properties against a graph");
  verP.add(verify);
  verify->add_option("--graph", verGraph, "graph JSON");
  verify->add_option("--transcript", verTranscript, "match transcript; the graph is side a's edges");
  verify->add_option("--cert", verCert, "certificate JSON")->required();
  verify->add_option("--out", verOut, "report file (default stdout)");
  verify->add_flag("--exact-mode", verExact, "no node budget for the property (4) search");

  ParamFlags embP;
  std::string embGraph, embCert, embTree, embOut;
  std::uint64_t embSeed = 1;
  auto* embed = app.add_subcommand("embed", "embed a tree into a certified graph");
  embP.add(embed);
  embed->add_option("--graph", embGraph)->required();
  embed->add_option("--cert", embCert)->required();
  embed->add_option("--tree", embTree)->required();
  embed->add_option("--seed", embSeed);
  embed->add_option("--out", embOut, "embedding file");

  ParamFlags treeP;
  std::string treeSub, treeFile, treeOut;
  int treeK = 0, treeEll = 0;
  auto* tree = app.add_subcommand("tree", "tree lemmas: classify, split, cover, barepaths");
  treeP.add(tree);
  tree->add_option("op", treeSub)->required()->check(CLI::IsMember({"classify", "split", "cover", "barepaths"}));
  tree->add_option("--tree", treeFile)->required();
  tree->add_option("--k", treeK);
  tree->add_option("--ell", treeEll);
  tree->add_option("--out", treeOut);

  std::string genFamily, genOut;
  std::vector<int> genArgs;
  std::uint64_t genSeed = 1;
  auto* gen = app.add_subcommand("gen-tree", "generate a tree: path, star, random, bounded, broom, caterpillar, comb, hub, spider");
  gen->add_option("family", genFamily)->required();
  gen->add_option("shape", genArgs, "family shape integers")->required();
  gen->add_option("--seed", genSeed);
  gen->add_option("--out", genOut);

  std::string playRules = "MB", playBoard, playFamily, playHuman = "breaker", playTranscript = "play.transcript.jsonl";
  auto* play = app.add_subcommand("play", "play a small game at the terminal against the engine");
  play->add_option("--rules", playRules, "MB or WC");
  play->add_option("--board", playBoard, "board JSON ({\"size\": n} or {\"edges\": [...]})");
  play->add_option("--family", playFamily, "winning sets JSON")->required();
  play->add_option("--human", playHuman, "role played at the prompt");
  play->add_option("--transcript", playTranscript);

  std::string repFile, repOut;
  auto* rep = app.add_subcommand("replay", "replay a transcript and print the final position");
  rep->add_option("transcript", repFile)->required();
  rep->add_option("--out", repOut);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*synth) return cmd_synth(synthP, synthSeed, synthOut);
    if (*verify) return cmd_verify(verP, verGraph, verTranscript, verCert, verExact, verOut);
    if (*embed) return cmd_embed(embP, embGraph, embCert, embTree, embSeed, embOut);
    if (*tree) return cmd_tree(treeSub, treeFile, treeP, treeK, treeEll, treeOut);
    if (*gen) return cmd_gen_tree(genFamily, genArgs, genSeed, genOut);
    if (*play) return cmd_play(playRules, playBoard, playFamily, playHuman, playTranscript);
    if (*rep) return cmd_replay(repFile, repOut);
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
