#include "patchrank/cli.hpp"

#include <filesystem>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "patchrank/corpus.hpp"
#include "patchrank/error.hpp"
#include "patchrank/synthgen.hpp"

namespace patchrank::cli {

namespace fs = std::filesystem;

std::string render_rank_csv(const RankedList& ranked) {
  std::string out = "position,patch_id,provenance,score\n";
  for (const RankedEntry& e : ranked) {
    out += std::to_string(e.position) + ',' + std::to_string(e.id) + ',';
    out += e.provenance == Provenance::kWBucket ? std::string("W") : "S" + std::to_string(e.class_index.value_or(0));
    out += ',';
    out += e.score ? e.score->to_string() : "-";
    out += '\n';
  }
  return out;
}

std::string render_plain(const RankedList& ranked) {
  std::string out;
  for (const RankedEntry& e : ranked) out += std::to_string(e.id) + '\n';
  return out;
}

namespace {

struct RankArgs {
  std::string corpus;
  std::string failing_tests;
  std::string output;
  std::string plain;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t node_budget = kDefaultNodeBudget;
};

struct ValidateArgs {
  std::string corpus;
  std::size_t node_budget = kDefaultNodeBudget;
};

struct SynthArgs {
  ScenarioParams params;
  std::string out;
  bool force = false;
};

int cmd_rank(const RankArgs& a, std::ostream& err) {
  const fs::path root = a.corpus;
  if (!fs::is_directory(root)) {
    err << "error: corpus directory not found: " << root.string() << '\n';
    return kExitDataError;
  }
  fs::path failing_path = a.failing_tests.empty() ? root / kFailingTestsName : fs::path(a.failing_tests);
  if (a.failing_tests.empty() && !fs::is_regular_file(failing_path)) {
    err << "error: --failing-tests is required (no " << kFailingTestsName << " in " << root.string() << ")\n";
    return kExitUsage;
  }
  try {
    CorpusConfig config;
    config.corpus_root = root;
    config.failing_tests = parse_failing_tests(read_file(failing_path));
    config.node_budget = a.node_budget;
    config.jobs = a.jobs;
    Corpus corpus = load_corpus(config);
    for (const auto& w : corpus.warnings()) err << "warning: " << w << '\n';

    RankedList ranked = rank_patches(corpus.patches(), corpus, corpus.outcomes(), a.jobs);
    fs::path output = a.output.empty() ? root / "ranked.csv" : fs::path(a.output);
    write_file(output, render_rank_csv(ranked));
    if (!a.plain.empty()) write_file(a.plain, render_plain(ranked));
    err << "ranked " << ranked.size() << " patches -> " << output.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  auto violations = validate_corpus(a.corpus, a.node_budget);
  for (const auto& v : violations) out << v << '\n';
  if (!violations.empty()) {
    err << violations.size() << " violation(s) in " << a.corpus << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& err) {
  try {
    check_params(a.params);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const fs::path dir = a.out;
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!a.force) {
      err << "error: output directory " << dir.string() << " is not empty (use --force to replace it)\n";
      return kExitUsage;
    }
    fs::remove_all(dir);
  }
  try {
    Scenario s = generate_scenario(a.params);
    write_scenario(s, dir);
    err << "wrote " << s.patches.size() << " patches to " << dir.string() << " (planted patch "
        << s.truth.planted << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ranks plausible program-repair patches by object-state similarity", "patchrank"};
  app.require_subcommand(1);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank the patches of a corpus");
  rank_cmd->add_option("--corpus", rank.corpus, "Corpus directory")->required();
  rank_cmd->add_option("--failing-tests", rank.failing_tests,
                       "File with one failing test per line (default: <corpus>/failing-tests.txt)");
  rank_cmd->add_option("--output", rank.output, "Ranked CSV output (default: <corpus>/ranked.csv)");
  rank_cmd->add_option("--plain", rank.plain, "Also write the bare id list, best first");
  rank_cmd->add_option("--jobs", rank.jobs, "Worker threads")->check(CLI::PositiveNumber);
  rank_cmd->add_option("--node-budget", rank.node_budget, "Maximum nodes per snapshot graph")
      ->check(CLI::PositiveNumber);

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check CSV, manifest and snapshot files");
  validate_cmd->add_option("--corpus", validate.corpus, "Corpus directory")->required();
  validate_cmd->add_option("--node-budget", validate.node_budget, "Maximum nodes per snapshot graph")
      ->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with a planted patch");
  synth_cmd->add_option("--seed", synth.params.seed, "RNG seed")->required();
  synth_cmd->add_option("--patches", synth.params.n_patches, "Number of patches")->required();
  synth_cmd->add_option("--tests", synth.params.n_tests, "Number of tests")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--failing", synth.params.n_failing, "Number of failing tests")->capture_default_str();
  synth_cmd->add_option("--edit-noise", synth.params.edit_noise, "Distance spread for non-planted patches")
      ->capture_default_str();
  synth_cmd->add_option("--w-fraction", synth.params.w_fraction, "Share of patches given an exit-count mismatch")
      ->capture_default_str();
  synth_cmd->add_option("--min-nodes", synth.params.min_nodes, "Smallest per-root graph")->capture_default_str();
  synth_cmd->add_option("--max-nodes", synth.params.max_nodes, "Largest per-root graph")->capture_default_str();
  synth_cmd->add_flag("--force", synth.force, "Replace a non-empty output directory");

  std::vector<const char*> argv{"patchrank"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*rank_cmd) return cmd_rank(rank, err);
  if (*validate_cmd) return cmd_validate(validate, out, err);
  return cmd_synth(synth, err);
}

}  // namespace patchrank::cli
