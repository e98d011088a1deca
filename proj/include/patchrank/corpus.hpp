#pragma once

// On-disk corpus:
//
//   <root>/input-file.csv       Id,Susp,Method,Class-File,Covering-Tests
//   <root>/manifest.json        {"patches": {"<id>": {"<test>": {"original": <rel>, "patched": <rel>}}}}
//   <root>/failing-tests.txt    optional; one test name per line
//   <root>/snapshots/...        snapshot documents referenced by the manifest

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchrank/objgraph.hpp"
#include "patchrank/ranking.hpp"

namespace patchrank {

inline constexpr std::string_view kInputCsvName = "input-file.csv";
inline constexpr std::string_view kManifestName = "manifest.json";
inline constexpr std::string_view kFailingTestsName = "failing-tests.txt";
inline constexpr std::string_view kCsvHeader = "Id,Susp,Method,Class-File,Covering-Tests";

struct CorpusConfig {
  std::filesystem::path corpus_root;
  std::vector<std::string> failing_tests;
  std::size_t node_budget = kDefaultNodeBudget;
  unsigned jobs = 1;  // threads used to decode snapshot files
};

struct ManifestEntry {
  std::string original;  // paths relative to the corpus root
  std::string patched;

  bool operator==(const ManifestEntry&) const = default;
};

using Manifest = std::map<PatchId, std::map<std::string, ManifestEntry>>;

/// "ClassName.MethodName": no whitespace, at least one dot, dots not at the ends.
bool is_valid_test_name(std::string_view name);

/// Throws Error with kMalformedRow, kDuplicatePatchId, kInvalidSusp or
/// kInvalidTestName; messages carry the 1-based line number.
std::vector<PatchRecord> parse_patch_csv(std::string_view text);
std::string render_patch_csv(std::span<const PatchRecord> patches);

/// Throws Error(kMalformedManifest).
Manifest parse_manifest(std::string_view text);
std::string encode_manifest(const Manifest& manifest);

/// Blank lines and lines starting with '#' are skipped. Throws
/// Error(kInvalidTestName) for a malformed name.
std::vector<std::string> parse_failing_tests(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// A fully decoded and validated corpus. Immutable after load.
class Corpus final : public SnapshotSource {
 public:
  std::span<const PatchRecord> patches() const noexcept { return patches_; }
  const OutcomeTable& outcomes() const noexcept { return outcomes_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const Manifest& manifest() const noexcept { return manifest_; }

  std::span<const std::string> tests() const override { return tests_; }
  /// Canonical order; zero for tests outside the patch's covering list.
  std::vector<std::uint64_t> snapshot_counts(PatchId patch, Version version) const override;
  std::span<const Snapshot> snapshots(PatchId patch, std::size_t test_index, Version version) const override;

  const SnapshotDocument* document(PatchId patch, std::size_t test_index, Version version) const;

 private:
  friend Corpus load_corpus(const CorpusConfig& config);

  struct Documents {
    SnapshotDocument original;
    SnapshotDocument patched;
  };

  std::vector<PatchRecord> patches_;
  std::vector<std::string> tests_;
  OutcomeTable outcomes_;
  Manifest manifest_;
  std::map<PatchId, std::map<std::size_t, Documents>> docs_;
  std::vector<std::string> warnings_;
};

/// All-or-nothing. Throws Error naming patch, test and file on the first
/// problem: kIo, kMissingInputCsv, kMissingManifest, kMissingSnapshotFile,
/// kManifestMismatch, kMissingFailingTests, CSV and snapshot decode errors.
Corpus load_corpus(const CorpusConfig& config);

/// Checks CSV, manifest and every snapshot file without failing fast; one
/// line per violation, empty when the corpus is valid.
std::vector<std::string> validate_corpus(const std::filesystem::path& root,
                                         std::size_t node_budget = kDefaultNodeBudget);

}  // namespace patchrank
