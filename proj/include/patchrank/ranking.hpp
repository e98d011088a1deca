#pragma once

// Patch prioritization.
//
// Patches whose per-test exit counts differ from the original program go to
// the W bucket and are ordered by suspiciousness alone. The rest are grouped
// by their exit-count signature; inside a group, each patch gets a per-test
// rank (closest to the original on passing tests is best, farthest on
// failing tests is best) and groups are sorted by mean rank. Finally W
// singletons and groups are concatenated in decreasing max suspiciousness.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patchrank/distance.hpp"
#include "patchrank/objgraph.hpp"

namespace patchrank {

using PatchId = std::uint64_t;

enum class Outcome { kPassing, kFailing };
enum class Version { kOriginal, kPatched };

struct PatchRecord {
  PatchId id = 0;
  double susp = 0.0;
  std::string method;
  std::string class_artifact;  // opaque pass-through
  std::vector<std::string> covering_tests;

  bool operator==(const PatchRecord&) const = default;
};

using PatchIndex = std::map<PatchId, PatchRecord>;
using OutcomeTable = std::map<std::string, Outcome, std::less<>>;

struct CoverageSignature {
  std::vector<std::uint64_t> counts;

  bool all_zero() const;
  bool operator==(const CoverageSignature&) const = default;
};

struct SignatureResult {
  CoverageSignature signature;
  bool mismatch = false;
};

/// Throws Error(kLengthMismatch) if the lists differ in length.
SignatureResult coverage_signature(std::span<const std::uint64_t> original_counts,
                                   std::span<const std::uint64_t> patched_counts);

struct PatchSignature {
  PatchId id = 0;
  CoverageSignature signature;
  bool mismatch = false;
};

struct Partition {
  std::vector<PatchId> w_bucket;             // ascending id
  std::vector<std::vector<PatchId>> classes;  // by first-seen id; members ascending
};

Partition partition(std::span<const PatchSignature> patches);

/// Read access to a loaded corpus. Test indices refer to `tests()`.
class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual std::span<const std::string> tests() const = 0;
  virtual std::vector<std::uint64_t> snapshot_counts(PatchId patch, Version version) const = 0;
  /// Throws Error(kMissingSnapshotFile) if the patch has no documents for the test.
  virtual std::span<const Snapshot> snapshots(PatchId patch, std::size_t test_index, Version version) const = 0;
};

struct DistanceMatrix {
  std::vector<PatchId> rows;          // ascending patch id
  std::vector<std::size_t> columns;   // active test indices, canonical order
  std::vector<std::string> column_tests;
  std::vector<ExtendedRational> entries;  // row-major

  const ExtendedRational& at(std::size_t row, std::size_t col) const { return entries[row * columns.size() + col]; }
  std::vector<ExtendedRational> column(std::size_t col) const;
};

/// Active columns are the tests with a non-zero exit count in the class
/// signature. Entries are computed on up to `jobs` threads.
DistanceMatrix build_distance_matrix(std::span<const PatchId> cls, const SnapshotSource& source, unsigned jobs = 1);

/// Competition ranks ("1,1,3"): each entry gets 1 + the number of strictly
/// better entries. Smaller is better on passing tests, larger on failing.
std::vector<std::uint64_t> column_ranks(std::span<const ExtendedRational> column, Outcome outcome);

struct RankMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> entries;  // row-major

  std::uint64_t at(std::size_t row, std::size_t col) const { return entries[row * cols + col]; }
};

/// Throws std::out_of_range if a column's test has no outcome.
RankMatrix rank_matrix(const DistanceMatrix& d, const OutcomeTable& outcomes);

struct ScoredPatch {
  PatchId id = 0;
  std::optional<ExtendedRational> score;  // mean rank; absent when no active columns
};

/// Best first: ascending mean rank, ties by ascending id.
std::vector<ScoredPatch> simsort(const DistanceMatrix& d, const OutcomeTable& outcomes);

double max_susp(std::span<const PatchId> seq, const PatchIndex& patches);

enum class Provenance { kWBucket, kSimSort };

struct RankedEntry {
  std::size_t position = 0;  // 1-based
  PatchId id = 0;
  Provenance provenance = Provenance::kWBucket;
  std::optional<ExtendedRational> score;
  std::optional<std::size_t> class_index;  // index into Partition::classes
};

using RankedList = std::vector<RankedEntry>;

/// `sorted_classes[k]` is the simsort output of `part.classes[k]`.
RankedList final_ranking(const Partition& part, std::span<const std::vector<ScoredPatch>> sorted_classes,
                         const PatchIndex& patches);

/// Whole pipeline over a loaded corpus. Output does not depend on `jobs`.
RankedList rank_patches(std::span<const PatchRecord> patches, const SnapshotSource& source,
                        const OutcomeTable& outcomes, unsigned jobs = 1);

}  // namespace patchrank
