#pragma once

// Seeded synthetic corpora with a planted "correct" patch.
//
// Every non-W patch shares one exit-count signature, so they form a single
// class. Patched snapshots are copies of the original ones with exactly k
// primitive leaves changed, which makes every realized distance equal to
// its intended value. The planted patch has distance 0 on passing tests and
// the largest intended distance on failing tests, and its suspiciousness is
// strictly below the maximum.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "patchrank/corpus.hpp"
#include "patchrank/distance.hpp"
#include "patchrank/objgraph.hpp"
#include "patchrank/ranking.hpp"

namespace patchrank {

inline constexpr std::string_view kGroundTruthName = "ground-truth.json";

using Rng = std::mt19937_64;

/// Uniform in [0, bound); bound must be positive. Portable across standard
/// libraries, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);
std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi);  // inclusive

struct ScenarioParams {
  std::uint64_t seed = 0;
  std::size_t n_patches = 10;
  std::size_t n_tests = 6;
  std::size_t n_failing = 1;
  std::size_t min_nodes = 8;  // per-root graph size range
  std::size_t max_nodes = 24;
  std::uint64_t edit_noise = 0;
  double w_fraction = 0.2;
};

/// Throws Error(kInvalidParams).
void check_params(const ScenarioParams& params);

struct GroundTruth {
  PatchId planted = 0;
  std::set<PatchId> w_bucket;
  std::map<PatchId, std::map<std::string, ExtendedRational>> intended;

  std::string to_json() const;
  static GroundTruth from_json(std::string_view text);
};

struct Scenario {
  std::vector<PatchRecord> patches;  // ascending id
  std::vector<std::string> failing_tests;
  Manifest manifest;
  std::map<std::string, SnapshotDocument> files;  // relative path -> document
  GroundTruth truth;
};

Scenario generate_scenario(const ScenarioParams& params);

/// Writes the corpus layout plus failing-tests.txt and ground-truth.json.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// Primitive leaves whose change moves the distance to the original by
/// exactly one: reached along a single path of object fields, never through
/// an array, and with a type this generator knows how to re-draw.
std::vector<NodeId> perturbable_leaves(const ObjectGraph& graph);

/// Copy of `graph` with exactly `k` perturbable leaves given fresh unequal
/// values of the same type. Throws Error(kInsufficientLeaves).
ObjectGraph perturb_graph(const ObjectGraph& graph, std::uint64_t k, Rng& rng);

}  // namespace patchrank
