#include "patchrank/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "parallel.hpp"
#include "patchrank/error.hpp"

namespace patchrank {

bool CoverageSignature::all_zero() const {
  return std::all_of(counts.begin(), counts.end(), [](std::uint64_t c) { return c == 0; });
}

SignatureResult coverage_signature(std::span<const std::uint64_t> original_counts,
                                   std::span<const std::uint64_t> patched_counts) {
  if (original_counts.size() != patched_counts.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(original_counts.size()) + " original vs " +
                                                std::to_string(patched_counts.size()) + " patched counts");
  }
  SignatureResult r;
  r.signature.counts.assign(patched_counts.begin(), patched_counts.end());
  r.mismatch = !std::equal(original_counts.begin(), original_counts.end(), patched_counts.begin());
  return r;
}

Partition partition(std::span<const PatchSignature> patches) {
  std::vector<const PatchSignature*> order;
  order.reserve(patches.size());
  for (const auto& p : patches) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

  Partition out;
  std::map<std::vector<std::uint64_t>, std::size_t> class_of;
  for (const PatchSignature* p : order) {
    if (p->mismatch) {
      out.w_bucket.push_back(p->id);
      continue;
    }
    auto [it, fresh] = class_of.try_emplace(p->signature.counts, out.classes.size());
    if (fresh) out.classes.emplace_back();
    out.classes[it->second].push_back(p->id);
  }
  return out;
}

std::vector<ExtendedRational> DistanceMatrix::column(std::size_t col) const {
  std::vector<ExtendedRational> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(at(r, col));
  return out;
}

namespace {

DistanceMatrix prepare_matrix(std::span<const PatchId> cls, const SnapshotSource& source) {
  DistanceMatrix d;
  d.rows.assign(cls.begin(), cls.end());
  std::sort(d.rows.begin(), d.rows.end());
  if (d.rows.empty()) return d;
  auto counts = source.snapshot_counts(d.rows.front(), Version::kPatched);
  auto tests = source.tests();
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] > 0) {
      d.columns.push_back(t);
      d.column_tests.push_back(tests[t]);
    }
  }
  d.entries.resize(d.rows.size() * d.columns.size());
  return d;
}

void fill_matrices(std::span<DistanceMatrix* const> matrices, const SnapshotSource& source, unsigned jobs) {
  struct Cell {
    DistanceMatrix* m;
    std::size_t row;
    std::size_t col;
  };
  std::vector<Cell> cells;
  for (DistanceMatrix* m : matrices) {
    for (std::size_t r = 0; r < m->rows.size(); ++r) {
      for (std::size_t c = 0; c < m->columns.size(); ++c) cells.push_back({m, r, c});
    }
  }
  detail::parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    PatchId id = cell.m->rows[cell.row];
    std::size_t test = cell.m->columns[cell.col];
    cell.m->entries[cell.row * cell.m->columns.size() + cell.col] =
        avg_pair_distance(source.snapshots(id, test, Version::kOriginal), source.snapshots(id, test, Version::kPatched));
  });
}

}  // namespace

DistanceMatrix build_distance_matrix(std::span<const PatchId> cls, const SnapshotSource& source, unsigned jobs) {
  DistanceMatrix d = prepare_matrix(cls, source);
  DistanceMatrix* one[] = {&d};
  fill_matrices(one, source, jobs);
  return d;
}

std::vector<std::uint64_t> column_ranks(std::span<const ExtendedRational> column, Outcome outcome) {
  auto better = [&](const ExtendedRational& a, const ExtendedRational& b) {
    return outcome == Outcome::kPassing ? a < b : a > b;
  };
  std::vector<std::size_t> order(column.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return better(column[a], column[b]); });

  std::vector<std::uint64_t> ranks(column.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    bool tied = k > 0 && column[order[k]] == column[order[k - 1]];
    ranks[order[k]] = tied ? ranks[order[k - 1]] : k + 1;
  }
  return ranks;
}

RankMatrix rank_matrix(const DistanceMatrix& d, const OutcomeTable& outcomes) {
  RankMatrix r;
  r.rows = d.rows.size();
  r.cols = d.columns.size();
  r.entries.resize(r.rows * r.cols);
  for (std::size_t c = 0; c < r.cols; ++c) {
    auto it = outcomes.find(d.column_tests[c]);
    if (it == outcomes.end()) throw std::out_of_range("no outcome for test " + d.column_tests[c]);
    auto col = d.column(c);
    auto ranks = column_ranks(col, it->second);
    for (std::size_t row = 0; row < r.rows; ++row) r.entries[row * r.cols + c] = ranks[row];
  }
  return r;
}

std::vector<ScoredPatch> simsort(const DistanceMatrix& d, const OutcomeTable& outcomes) {
  std::vector<ScoredPatch> out;
  out.reserve(d.rows.size());
  if (d.columns.empty()) {
    for (PatchId id : d.rows) out.push_back({id, std::nullopt});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
  }
  RankMatrix r = rank_matrix(d, outcomes);
  for (std::size_t row = 0; row < r.rows; ++row) {
    ExtendedRational::Numerator sum = 0;
    for (std::size_t c = 0; c < r.cols; ++c) sum += r.at(row, c);
    out.push_back({d.rows[row], ExtendedRational::finite(sum, r.cols)});
  }
  std::sort(out.begin(), out.end(), [](const ScoredPatch& a, const ScoredPatch& b) {
    if (*a.score != *b.score) return *a.score < *b.score;
    return a.id < b.id;
  });
  return out;
}

double max_susp(std::span<const PatchId> seq, const PatchIndex& patches) {
  if (seq.empty()) throw std::invalid_argument("max_susp of an empty sequence");
  double best = patches.at(seq.front()).susp;
  for (PatchId id : seq.subspan(1)) best = std::max(best, patches.at(id).susp);
  return best;
}

RankedList final_ranking(const Partition& part, std::span<const std::vector<ScoredPatch>> sorted_classes,
                         const PatchIndex& patches) {
  if (sorted_classes.size() != part.classes.size()) {
    throw std::invalid_argument("final_ranking: one simsort output per class is required");
  }
  struct Sequence {
    std::vector<ScoredPatch> members;
    std::optional<std::size_t> class_index;  // absent for W singletons
    double max_susp;
    PatchId min_id;
  };
  std::vector<Sequence> seqs;
  for (PatchId id : part.w_bucket) {
    PatchId one[] = {id};
    seqs.push_back({{{id, std::nullopt}}, std::nullopt, max_susp(one, patches), id});
  }
  for (std::size_t k = 0; k < sorted_classes.size(); ++k) {
    const auto& members = sorted_classes[k];
    if (members.empty()) continue;
    std::vector<PatchId> ids;
    for (const auto& m : members) ids.push_back(m.id);
    seqs.push_back({members, k, max_susp(ids, patches), *std::min_element(ids.begin(), ids.end())});
  }
  std::stable_sort(seqs.begin(), seqs.end(), [](const Sequence& a, const Sequence& b) {
    if (a.max_susp != b.max_susp) return a.max_susp > b.max_susp;
    bool a_w = !a.class_index, b_w = !b.class_index;
    if (a_w != b_w) return a_w;
    return a.min_id < b.min_id;
  });

  RankedList out;
  for (const Sequence& s : seqs) {
    for (const ScoredPatch& m : s.members) {
      RankedEntry e;
      e.position = out.size() + 1;
      e.id = m.id;
      e.provenance = s.class_index ? Provenance::kSimSort : Provenance::kWBucket;
      e.score = m.score;
      e.class_index = s.class_index;
      out.push_back(std::move(e));
    }
  }
  return out;
}

RankedList rank_patches(std::span<const PatchRecord> patches, const SnapshotSource& source,
                        const OutcomeTable& outcomes, unsigned jobs) {
  PatchIndex index;
  std::vector<PatchSignature> sigs;
  for (const PatchRecord& p : patches) {
    index.emplace(p.id, p);
    auto r = coverage_signature(source.snapshot_counts(p.id, Version::kOriginal),
                                source.snapshot_counts(p.id, Version::kPatched));
    sigs.push_back({p.id, std::move(r.signature), r.mismatch});
  }
  Partition part = partition(sigs);

  std::vector<DistanceMatrix> matrices;
  matrices.reserve(part.classes.size());
  for (const auto& cls : part.classes) matrices.push_back(prepare_matrix(cls, source));
  std::vector<DistanceMatrix*> handles;
  for (auto& m : matrices) handles.push_back(&m);
  fill_matrices(handles, source, jobs);

  std::vector<std::vector<ScoredPatch>> sorted;
  sorted.reserve(matrices.size());
  for (const auto& m : matrices) sorted.push_back(simsort(m, outcomes));
  return final_ranking(part, sorted, index);
}

}  // namespace patchrank
