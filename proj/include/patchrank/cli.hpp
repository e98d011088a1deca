#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "patchrank/ranking.hpp"

namespace patchrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Diagnostics go to `err`; `out` only carries requested data.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// position,patch_id,provenance,score
std::string render_rank_csv(const RankedList& ranked);
/// One patch id per line, best first.
std::string render_plain(const RankedList& ranked);

}  // namespace patchrank::cli
