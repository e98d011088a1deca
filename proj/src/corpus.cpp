#include "patchrank/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "patchrank/error.hpp"

namespace patchrank {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

std::optional<PatchId> parse_patch_id(std::string_view s) {
  PatchId v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v == 0) return std::nullopt;
  return v;
}

std::string format_susp(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string where(PatchId id, const std::string& test, const fs::path& file) {
  return "patch " + std::to_string(id) + ", test " + test + ", file " + file.string();
}

}  // namespace

bool is_valid_test_name(std::string_view name) {
  if (name.empty() || name.front() == '.' || name.back() == '.') return false;
  if (name.find('.') == std::string_view::npos) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  });
}

std::vector<PatchRecord> parse_patch_csv(std::string_view text) {
  std::vector<PatchRecord> out;
  std::set<PatchId> seen;
  auto lines = lines_of(text);
  bool first_content = true;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (trim(line).empty()) continue;
    std::string at = "line " + std::to_string(ln + 1);
    if (first_content && trim(line) == kCsvHeader) {
      first_content = false;
      continue;
    }
    first_content = false;

    auto cols = split(line, ',');
    if (cols.size() != 5) {
      throw Error(ErrorCode::kMalformedRow, at + ": expected 5 columns, found " + std::to_string(cols.size()));
    }
    PatchRecord rec;
    auto id = parse_patch_id(trim(cols[0]));
    if (!id) throw Error(ErrorCode::kMalformedRow, at + ": Id '" + std::string(cols[0]) + "' is not a positive integer");
    rec.id = *id;
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorCode::kDuplicatePatchId, at + ": Id " + std::to_string(rec.id) + " already used");
    }

    std::string_view susp = trim(cols[1]);
    auto [ptr, ec] = std::from_chars(susp.data(), susp.data() + susp.size(), rec.susp);
    if (susp.empty() || ec != std::errc() || ptr != susp.data() + susp.size() || !std::isfinite(rec.susp) ||
        rec.susp < 0.0 || rec.susp > 1.0) {
      throw Error(ErrorCode::kInvalidSusp, at + ": Susp '" + std::string(susp) + "' is not a number in [0,1]");
    }

    rec.method = std::string(trim(cols[2]));
    rec.class_artifact = std::string(trim(cols[3]));
    if (rec.method.empty()) throw Error(ErrorCode::kMalformedRow, at + ": empty Method");

    std::string_view tests = trim(cols[4]);
    if (tests.empty()) throw Error(ErrorCode::kMalformedRow, at + ": no covering tests");
    std::set<std::string_view> unique;
    for (std::string_view t : split(tests, ' ')) {
      if (!is_valid_test_name(t)) {
        throw Error(ErrorCode::kInvalidTestName, at + ": '" + std::string(t) + "' is not of the form ClassName.MethodName");
      }
      if (!unique.insert(t).second) {
        throw Error(ErrorCode::kMalformedRow, at + ": covering test " + std::string(t) + " listed twice");
      }
      rec.covering_tests.emplace_back(t);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string render_patch_csv(std::span<const PatchRecord> patches) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const PatchRecord& p : patches) {
    out += std::to_string(p.id) + ',' + format_susp(p.susp) + ',' + p.method + ',' + p.class_artifact + ',';
    for (std::size_t i = 0; i < p.covering_tests.size(); ++i) {
      if (i) out += ' ';
      out += p.covering_tests[i];
    }
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  auto bad = [](const std::string& what) -> Error { return Error(ErrorCode::kMalformedManifest, what); };
  json root = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw bad("not a well-formed JSON document");
  if (!root.is_object() || !root.contains("patches") || !root["patches"].is_object()) {
    throw bad("expected {\"patches\": {...}}");
  }
  Manifest out;
  for (const auto& [key, tests] : root["patches"].items()) {
    auto id = parse_patch_id(key);
    if (!id) throw bad("patch key '" + key + "' is not a positive integer");
    if (!tests.is_object()) throw bad("patch " + key + ": expected an object of tests");
    auto& slot = out[*id];
    for (const auto& [test, files] : tests.items()) {
      if (!files.is_object() || !files.contains("original") || !files.contains("patched") ||
          !files["original"].is_string() || !files["patched"].is_string()) {
        throw bad("patch " + key + ", test " + test + ": expected {\"original\": <path>, \"patched\": <path>}");
      }
      slot[test] = {files["original"].get<std::string>(), files["patched"].get<std::string>()};
    }
  }
  return out;
}

std::string encode_manifest(const Manifest& manifest) {
  json patches = json::object();
  for (const auto& [id, tests] : manifest) {
    json entry = json::object();
    for (const auto& [test, files] : tests) entry[test] = {{"original", files.original}, {"patched", files.patched}};
    patches[std::to_string(id)] = std::move(entry);
  }
  json root = {{"patches", std::move(patches)}};
  return root.dump(2) + "\n";
}

std::vector<std::string> parse_failing_tests(std::string_view text) {
  std::vector<std::string> out;
  auto lines = lines_of(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view t = trim(lines[ln]);
    if (t.empty() || t.front() == '#') continue;
    if (!is_valid_test_name(t)) {
      throw Error(ErrorCode::kInvalidTestName, "failing tests line " + std::to_string(ln + 1) + ": '" +
                                                   std::string(t) + "' is not of the form ClassName.MethodName");
    }
    out.emplace_back(t);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<std::uint64_t> Corpus::snapshot_counts(PatchId patch, Version version) const {
  std::vector<std::uint64_t> counts(tests_.size(), 0);
  auto it = docs_.find(patch);
  if (it == docs_.end()) return counts;
  for (const auto& [t, d] : it->second) {
    counts[t] = (version == Version::kOriginal ? d.original : d.patched).snapshots.size();
  }
  return counts;
}

const SnapshotDocument* Corpus::document(PatchId patch, std::size_t test_index, Version version) const {
  auto it = docs_.find(patch);
  if (it == docs_.end()) return nullptr;
  auto jt = it->second.find(test_index);
  if (jt == it->second.end()) return nullptr;
  return version == Version::kOriginal ? &jt->second.original : &jt->second.patched;
}

std::span<const Snapshot> Corpus::snapshots(PatchId patch, std::size_t test_index, Version version) const {
  const SnapshotDocument* doc = document(patch, test_index, version);
  if (!doc) {
    std::string test = test_index < tests_.size() ? tests_[test_index] : "#" + std::to_string(test_index);
    throw Error(ErrorCode::kMissingSnapshotFile, "patch " + std::to_string(patch) + " has no snapshots for test " + test);
  }
  return doc->snapshots;
}

Corpus load_corpus(const CorpusConfig& config) {
  const fs::path& root = config.corpus_root;
  if (!fs::is_directory(root)) throw Error(ErrorCode::kIo, "corpus directory not found: " + root.string());
  const fs::path csv_path = root / kInputCsvName;
  const fs::path manifest_path = root / kManifestName;
  if (!fs::is_regular_file(csv_path)) throw Error(ErrorCode::kMissingInputCsv, csv_path.string());
  if (!fs::is_regular_file(manifest_path)) throw Error(ErrorCode::kMissingManifest, manifest_path.string());
  if (config.failing_tests.empty()) {
    throw Error(ErrorCode::kMissingFailingTests, "at least one failing test is required");
  }

  Corpus c;
  c.patches_ = parse_patch_csv(read_file(csv_path));
  c.manifest_ = parse_manifest(read_file(manifest_path));

  std::set<std::string> universe(config.failing_tests.begin(), config.failing_tests.end());
  std::set<std::string> covered;
  for (const PatchRecord& p : c.patches_) covered.insert(p.covering_tests.begin(), p.covering_tests.end());
  universe.insert(covered.begin(), covered.end());
  c.tests_.assign(universe.begin(), universe.end());

  for (const std::string& t : c.tests_) c.outcomes_[t] = Outcome::kPassing;
  for (const std::string& t : config.failing_tests) {
    c.outcomes_[t] = Outcome::kFailing;
    if (!covered.contains(t)) c.warnings_.push_back("failing test " + t + " does not cover any patch; ignored");
  }

  std::set<PatchId> csv_ids;
  for (const PatchRecord& p : c.patches_) csv_ids.insert(p.id);
  for (const auto& [id, tests] : c.manifest_) {
    if (!csv_ids.contains(id)) {
      throw Error(ErrorCode::kManifestMismatch, "manifest lists patch " + std::to_string(id) + " absent from " +
                                                    std::string(kInputCsvName));
    }
  }

  struct Job {
    PatchId patch;
    std::size_t test_index;
    Version version;
    fs::path file;
  };
  std::vector<Job> jobs;
  for (const PatchRecord& p : c.patches_) {
    auto mit = c.manifest_.find(p.id);
    if (mit == c.manifest_.end()) {
      throw Error(ErrorCode::kMissingSnapshotFile, "patch " + std::to_string(p.id) + " has no manifest entry");
    }
    const auto& by_test = mit->second;
    for (const auto& [test, files] : by_test) {
      if (std::find(p.covering_tests.begin(), p.covering_tests.end(), test) == p.covering_tests.end()) {
        throw Error(ErrorCode::kManifestMismatch,
                    "patch " + std::to_string(p.id) + ": manifest maps test " + test + " which it does not cover");
      }
    }
    for (const std::string& test : p.covering_tests) {
      auto fit = by_test.find(test);
      if (fit == by_test.end()) {
        throw Error(ErrorCode::kMissingSnapshotFile,
                    "patch " + std::to_string(p.id) + ": no snapshot files mapped for test " + test);
      }
      std::size_t t = std::lower_bound(c.tests_.begin(), c.tests_.end(), test) - c.tests_.begin();
      jobs.push_back({p.id, t, Version::kOriginal, root / fit->second.original});
      jobs.push_back({p.id, t, Version::kPatched, root / fit->second.patched});
    }
  }

  std::vector<SnapshotDocument> decoded(jobs.size());
  detail::parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::string& test = c.tests_[job.test_index];
    if (!fs::is_regular_file(job.file)) {
      throw Error(ErrorCode::kMissingSnapshotFile, where(job.patch, test, job.file) + ": file does not exist");
    }
    try {
      decoded[i] = decode_snapshot_document(read_file(job.file), config.node_budget);
    } catch (const Error& e) {
      throw Error(e.code(), where(job.patch, test, job.file) + ": " + e.what());
    }
    if (decoded[i].test_name != test) {
      throw Error(ErrorCode::kManifestMismatch,
                  where(job.patch, test, job.file) + ": document records test " + decoded[i].test_name);
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& slot = c.docs_[jobs[i].patch][jobs[i].test_index];
    (jobs[i].version == Version::kOriginal ? slot.original : slot.patched) = std::move(decoded[i]);
  }
  return c;
}

std::vector<std::string> validate_corpus(const fs::path& root, std::size_t node_budget) {
  std::vector<std::string> out;
  if (!fs::is_directory(root)) return {"corpus directory not found: " + root.string()};

  std::vector<PatchRecord> patches;
  bool csv_ok = false;
  const fs::path csv_path = root / kInputCsvName;
  if (!fs::is_regular_file(csv_path)) {
    out.push_back(std::string(to_string(ErrorCode::kMissingInputCsv)) + ": " + csv_path.string());
  } else {
    try {
      patches = parse_patch_csv(read_file(csv_path));
      csv_ok = true;
    } catch (const Error& e) {
      out.push_back(csv_path.string() + ": " + e.what());
    }
  }

  Manifest manifest;
  bool manifest_ok = false;
  const fs::path manifest_path = root / kManifestName;
  if (!fs::is_regular_file(manifest_path)) {
    out.push_back(std::string(to_string(ErrorCode::kMissingManifest)) + ": " + manifest_path.string());
  } else {
    try {
      manifest = parse_manifest(read_file(manifest_path));
      manifest_ok = true;
    } catch (const Error& e) {
      out.push_back(manifest_path.string() + ": " + e.what());
    }
  }

  const fs::path failing_path = root / kFailingTestsName;
  if (fs::is_regular_file(failing_path)) {
    try {
      parse_failing_tests(read_file(failing_path));
    } catch (const Error& e) {
      out.push_back(failing_path.string() + ": " + e.what());
    }
  }

  if (csv_ok && manifest_ok) {
    for (const PatchRecord& p : patches) {
      auto it = manifest.find(p.id);
      for (const std::string& t : p.covering_tests) {
        if (it == manifest.end() || !it->second.contains(t)) {
          out.push_back(std::string(to_string(ErrorCode::kMissingSnapshotFile)) + ": patch " + std::to_string(p.id) +
                        " has no snapshot files mapped for test " + t);
        }
      }
    }
    for (const auto& [id, tests] : manifest) {
      auto p = std::find_if(patches.begin(), patches.end(), [&](const PatchRecord& r) { return r.id == id; });
      for (const auto& [test, files] : tests) {
        if (p == patches.end() ||
            std::find(p->covering_tests.begin(), p->covering_tests.end(), test) == p->covering_tests.end()) {
          out.push_back(std::string(to_string(ErrorCode::kManifestMismatch)) + ": patch " + std::to_string(id) +
                        ", test " + test + " is not a covering test in " + std::string(kInputCsvName));
        }
      }
    }
  }

  if (manifest_ok) {
    for (const auto& [id, tests] : manifest) {
      for (const auto& [test, files] : tests) {
        for (const std::string* rel : {&files.original, &files.patched}) {
          fs::path file = root / *rel;
          if (!fs::is_regular_file(file)) {
            out.push_back(std::string(to_string(ErrorCode::kMissingSnapshotFile)) + ": " + where(id, test, file));
            continue;
          }
          try {
            SnapshotDocument doc = decode_snapshot_document(read_file(file), node_budget);
            if (doc.test_name != test) {
              out.push_back(std::string(to_string(ErrorCode::kManifestMismatch)) + ": " + where(id, test, file) +
                            ": document records test " + doc.test_name);
            }
          } catch (const Error& e) {
            out.push_back(where(id, test, file) + ": " + e.what());
          }
        }
      }
    }
  }
  return out;
}

}  // namespace patchrank
