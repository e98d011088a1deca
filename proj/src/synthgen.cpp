#include "patchrank/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "patchrank/error.hpp"

namespace patchrank {

using nlohmann::json;

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  while (true) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

namespace {

std::int64_t signed_between(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

const std::vector<std::string>& leaf_types() {
  static const std::vector<std::string> types{"int", "long", "boolean", "double", "char"};
  return types;
}

std::optional<std::string> draw_value(std::string_view type, Rng& rng) {
  if (type == "boolean") return canonical_bool(uniform_below(rng, 2) == 1);
  if (type == "byte") return canonical_int(signed_between(rng, -128, 127));
  if (type == "short") return canonical_int(signed_between(rng, -1000, 1000));
  if (type == "int") return canonical_int(signed_between(rng, -100, 100));
  if (type == "long") return canonical_int(signed_between(rng, -1'000'000, 1'000'000));
  if (type == "char") return canonical_char(static_cast<char32_t>('a' + uniform_below(rng, 26)));
  if (type == "float") return canonical_float(static_cast<float>(signed_between(rng, -1000, 1000)) / 8.0f);
  if (type == "double") return canonical_double(static_cast<double>(signed_between(rng, -1000, 1000)) / 8.0);
  return std::nullopt;
}

bool redrawable(std::string_view type) {
  static const std::set<std::string_view> known{"boolean", "byte", "short", "int", "long", "char", "float", "double"};
  return known.contains(type);
}

std::string fresh_value(const ObjectNode& leaf, Rng& rng) {
  if (leaf.type_name == "boolean") return canonical_bool(leaf.value != "true");
  while (true) {
    std::string v = *draw_value(leaf.type_name, rng);
    if (v != leaf.value) return v;
  }
}

// Grows one tree-shaped heap (plus occasional back edges to ancestors).
// Node ids are dense, so nodes_[id] is the node with that id.
class HeapBuilder {
 public:
  HeapBuilder(Rng& rng, std::vector<ObjectNode>& nodes) : rng_(rng), nodes_(nodes) {}

  NodeId primitive() {
    const std::string& type = leaf_types()[uniform_below(rng_, leaf_types().size())];
    return add(ObjectNode::primitive(0, type, *draw_value(type, rng_)));
  }

  NodeId object_tree(std::size_t target_nodes, const std::string& type) {
    limit_ = nodes_.size() + target_nodes;
    std::vector<NodeId> ancestors;
    return object(0, type, ancestors);
  }

  void add_field(NodeId obj, const std::string& name, NodeId target) { nodes_[obj].fields[name] = target; }

 private:
  NodeId add(ObjectNode n) {
    n.id = nodes_.size();
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  NodeId object(std::size_t depth, const std::string& type, std::vector<NodeId>& ancestors) {
    NodeId id = add(ObjectNode::object(0, type, {}));
    ancestors.push_back(id);
    std::size_t n_fields = 1 + uniform_below(rng_, 4);
    for (std::size_t k = 0; k < n_fields; ++k) {
      std::string name = "f" + std::to_string(k);
      std::uint64_t roll = uniform_below(rng_, 100);
      NodeId child;
      if (nodes_.size() >= limit_ || roll < 45) {
        child = primitive();
      } else if (roll < 65 && depth < 6) {
        child = object(depth + 1, type + "$" + std::to_string(k), ancestors);
      } else if (roll < 75) {
        std::vector<NodeId> elems;
        std::size_t len = uniform_below(rng_, 5);
        NodeId arr = add(ObjectNode::array(0, "int", {}));
        for (std::size_t e = 0; e < len; ++e) {
          elems.push_back(add(ObjectNode::primitive(0, "int", canonical_int(signed_between(rng_, 0, 9)))));
        }
        nodes_[arr].elements = std::move(elems);
        child = arr;
      } else if (roll < 85) {
        static const char* words[] = {"alpha", "beta", "gamma", "delta", "", "epsilon"};
        child = add(ObjectNode::string(0, words[uniform_below(rng_, 6)]));
      } else if (roll < 90) {
        child = add(ObjectNode::null(0));
      } else if (depth > 0) {
        child = ancestors[uniform_below(rng_, ancestors.size())];
      } else {
        child = primitive();
      }
      nodes_[id].fields[name] = child;
    }
    ancestors.pop_back();
    return id;
  }

  Rng& rng_;
  std::vector<ObjectNode>& nodes_;
  std::size_t limit_ = 0;
};

ObjectGraph make_state_graph(Rng& rng, std::size_t arity, const ScenarioParams& p, const std::string& type_prefix) {
  std::vector<ObjectNode> nodes;
  std::vector<NodeId> roots;
  HeapBuilder builder(rng, nodes);
  for (std::size_t r = 0; r < arity; ++r) {
    // Root 0 is always an object so there is somewhere to add leaves.
    if (r > 0 && uniform_below(rng, 10) < 3) {
      roots.push_back(builder.primitive());
    } else {
      std::size_t target = uniform_between(rng, p.min_nodes, p.max_nodes);
      roots.push_back(builder.object_tree(target, type_prefix + "P" + std::to_string(r)));
    }
  }
  const std::size_t needed = p.edit_noise + 1;
  ObjectGraph g(nodes, roots);
  for (std::size_t pad = 0; perturbable_leaves(g).size() < needed; ++pad) {
    builder.add_field(roots[0], "pad" + std::to_string(pad), builder.primitive());
    g = ObjectGraph(nodes, roots);
  }
  return g;
}

std::vector<Snapshot> repeat(const ObjectGraph& g, std::size_t count) {
  std::vector<Snapshot> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({g, i});
  return out;
}

std::optional<ExtendedRational> parse_rational(const std::string& s) {
  if (s == "inf") return ExtendedRational::infinite();
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::nullopt;
  std::uint64_t num = 0, den = 0;
  auto r1 = std::from_chars(s.data(), s.data() + slash, num);
  auto r2 = std::from_chars(s.data() + slash + 1, s.data() + s.size(), den);
  if (r1.ec != std::errc() || r1.ptr != s.data() + slash || r2.ec != std::errc() || r2.ptr != s.data() + s.size() ||
      den == 0) {
    return std::nullopt;
  }
  return ExtendedRational::finite(num, den);
}

}  // namespace

std::vector<NodeId> perturbable_leaves(const ObjectGraph& graph) {
  // Everything reachable from an array element is compared element-against-
  // element by the edit distance, so a change there need not cost exactly 1.
  std::unordered_set<NodeId> under_array;
  std::vector<NodeId> work;
  for (const ObjectNode& n : graph.nodes()) {
    if (n.kind == NodeKind::kArray) work.insert(work.end(), n.elements.begin(), n.elements.end());
  }
  while (!work.empty()) {
    NodeId id = work.back();
    work.pop_back();
    const ObjectNode* n = graph.find(id);
    if (!n || !under_array.insert(id).second) continue;
    work.insert(work.end(), n->elements.begin(), n->elements.end());
    for (const auto& [name, t] : n->fields) work.push_back(t);
  }

  // Count how often a field-only depth-first walk (cutting at nodes already
  // on the walk, like the distance traversal) reaches each node. Counts are
  // capped at 2 by not descending a third time.
  std::unordered_map<NodeId, int> visits;
  std::unordered_set<NodeId> on_path;
  struct Frame {
    NodeId id;
    std::vector<NodeId> children;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  auto enter = [&](NodeId id) {
    if (on_path.contains(id)) return;
    int& v = visits[id];
    if (++v > 2) return;
    const ObjectNode* n = graph.find(id);
    if (!n || n->kind != NodeKind::kObject) return;
    Frame f{id, {}, 0};
    for (const auto& [name, t] : n->fields) f.children.push_back(t);
    on_path.insert(id);
    stack.push_back(std::move(f));
  };
  for (NodeId r : graph.roots()) {
    enter(r);
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next < top.children.size()) {
        NodeId child = top.children[top.next++];
        enter(child);  // may reallocate `stack`
      } else {
        on_path.erase(top.id);
        stack.pop_back();
      }
    }
  }

  std::vector<NodeId> out;
  for (const ObjectNode& n : graph.nodes()) {
    if (n.kind != NodeKind::kPrimitive || !redrawable(n.type_name)) continue;
    auto it = visits.find(n.id);
    if (it != visits.end() && it->second == 1 && !under_array.contains(n.id)) out.push_back(n.id);
  }
  return out;
}

ObjectGraph perturb_graph(const ObjectGraph& graph, std::uint64_t k, Rng& rng) {
  std::vector<NodeId> leaves = perturbable_leaves(graph);
  if (leaves.size() < k) {
    throw Error(ErrorCode::kInsufficientLeaves,
                "need " + std::to_string(k) + " perturbable leaves, graph has " + std::to_string(leaves.size()));
  }
  for (std::uint64_t i = 0; i < k; ++i) {
    std::swap(leaves[i], leaves[i + uniform_below(rng, leaves.size() - i)]);
  }
  std::vector<ObjectNode> nodes = graph.nodes();
  for (std::uint64_t i = 0; i < k; ++i) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), leaves[i],
                               [](const ObjectNode& n, NodeId id) { return n.id < id; });
    it->value = fresh_value(*it, rng);
  }
  return ObjectGraph(std::move(nodes), graph.roots());
}

void check_params(const ScenarioParams& p) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidParams, what); };
  if (p.n_tests < 2) bad("need at least 2 tests (one passing, one failing)");
  if (p.n_failing < 1 || p.n_failing >= p.n_tests) bad("failing tests must be at least 1 and fewer than the test count");
  if (p.n_patches < 2) bad("need at least 2 patches");
  if (!(p.w_fraction >= 0.0 && p.w_fraction <= 1.0)) bad("w_fraction must lie in [0,1]");
  if (p.min_nodes < 2 || p.max_nodes < p.min_nodes) bad("node range must satisfy 2 <= min <= max");
  if (p.edit_noise > 1000) bad("edit_noise above 1000");
  std::size_t n_w = static_cast<std::size_t>(std::floor(p.w_fraction * static_cast<double>(p.n_patches) + 1e-9));
  if (p.n_patches - n_w < 2) bad("w_fraction leaves fewer than 2 patches outside the W bucket");
}

std::string GroundTruth::to_json() const {
  json j;
  j["planted"] = planted;
  j["w_bucket"] = json::array();
  for (PatchId id : w_bucket) j["w_bucket"].push_back(id);
  json in = json::object();
  for (const auto& [id, tests] : intended) {
    json row = json::object();
    for (const auto& [test, value] : tests) row[test] = value.to_string();
    in[std::to_string(id)] = std::move(row);
  }
  j["intended"] = std::move(in);
  return j.dump(2) + "\n";
}

GroundTruth GroundTruth::from_json(std::string_view text) {
  auto bad = [](const std::string& what) -> Error { return Error(ErrorCode::kMalformedDocument, "ground truth: " + what); };
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw bad("not a JSON object");
  if (!j.contains("planted") || !j["planted"].is_number_unsigned()) throw bad("missing planted id");
  GroundTruth g;
  g.planted = j["planted"].get<PatchId>();
  if (j.contains("w_bucket")) {
    for (const auto& id : j["w_bucket"]) g.w_bucket.insert(id.get<PatchId>());
  }
  if (!j.contains("intended") || !j["intended"].is_object()) throw bad("missing intended distances");
  for (const auto& [key, tests] : j["intended"].items()) {
    PatchId id = std::stoull(key);
    for (const auto& [test, value] : tests.items()) {
      auto r = value.is_string() ? parse_rational(value.get<std::string>()) : std::nullopt;
      if (!r) throw bad("bad value for patch " + key + ", test " + test);
      g.intended[id][test] = *r;
    }
  }
  return g;
}

Scenario generate_scenario(const ScenarioParams& p) {
  check_params(p);
  Rng rng(p.seed);
  Scenario s;

  std::vector<std::string> tests;
  for (std::size_t t = 0; t < p.n_tests; ++t) tests.push_back("com.example.LedgerTest.test" + std::to_string(t));
  std::vector<std::size_t> order(p.n_tests);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < p.n_failing; ++i) std::swap(order[i], order[i + uniform_below(rng, p.n_tests - i)]);
  std::vector<bool> failing(p.n_tests, false);
  for (std::size_t i = 0; i < p.n_failing; ++i) failing[order[i]] = true;
  for (std::size_t t = 0; t < p.n_tests; ++t) {
    if (failing[t]) s.failing_tests.push_back(tests[t]);
  }

  static const char* method_names[] = {"com.example.Ledger.post", "com.example.Ledger.settle",
                                       "com.example.Ledger.audit"};
  const std::size_t n_methods = std::min<std::size_t>(3, p.n_patches);
  std::vector<std::size_t> exits(p.n_tests);
  for (auto& c : exits) c = uniform_between(rng, 1, 3);

  // Original state per (method, test); shared by every patch of that method.
  std::vector<std::vector<ObjectGraph>> original(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::size_t arity = uniform_between(rng, 1, 3);
    for (std::size_t t = 0; t < p.n_tests; ++t) {
      original[m].push_back(make_state_graph(rng, arity, p, "com.example.M" + std::to_string(m)));
    }
  }

  const std::size_t n = p.n_patches;
  std::vector<PatchId> ids(n);
  std::iota(ids.begin(), ids.end(), PatchId{1});
  for (std::size_t i = 0; i < n; ++i) std::swap(ids[i], ids[i + uniform_below(rng, n - i)]);
  const std::size_t n_w = static_cast<std::size_t>(std::floor(p.w_fraction * static_cast<double>(n) + 1e-9));
  s.truth.planted = ids[0];
  const PatchId leader = ids[1];
  for (std::size_t i = 0; i < n_w; ++i) s.truth.w_bucket.insert(ids[2 + i]);

  const std::uint64_t leader_milli = uniform_between(rng, 800, 1000);
  for (PatchId id = 1; id <= n; ++id) {
    const bool planted = id == s.truth.planted;
    const bool in_w = s.truth.w_bucket.contains(id);
    const std::size_t m = uniform_below(rng, n_methods);
    std::uint64_t milli = id == leader ? leader_milli : uniform_between(rng, 50, leader_milli - 10);

    PatchRecord rec;
    rec.id = id;
    rec.susp = static_cast<double>(milli) / 1000.0;
    rec.method = method_names[m];
    rec.class_artifact = "com/example/Ledger.class";
    rec.covering_tests = tests;

    for (std::size_t t = 0; t < p.n_tests; ++t) {
      std::uint64_t k;
      if (planted) {
        k = failing[t] ? p.edit_noise + 1 : 0;
      } else {
        k = failing[t] ? uniform_between(rng, 0, p.edit_noise) : uniform_between(rng, 1, 1 + p.edit_noise);
      }
      const std::size_t c_orig = exits[t];
      std::size_t c_patched = c_orig;
      if (in_w && failing[t]) c_patched = (c_orig >= 2 && uniform_below(rng, 2) == 1) ? c_orig - 1 : c_orig + 1;

      const ObjectGraph& g = original[m][t];
      ObjectGraph changed = perturb_graph(g, k, rng);
      std::string base = "snapshots/p" + std::to_string(id) + "/";
      std::string orig_path = base + "original/" + std::to_string(t) + ".snap";
      std::string patched_path = base + "patched/" + std::to_string(t) + ".snap";
      s.files[orig_path] = SnapshotDocument{kFormatVersion, tests[t], rec.method, repeat(g, c_orig)};
      s.files[patched_path] = SnapshotDocument{kFormatVersion, tests[t], rec.method, repeat(changed, c_patched)};
      s.manifest[id][tests[t]] = {orig_path, patched_path};
      const std::uint64_t pairs = c_orig * c_patched;
      s.truth.intended[id][tests[t]] = ExtendedRational::finite(ExtendedRational::Numerator{k} * pairs, pairs);
    }
    s.patches.push_back(std::move(rec));
  }
  return s;
}

void write_scenario(const Scenario& s, const std::filesystem::path& dir) {
  write_file(dir / kInputCsvName, render_patch_csv(s.patches));
  write_file(dir / kManifestName, encode_manifest(s.manifest));
  std::string failing;
  for (const auto& t : s.failing_tests) failing += t + "\n";
  write_file(dir / kFailingTestsName, failing);
  write_file(dir / kGroundTruthName, s.truth.to_json());
  for (const auto& [rel, doc] : s.files) write_file(dir / rel, encode_snapshot_document(doc));
}

}  // namespace patchrank
