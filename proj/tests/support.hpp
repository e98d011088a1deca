#pragma once

// Test-only oracles and generators. Nothing here calls into the distance
// implementation, so it can be used to check it.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "patchrank/objgraph.hpp"

namespace testing {

using patchrank::NodeId;
using patchrank::ObjectGraph;
using patchrank::ObjectNode;

// Edit distance straight from its recursive definition, no memo.
template <class Seq>
std::uint64_t recursive_edit_distance(const Seq& a, std::size_t i, const Seq& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::uint64_t del = recursive_edit_distance(a, i + 1, b, j) + 1;
  std::uint64_t ins = recursive_edit_distance(a, i, b, j + 1) + 1;
  std::uint64_t sub = recursive_edit_distance(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  return std::min({del, ins, sub});
}

template <class Seq>
std::uint64_t recursive_edit_distance(const Seq& a, const Seq& b) {
  return recursive_edit_distance(a, 0, b, 0);
}

// Breadth-first search over edit scripts: shortest number of single-symbol
// insertions, deletions and substitutions from `source` to every string of
// length <= max_len over `alphabet`. Some optimal script never exceeds
// max(|a|, |b|) symbols (delete first, insert last), so the search space
// can be capped at max_len.
inline std::unordered_map<std::string, std::uint64_t> edit_script_bfs(const std::string& source,
                                                                      const std::string& alphabet,
                                                                      std::size_t max_len) {
  std::unordered_map<std::string, std::uint64_t> dist{{source, 0}};
  std::deque<std::string> queue{source};
  while (!queue.empty()) {
    std::string s = queue.front();
    queue.pop_front();
    const std::uint64_t d = dist[s];
    auto relax = [&](std::string t) {
      if (dist.try_emplace(t, d + 1).second) queue.push_back(std::move(t));
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::string del = s;
      del.erase(i, 1);
      relax(del);
      for (char c : alphabet) {
        if (c == s[i]) continue;
        std::string sub = s;
        sub[i] = c;
        relax(sub);
      }
    }
    if (s.size() < max_len) {
      for (std::size_t i = 0; i <= s.size(); ++i) {
        for (char c : alphabet) {
          std::string ins = s;
          ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(i), c);
          relax(ins);
        }
      }
    }
  }
  return dist;
}

inline std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::vector<std::string> layer{""};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto& s : layer) {
      for (char c : alphabet) next.push_back(s + c);
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

struct GraphGenOptions {
  std::size_t max_depth = 8;
  std::size_t max_nodes = 24;
  int share_percent = 10;  // references to an existing node (sharing / cycles)
};

// Random object graph with every node kind, shared substructure and cycles.
// Type and field names come from tiny pools so unrelated graphs still meet
// on equal types.
class RandomGraphs {
 public:
  explicit RandomGraphs(std::uint64_t seed) : rng_(seed) {}

  ObjectGraph make(const GraphGenOptions& opt = {}) {
    nodes_.clear();
    opt_ = opt;
    std::size_t arity = 1 + pick(2);
    std::vector<NodeId> roots;
    for (std::size_t r = 0; r < arity; ++r) roots.push_back(node(0));
    return ObjectGraph(nodes_, roots);
  }

  // Similar graph: a few values changed, an array resized, a field retargeted.
  ObjectGraph mutate(const ObjectGraph& g) {
    std::vector<ObjectNode> nodes = g.nodes();
    std::size_t edits = 1 + pick(3);
    for (std::size_t e = 0; e < edits && !nodes.empty(); ++e) {
      ObjectNode& n = nodes[pick(nodes.size())];
      switch (n.kind) {
        case patchrank::NodeKind::kPrimitive:
          n.value = std::to_string(pick(4));
          break;
        case patchrank::NodeKind::kString:
          n.value += "x";
          break;
        case patchrank::NodeKind::kArray:
          if (!n.elements.empty() && pick(2) == 0) {
            n.elements.pop_back();
          } else {
            n.elements.push_back(nodes[pick(nodes.size())].id);
          }
          break;
        case patchrank::NodeKind::kObject:
          if (!n.fields.empty()) {
            auto it = n.fields.begin();
            std::advance(it, pick(n.fields.size()));
            it->second = nodes[pick(nodes.size())].id;
          }
          break;
        case patchrank::NodeKind::kNull:
          break;
      }
    }
    return ObjectGraph(std::move(nodes), g.roots());
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  NodeId node(std::size_t depth) {
    if (!nodes_.empty() && pick(100) < static_cast<std::size_t>(opt_.share_percent)) {
      return nodes_[pick(nodes_.size())].id;
    }
    static const char* types[] = {"A", "B"};
    static const char* prims[] = {"int", "boolean"};
    NodeId id = nodes_.size();
    bool leaf_only = depth + 1 >= opt_.max_depth || nodes_.size() >= opt_.max_nodes;
    std::size_t roll = leaf_only ? pick(3) : pick(5);
    switch (roll) {
      case 0:
        nodes_.push_back(ObjectNode::null(id));
        break;
      case 1:
        nodes_.push_back(ObjectNode::primitive(id, prims[pick(2)], std::to_string(pick(3))));
        break;
      case 2:
        nodes_.push_back(ObjectNode::string(id, std::string(pick(3), "ab"[pick(2)])));
        break;
      case 3: {
        nodes_.push_back(ObjectNode::array(id, types[pick(2)], {}));
        std::size_t len = pick(4);
        std::vector<NodeId> elems;
        for (std::size_t k = 0; k < len; ++k) elems.push_back(node(depth + 1));
        nodes_[id].elements = std::move(elems);
        break;
      }
      default: {
        nodes_.push_back(ObjectNode::object(id, types[pick(2)], {}));
        static const char* names[] = {"x", "y", "z", "next"};
        std::size_t n_fields = 1 + pick(3);
        std::map<std::string, NodeId> fields;
        for (std::size_t k = 0; k < n_fields; ++k) {
          const char* name = names[pick(4)];
          if (!fields.contains(name)) fields[name] = node(depth + 1);
        }
        nodes_[id].fields = std::move(fields);
        break;
      }
    }
    return id;
  }

  std::mt19937_64 rng_;
  std::vector<ObjectNode> nodes_;
  GraphGenOptions opt_;
};

inline bool has_cycle(const ObjectGraph& g) {
  // colour-marking DFS, iterative
  std::unordered_map<NodeId, int> colour;
  for (const ObjectNode& start : g.nodes()) {
    if (colour[start.id] != 0) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{start.id, 0}};
    colour[start.id] = 1;
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const ObjectNode* n = g.find(id);
      std::vector<NodeId> out = n->elements;
      for (const auto& [k, t] : n->fields) out.push_back(t);
      if (next < out.size()) {
        NodeId t = out[next++];
        if (colour[t] == 1) return true;
        if (colour[t] == 0) {
          colour[t] = 1;
          stack.push_back({t, 0});
        }
      } else {
        colour[id] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("patchrank-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
