#include "patchrank/objgraph.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <deque>
#include <unordered_set>
#include <utility>

namespace patchrank {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::kNull: return "null";
    case NodeKind::kPrimitive: return "primitive";
    case NodeKind::kString: return "string";
    case NodeKind::kArray: return "array";
    case NodeKind::kObject: return "object";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
  if (text == "null") return NodeKind::kNull;
  if (text == "primitive") return NodeKind::kPrimitive;
  if (text == "string") return NodeKind::kString;
  if (text == "array") return NodeKind::kArray;
  if (text == "object") return NodeKind::kObject;
  return std::nullopt;
}

std::string_view to_string(GraphRule rule) noexcept {
  switch (rule) {
    case GraphRule::kDuplicateId: return "duplicate id";
    case GraphRule::kDanglingReference: return "dangling reference";
    case GraphRule::kDanglingRoot: return "dangling root";
    case GraphRule::kUnreachable: return "unreachable node";
    case GraphRule::kPayloadShape: return "payload does not match kind";
    case GraphRule::kInvalidUtf8: return "invalid utf-8";
    case GraphRule::kBudgetExceeded: return "node budget exceeded";
  }
  return "?";
}

ObjectNode ObjectNode::null(NodeId id) {
  ObjectNode n;
  n.id = id;
  n.kind = NodeKind::kNull;
  return n;
}

ObjectNode ObjectNode::primitive(NodeId id, std::string type_name, std::string value) {
  ObjectNode n;
  n.id = id;
  n.kind = NodeKind::kPrimitive;
  n.type_name = std::move(type_name);
  n.value = std::move(value);
  return n;
}

ObjectNode ObjectNode::string(NodeId id, std::string value) {
  ObjectNode n;
  n.id = id;
  n.kind = NodeKind::kString;
  n.value = std::move(value);
  return n;
}

ObjectNode ObjectNode::array(NodeId id, std::string component_type, std::vector<NodeId> elements) {
  ObjectNode n;
  n.id = id;
  n.kind = NodeKind::kArray;
  n.type_name = std::move(component_type);
  n.elements = std::move(elements);
  return n;
}

ObjectNode ObjectNode::object(NodeId id, std::string type_name, std::map<std::string, NodeId> fields) {
  ObjectNode n;
  n.id = id;
  n.kind = NodeKind::kObject;
  n.type_name = std::move(type_name);
  n.fields = std::move(fields);
  return n;
}

ObjectGraph::ObjectGraph(std::vector<ObjectNode> nodes, std::vector<NodeId> roots)
    : nodes_(std::move(nodes)), roots_(std::move(roots)) {
  std::stable_sort(nodes_.begin(), nodes_.end(),
                   [](const ObjectNode& a, const ObjectNode& b) { return a.id < b.id; });
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.try_emplace(nodes_[i].id, i);
}

const ObjectNode* ObjectGraph::find(NodeId id) const noexcept {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

std::optional<std::u32string> decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int extra;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
      return std::nullopt;
    }
    if (i + extra >= text.size()) return std::nullopt;
    for (int k = 1; k <= extra; ++k) {
      auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) return std::nullopt;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

namespace {

bool valid_utf8(std::string_view s) { return decode_utf8(s).has_value(); }

std::optional<std::string> shape_problem(const ObjectNode& n) {
  const bool has_type = !n.type_name.empty();
  const bool has_value = !n.value.empty();
  const bool has_elems = !n.elements.empty();
  const bool has_fields = !n.fields.empty();
  switch (n.kind) {
    case NodeKind::kNull:
      if (has_type || has_value || has_elems || has_fields) return "null node carries a payload";
      break;
    case NodeKind::kPrimitive:
      if (!has_type) return "primitive node without type";
      if (has_elems || has_fields) return "primitive node with elements or fields";
      break;
    case NodeKind::kString:
      if (has_type || has_elems || has_fields) return "string node with type, elements or fields";
      break;
    case NodeKind::kArray:
      if (!has_type) return "array node without component type";
      if (has_value || has_fields) return "array node with value or fields";
      break;
    case NodeKind::kObject:
      if (!has_type) return "object node without type";
      if (has_value || has_elems) return "object node with value or elements";
      break;
  }
  return std::nullopt;
}

}  // namespace

std::vector<GraphViolation> validate_graph(const ObjectGraph& graph, std::size_t node_budget) {
  std::vector<GraphViolation> out;
  const auto& nodes = graph.nodes();

  if (nodes.size() > node_budget) {
    out.push_back({std::nullopt, GraphRule::kBudgetExceeded,
                   std::to_string(nodes.size()) + " nodes, budget " + std::to_string(node_budget)});
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ObjectNode& n = nodes[i];
    if (i > 0 && nodes[i - 1].id == n.id) {
      out.push_back({n.id, GraphRule::kDuplicateId, "id " + std::to_string(n.id) + " appears more than once"});
    }
    if (auto problem = shape_problem(n)) {
      out.push_back({n.id, GraphRule::kPayloadShape, *problem});
    }
    bool utf8_ok = valid_utf8(n.type_name) && valid_utf8(n.value);
    for (const auto& [name, target] : n.fields) utf8_ok = utf8_ok && valid_utf8(name);
    if (!utf8_ok) out.push_back({n.id, GraphRule::kInvalidUtf8, "type, value or field name"});

    for (std::size_t k = 0; k < n.elements.size(); ++k) {
      if (!graph.find(n.elements[k])) {
        out.push_back({n.id, GraphRule::kDanglingReference,
                       "element " + std::to_string(k) + " -> " + std::to_string(n.elements[k])});
      }
    }
    for (const auto& [name, target] : n.fields) {
      if (!graph.find(target)) {
        out.push_back({n.id, GraphRule::kDanglingReference,
                       "field '" + name + "' -> " + std::to_string(target)});
      }
    }
  }

  std::unordered_set<NodeId> seen;
  std::deque<NodeId> queue;
  for (std::size_t r = 0; r < graph.roots().size(); ++r) {
    NodeId id = graph.roots()[r];
    if (!graph.find(id)) {
      out.push_back({id, GraphRule::kDanglingRoot, "root " + std::to_string(r) + " -> " + std::to_string(id)});
    } else if (seen.insert(id).second) {
      queue.push_back(id);
    }
  }
  auto visit = [&](NodeId id) {
    if (graph.find(id) && seen.insert(id).second) queue.push_back(id);
  };
  while (!queue.empty()) {
    const ObjectNode* n = graph.find(queue.front());
    queue.pop_front();
    for (NodeId e : n->elements) visit(e);
    for (const auto& [name, target] : n->fields) visit(target);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && nodes[i - 1].id == nodes[i].id) continue;
    if (!seen.contains(nodes[i].id)) {
      out.push_back({nodes[i].id, GraphRule::kUnreachable, "not reachable from any root"});
    }
  }
  return out;
}

std::vector<std::string> validate_document(const SnapshotDocument& doc, std::size_t node_budget) {
  std::vector<std::string> out;
  if (doc.format_version != kFormatVersion) {
    out.push_back("unsupported format version " + std::to_string(doc.format_version));
  }
  if (doc.test_name.empty()) out.push_back("empty test name");
  if (!valid_utf8(doc.test_name) || !valid_utf8(doc.method_name)) {
    out.push_back("test or method name is not valid utf-8");
  }
  for (std::size_t s = 0; s < doc.snapshots.size(); ++s) {
    const Snapshot& snap = doc.snapshots[s];
    if (snap.exit_index != s) {
      out.push_back("snapshot " + std::to_string(s) + ": exit index " + std::to_string(snap.exit_index) +
                    " (expected " + std::to_string(s) + ")");
    }
    for (const GraphViolation& v : validate_graph(snap.graph, node_budget)) {
      std::string line = "snapshot " + std::to_string(s) + ": " + std::string(to_string(v.rule));
      if (v.node) line += " at node " + std::to_string(*v.node);
      line += " (" + v.detail + ")";
      out.push_back(std::move(line));
    }
  }
  return out;
}

std::string canonical_int(std::int64_t v) { return std::to_string(v); }

std::string canonical_bool(bool v) { return v ? "true" : "false"; }

std::string canonical_char(char32_t v) { return std::to_string(static_cast<std::uint32_t>(v)); }

std::string canonical_float(float v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", std::bit_cast<std::uint32_t>(v));
  return buf;
}

std::string canonical_double(double v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

}  // namespace patchrank
