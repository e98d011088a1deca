#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "patchrank/error.hpp"
#include "patchrank/objgraph.hpp"

namespace patchrank {

using nlohmann::json;

namespace {

std::string quoted(const std::string& s) { return json(s).dump(); }

void append_id_list(std::string& out, const std::vector<NodeId>& ids) {
  out += '[';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  out += ']';
}

void append_node(std::string& out, const ObjectNode& n) {
  out += "{\"id\":";
  out += std::to_string(n.id);
  out += ",\"kind\":\"";
  out += to_string(n.kind);
  out += '"';
  switch (n.kind) {
    case NodeKind::kNull:
      break;
    case NodeKind::kPrimitive:
      out += ",\"type\":" + quoted(n.type_name) + ",\"value\":" + quoted(n.value);
      break;
    case NodeKind::kString:
      out += ",\"value\":" + quoted(n.value);
      break;
    case NodeKind::kArray:
      out += ",\"type\":" + quoted(n.type_name) + ",\"elems\":";
      append_id_list(out, n.elements);
      break;
    case NodeKind::kObject: {
      out += ",\"type\":" + quoted(n.type_name) + ",\"fields\":{";
      bool first = true;
      for (const auto& [name, target] : n.fields) {  // std::map: lexicographic
        if (!first) out += ',';
        first = false;
        out += quoted(name) + ':' + std::to_string(target);
      }
      out += '}';
      break;
    }
  }
  out += '}';
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedDocument, what); }

// Tracks keys per open JSON object so duplicate keys are caught; the DOM
// parser would otherwise keep the last one silently.
struct DuplicateKeyGuard {
  struct Level {
    std::string name;
    std::set<std::string> keys;
  };
  std::vector<Level> stack;
  std::string pending_key;
  std::optional<std::pair<std::string, std::string>> duplicate;  // (container, key)

  bool operator()(int /*depth*/, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        stack.push_back({pending_key, {}});
        break;
      case json::parse_event_t::object_end:
        if (!stack.empty()) stack.pop_back();
        break;
      case json::parse_event_t::key: {
        pending_key = parsed.get<std::string>();
        if (!stack.empty() && !stack.back().keys.insert(pending_key).second && !duplicate) {
          duplicate.emplace(stack.back().name, pending_key);
        }
        break;
      }
      default:
        break;
    }
    return true;
  }
};

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where + ": missing key \"" + key + "\"");
  return *it;
}

NodeId require_id(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) malformed(where + ": expected a non-negative integer id");
  return v.get<NodeId>();
}

std::string require_string(const json& v, const std::string& where) {
  if (!v.is_string()) malformed(where + ": expected a string");
  return v.get<std::string>();
}

std::vector<NodeId> require_id_list(const json& v, const std::string& where) {
  if (!v.is_array()) malformed(where + ": expected an array of ids");
  std::vector<NodeId> out;
  out.reserve(v.size());
  for (const json& e : v) out.push_back(require_id(e, where));
  return out;
}

ObjectNode decode_node(const json& j, const std::string& where) {
  if (!j.is_object()) malformed(where + ": node is not an object");
  NodeId id = require_id(require(j, "id", where), where + ".id");
  std::string at = where + " (id " + std::to_string(id) + ")";
  auto kind = parse_node_kind(require_string(require(j, "kind", at), at + ".kind"));
  if (!kind) malformed(at + ": unknown kind");

  std::set<std::string> allowed{"id", "kind"};
  ObjectNode node;
  switch (*kind) {
    case NodeKind::kNull:
      node = ObjectNode::null(id);
      break;
    case NodeKind::kPrimitive:
      allowed.insert({"type", "value"});
      node = ObjectNode::primitive(id, require_string(require(j, "type", at), at + ".type"),
                                   require_string(require(j, "value", at), at + ".value"));
      break;
    case NodeKind::kString:
      allowed.insert("value");
      node = ObjectNode::string(id, require_string(require(j, "value", at), at + ".value"));
      break;
    case NodeKind::kArray:
      allowed.insert({"type", "elems"});
      node = ObjectNode::array(id, require_string(require(j, "type", at), at + ".type"),
                               require_id_list(require(j, "elems", at), at + ".elems"));
      break;
    case NodeKind::kObject: {
      allowed.insert({"type", "fields"});
      const json& fields = require(j, "fields", at);
      if (!fields.is_object()) malformed(at + ".fields: expected an object");
      std::map<std::string, NodeId> f;
      for (const auto& [name, target] : fields.items()) {
        f.emplace(name, require_id(target, at + ".fields." + name));
      }
      node = ObjectNode::object(id, require_string(require(j, "type", at), at + ".type"), std::move(f));
      break;
    }
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) malformed(at + ": unexpected key \"" + key + "\" for kind " + std::string(to_string(*kind)));
  }
  return node;
}

}  // namespace

std::string encode_snapshot_document(const SnapshotDocument& doc, std::size_t node_budget) {
  if (auto problems = validate_document(doc, node_budget); !problems.empty()) {
    throw Error(ErrorCode::kInvariantViolation, problems.front());
  }
  std::string out;
  out += "{\"version\":" + std::to_string(doc.format_version);
  out += ",\"test\":" + quoted(doc.test_name);
  out += ",\"method\":" + quoted(doc.method_name);
  out += ",\"snapshots\":[";
  for (std::size_t s = 0; s < doc.snapshots.size(); ++s) {
    const Snapshot& snap = doc.snapshots[s];
    out += s ? ",\n" : "\n";
    out += "{\"exit\":" + std::to_string(snap.exit_index) + ",\"roots\":";
    append_id_list(out, snap.graph.roots());
    out += ",\"nodes\":[";
    const auto& nodes = snap.graph.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      out += i ? ",\n" : "\n";
      append_node(out, nodes[i]);
    }
    out += nodes.empty() ? "]}" : "\n]}";
  }
  out += doc.snapshots.empty() ? "]}\n" : "\n]}\n";
  return out;
}

SnapshotDocument decode_snapshot_document(std::string_view bytes, std::size_t node_budget) {
  DuplicateKeyGuard guard;
  json root = json::parse(bytes.begin(), bytes.end(), std::ref(guard), /*allow_exceptions=*/false);
  if (root.is_discarded()) malformed("not a well-formed JSON document");
  if (guard.duplicate) {
    const auto& [container, key] = *guard.duplicate;
    if (container == "fields") {
      throw Error(ErrorCode::kInvariantViolation, "duplicate field name \"" + key + "\"");
    }
    malformed("duplicate key \"" + key + "\"");
  }
  if (!root.is_object()) malformed("top level is not an object");

  const json& version = require(root, "version", "document");
  if (!version.is_number_integer()) malformed("version is not an integer");
  if (version.get<std::int64_t>() != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "format version " + version.dump());
  }

  SnapshotDocument doc;
  doc.format_version = kFormatVersion;
  doc.test_name = require_string(require(root, "test", "document"), "test");
  doc.method_name = require_string(require(root, "method", "document"), "method");
  const json& snaps = require(root, "snapshots", "document");
  if (!snaps.is_array()) malformed("snapshots is not an array");

  for (std::size_t s = 0; s < snaps.size(); ++s) {
    const json& js = snaps[s];
    std::string where = "snapshot " + std::to_string(s);
    if (!js.is_object()) malformed(where + ": not an object");
    const json& exit = require(js, "exit", where);
    if (!exit.is_number_unsigned()) malformed(where + ": exit is not a non-negative integer");
    std::vector<NodeId> roots = require_id_list(require(js, "roots", where), where + ".roots");
    const json& jn = require(js, "nodes", where);
    if (!jn.is_array()) malformed(where + ": nodes is not an array");
    if (jn.size() > node_budget) {
      throw Error(ErrorCode::kInvariantViolation,
                  where + ": " + std::to_string(jn.size()) + " nodes exceeds budget " + std::to_string(node_budget));
    }
    std::vector<ObjectNode> nodes;
    nodes.reserve(jn.size());
    for (std::size_t i = 0; i < jn.size(); ++i) {
      nodes.push_back(decode_node(jn[i], where + " node " + std::to_string(i)));
    }
    doc.snapshots.push_back({ObjectGraph(std::move(nodes), std::move(roots)), exit.get<std::size_t>()});
  }

  if (auto problems = validate_document(doc, node_budget); !problems.empty()) {
    throw Error(ErrorCode::kInvariantViolation, problems.front());
  }
  return doc;
}

}  // namespace patchrank
