#pragma once

// Object-graph snapshot model and its canonical text codec.
//
// A snapshot is the heap reachable from the parameters of one method at one
// exit point. Nodes are addressed by integer id; references between nodes are
// ids, so graphs may share substructure and may contain cycles.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace patchrank {

using NodeId = std::uint64_t;

inline constexpr std::size_t kDefaultNodeBudget = 1'000'000;
inline constexpr int kFormatVersion = 1;

enum class NodeKind { kNull, kPrimitive, kString, kArray, kObject };

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;

/// One vertex of a captured heap.
///
/// Which payload members are meaningful depends on `kind`:
///   null      - none
///   primitive - type_name, value (canonical scalar encoding)
///   string    - value (UTF-8 text)
///   array     - type_name (component type), elements
///   object    - type_name, fields
/// Use the factory functions; `validate_graph` reports nodes whose payload
/// does not match their kind.
struct ObjectNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::kNull;
  std::string type_name;
  std::string value;
  std::vector<NodeId> elements;
  std::map<std::string, NodeId> fields;

  static ObjectNode null(NodeId id);
  static ObjectNode primitive(NodeId id, std::string type_name, std::string value);
  static ObjectNode string(NodeId id, std::string value);
  static ObjectNode array(NodeId id, std::string component_type, std::vector<NodeId> elements);
  static ObjectNode object(NodeId id, std::string type_name, std::map<std::string, NodeId> fields);

  bool operator==(const ObjectNode&) const = default;
};

/// Immutable set of nodes plus the ordered list of roots (one per captured
/// parameter). Nodes are kept sorted by id. Duplicate ids are retained so
/// that validation can report them; lookups resolve to the first.
class ObjectGraph {
 public:
  ObjectGraph() = default;
  ObjectGraph(std::vector<ObjectNode> nodes, std::vector<NodeId> roots);

  const std::vector<ObjectNode>& nodes() const noexcept { return nodes_; }
  const std::vector<NodeId>& roots() const noexcept { return roots_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// nullptr when `id` is not present.
  const ObjectNode* find(NodeId id) const noexcept;

  bool operator==(const ObjectGraph& other) const {
    return roots_ == other.roots_ && nodes_ == other.nodes_;
  }

 private:
  std::vector<ObjectNode> nodes_;
  std::vector<NodeId> roots_;
  std::unordered_map<NodeId, std::size_t> index_;
};

struct Snapshot {
  ObjectGraph graph;
  std::size_t exit_index = 0;

  bool operator==(const Snapshot&) const = default;
};

struct SnapshotDocument {
  int format_version = kFormatVersion;
  std::string test_name;
  std::string method_name;
  std::vector<Snapshot> snapshots;

  bool operator==(const SnapshotDocument&) const = default;
};

enum class GraphRule {
  kDuplicateId,
  kDanglingReference,
  kDanglingRoot,
  kUnreachable,
  kPayloadShape,
  kInvalidUtf8,
  kBudgetExceeded,
};

std::string_view to_string(GraphRule rule) noexcept;

struct GraphViolation {
  std::optional<NodeId> node;  // absent for graph-wide rules (budget)
  GraphRule rule;
  std::string detail;
};

/// Empty iff every graph invariant holds.
std::vector<GraphViolation> validate_graph(const ObjectGraph& graph,
                                           std::size_t node_budget = kDefaultNodeBudget);

/// Graph violations of every snapshot plus document-level rules (non-empty
/// test name, exit indices consecutive from 0), each rendered as one line.
std::vector<std::string> validate_document(const SnapshotDocument& doc,
                                           std::size_t node_budget = kDefaultNodeBudget);

/// Canonical serialization: deterministic bytes, nodes in ascending id order,
/// object fields in lexicographic order. Throws Error(kInvariantViolation)
/// if `doc` does not validate.
std::string encode_snapshot_document(const SnapshotDocument& doc,
                                     std::size_t node_budget = kDefaultNodeBudget);

/// Total over arbitrary input: returns a validated document or throws Error
/// with kMalformedDocument, kUnsupportedVersion or kInvariantViolation.
SnapshotDocument decode_snapshot_document(std::string_view bytes,
                                          std::size_t node_budget = kDefaultNodeBudget);

// Canonical scalar encodings for primitive nodes.
std::string canonical_int(std::int64_t v);
std::string canonical_bool(bool v);
std::string canonical_char(char32_t v);
std::string canonical_float(float v);
std::string canonical_double(double v);

/// Decodes UTF-8 into code points; nullopt on malformed input.
std::optional<std::u32string> decode_utf8(std::string_view text);

}  // namespace patchrank
