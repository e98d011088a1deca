#include "patchrank/distance.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

#include "patchrank/error.hpp"
#include "patchrank/levenshtein.hpp"

namespace patchrank {

std::string ExtendedDistance::to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

std::string to_decimal(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string digits;
  while (v > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

ExtendedRational ExtendedRational::finite(Numerator numerator, std::uint64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("ExtendedRational: zero denominator");
  ExtendedRational r;
  r.num_ = numerator;
  r.den_ = denominator;
  return r;
}

ExtendedRational ExtendedRational::infinite() {
  ExtendedRational r;
  r.infinite_ = true;
  return r;
}

std::string ExtendedRational::to_string() const {
  if (infinite_) return "inf";
  return to_decimal(num_) + "/" + std::to_string(den_);
}

namespace {

using Wide = unsigned __int128;

std::strong_ordering reversed(std::strong_ordering ord) { return 0 <=> ord; }

// Compares a/b with c/d without forming cross products: compare integer
// parts, then recurse on the reciprocals of the remainders.
std::strong_ordering compare_fractions(Wide a, Wide b, Wide c, Wide d) {
  bool flipped = false;
  while (true) {
    Wide qa = a / b, qc = c / d;
    if (qa != qc) return flipped ? reversed(qa <=> qc) : qa <=> qc;
    Wide ra = a % b, rc = c % d;
    if (ra == 0 && rc == 0) return std::strong_ordering::equal;
    if (ra == 0) return flipped ? std::strong_ordering::greater : std::strong_ordering::less;
    if (rc == 0) return flipped ? std::strong_ordering::less : std::strong_ordering::greater;
    // ra/b < rc/d  iff  b/ra > d/rc
    Wide next_a = b, next_b = ra, next_c = d, next_d = rc;
    a = next_a, b = next_b, c = next_c, d = next_d;
    flipped = !flipped;
  }
}

}  // namespace

std::strong_ordering operator<=>(const ExtendedRational& x, const ExtendedRational& y) {
  if (x.infinite_ || y.infinite_) {
    if (x.infinite_ == y.infinite_) return std::strong_ordering::equal;
    return x.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return compare_fractions(x.num_, x.den_, y.num_, y.den_);
}

// Iterative depth-first comparison. Each open object/array pair is a frame;
// a frame asks for child distances one at a time and the loop either settles
// the child immediately (leaves, cycle cut-offs, cached pairs) or pushes it.
class DistanceEngine {
 public:
  DistanceEngine(const ObjectGraph& left, const ObjectGraph& right, PairMemo& memo)
      : left_(left), right_(right), memo_(memo) {}

  ExtendedDistance run(NodeId a, NodeId b) {
    try {
      return drive(a, b);
    } catch (...) {
      for (const Frame& f : stack_) memo_.active_.erase({f.left, f.right});
      stack_.clear();
      throw;
    }
  }

 private:
  struct Outcome {
    ExtendedDistance value;
    bool cut_free = true;
  };

  struct Frame {
    NodeId left;
    NodeId right;
    bool is_array = false;
    bool cut_free = true;
    // object frames
    std::vector<std::pair<NodeId, NodeId>> children;
    std::size_t next = 0;
    ExtendedDistance sum;
    // array frames
    const std::vector<NodeId>* left_elems = nullptr;
    const std::vector<NodeId>* right_elems = nullptr;
    LevenshteinStepper lev{0, 0};
  };

  ExtendedDistance drive(NodeId a, NodeId b) {
    if (auto settled = open(a, b)) return settled->value;
    std::optional<Outcome> delivered;
    while (true) {
      Frame& top = stack_.back();
      if (delivered) {
        feed(top, *delivered);
        delivered.reset();
      }
      auto request = next_request(top);
      if (!request) {
        Outcome done{top.is_array ? ExtendedDistance::finite(top.lev.result()) : top.sum, top.cut_free};
        std::pair<NodeId, NodeId> key{top.left, top.right};
        memo_.active_.erase(key);
        if (done.cut_free) memo_.settled_.emplace(key, done.value);
        stack_.pop_back();
        if (stack_.empty()) return done.value;
        delivered = done;
        continue;
      }
      delivered = open(request->first, request->second);  // may push; `top` is stale after this
    }
  }

  static void feed(Frame& f, const Outcome& child) {
    f.cut_free = f.cut_free && child.cut_free;
    if (f.is_array) {
      f.lev.answer(child.value.is_zero());
    } else {
      f.sum += child.value;
      ++f.next;
    }
  }

  static std::optional<std::pair<NodeId, NodeId>> next_request(const Frame& f) {
    if (f.is_array) {
      if (f.lev.done()) return std::nullopt;
      auto [i, j] = f.lev.pending();
      return std::pair{(*f.left_elems)[i], (*f.right_elems)[j]};
    }
    // An infinite partial sum is final whatever the remaining fields hold.
    if (f.sum.is_infinite() || f.next == f.children.size()) return std::nullopt;
    return f.children[f.next];
  }

  static const ObjectNode& resolve(const ObjectGraph& g, NodeId id, const char* side) {
    const ObjectNode* n = g.find(id);
    if (!n) throw Error(ErrorCode::kDanglingNode, std::string(side) + " node " + std::to_string(id) + " does not resolve");
    return *n;
  }

  // Settles (a, b) directly, or pushes a frame and returns nullopt.
  std::optional<Outcome> open(NodeId a, NodeId b) {
    const ObjectNode& x = resolve(left_, a, "left");
    const ObjectNode& y = resolve(right_, b, "right");
    std::pair<NodeId, NodeId> key{a, b};
    if (memo_.active_.contains(key)) return Outcome{ExtendedDistance::finite(0), false};
    if (auto it = memo_.settled_.find(key); it != memo_.settled_.end()) return Outcome{it->second, true};

    const bool x_null = x.kind == NodeKind::kNull;
    const bool y_null = y.kind == NodeKind::kNull;
    if (x_null && y_null) return Outcome{ExtendedDistance::finite(0)};
    if (x_null || y_null) return Outcome{ExtendedDistance::finite(1)};
    if (x.kind != y.kind) return Outcome{ExtendedDistance::infinite()};

    switch (x.kind) {
      case NodeKind::kPrimitive:
        if (x.type_name != y.type_name) return Outcome{ExtendedDistance::infinite()};
        return Outcome{ExtendedDistance::finite(x.value == y.value ? 0 : 1)};

      case NodeKind::kString: {
        auto cx = decode_utf8(x.value);
        auto cy = decode_utf8(y.value);
        if (cx && cy) return Outcome{ExtendedDistance::finite(levenshtein(*cx, *cy))};
        return Outcome{ExtendedDistance::finite(levenshtein(x.value, y.value))};
      }

      case NodeKind::kArray: {
        if (x.type_name != y.type_name) return Outcome{ExtendedDistance::infinite()};
        if (x.elements.empty() || y.elements.empty()) {
          return Outcome{ExtendedDistance::finite(std::max(x.elements.size(), y.elements.size()))};
        }
        Frame f;
        f.left = a;
        f.right = b;
        f.is_array = true;
        f.left_elems = &x.elements;
        f.right_elems = &y.elements;
        f.lev = LevenshteinStepper(x.elements.size(), y.elements.size());
        push(std::move(f));
        return std::nullopt;
      }

      case NodeKind::kObject: {
        if (x.type_name != y.type_name) return Outcome{ExtendedDistance::infinite()};
        Frame f;
        f.left = a;
        f.right = b;
        std::uint64_t one_sided = 0;
        auto xi = x.fields.begin();
        auto yi = y.fields.begin();
        while (xi != x.fields.end() || yi != y.fields.end()) {
          if (yi == y.fields.end() || (xi != x.fields.end() && xi->first < yi->first)) {
            ++one_sided, ++xi;
          } else if (xi == x.fields.end() || yi->first < xi->first) {
            ++one_sided, ++yi;
          } else {
            f.children.emplace_back(xi->second, yi->second);
            ++xi, ++yi;
          }
        }
        f.sum = ExtendedDistance::finite(one_sided);
        if (f.children.empty()) return Outcome{f.sum};
        push(std::move(f));
        return std::nullopt;
      }

      case NodeKind::kNull:
        break;
    }
    return Outcome{ExtendedDistance::infinite()};
  }

  void push(Frame f) {
    memo_.active_.insert({f.left, f.right});
    stack_.push_back(std::move(f));
  }

  const ObjectGraph& left_;
  const ObjectGraph& right_;
  PairMemo& memo_;
  std::vector<Frame> stack_;
};

ExtendedDistance node_dist(const ObjectGraph& g1, NodeId n1, const ObjectGraph& g2, NodeId n2, PairMemo& memo) {
  return DistanceEngine(g1, g2, memo).run(n1, n2);
}

ExtendedDistance node_dist(const ObjectGraph& g1, NodeId n1, const ObjectGraph& g2, NodeId n2) {
  PairMemo memo;
  return node_dist(g1, n1, g2, n2, memo);
}

ExtendedDistance snapshot_dist(const Snapshot& s1, const Snapshot& s2) {
  const auto& r1 = s1.graph.roots();
  const auto& r2 = s2.graph.roots();
  if (r1.size() != r2.size()) return ExtendedDistance::infinite();
  ExtendedDistance total = ExtendedDistance::finite(0);
  for (std::size_t i = 0; i < r1.size() && !total.is_infinite(); ++i) {
    total += node_dist(s1.graph, r1[i], s2.graph, r2[i]);
  }
  return total;
}

ExtendedRational avg_pair_distance(std::span<const Snapshot> original, std::span<const Snapshot> patched) {
  if (original.empty() || patched.empty()) {
    throw Error(ErrorCode::kEmptySnapshotSet, std::to_string(original.size()) + " original x " +
                                                  std::to_string(patched.size()) + " patched snapshots");
  }
  ExtendedRational::Numerator sum = 0;
  for (const Snapshot& o : original) {
    for (const Snapshot& p : patched) {
      ExtendedDistance d = snapshot_dist(o, p);
      if (d.is_infinite()) return ExtendedRational::infinite();
      sum += d.value();
    }
  }
  return ExtendedRational::finite(sum, static_cast<std::uint64_t>(original.size()) * patched.size());
}

}  // namespace patchrank
