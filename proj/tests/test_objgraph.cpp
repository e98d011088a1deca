#include <random>
#include <string>

#include "doctest.h"
#include "patchrank/error.hpp"
#include "patchrank/objgraph.hpp"
#include "support.hpp"

using namespace patchrank;

namespace {

SnapshotDocument single(ObjectGraph g, std::string test = "com.foo.BarTest.t1") {
  SnapshotDocument doc;
  doc.test_name = std::move(test);
  doc.method_name = "com.foo.Bar.baz";
  doc.snapshots.push_back({std::move(g), 0});
  return doc;
}

ObjectGraph cyclic_pair() {
  return ObjectGraph({ObjectNode::object(0, "A", {{"f", 1}}), ObjectNode::object(1, "B", {{"g", 0}})}, {0});
}

ErrorCode decode_error(const std::string& text, std::size_t budget = kDefaultNodeBudget) {
  try {
    decode_snapshot_document(text, budget);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode accepted: " << text);
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("round trip of an empty document") {
  SnapshotDocument doc;
  doc.test_name = "com.foo.BarTest.t1";
  doc.method_name = "com.foo.Bar.baz";
  std::string bytes = encode_snapshot_document(doc);
  CHECK(bytes == "{\"version\":1,\"test\":\"com.foo.BarTest.t1\",\"method\":\"com.foo.Bar.baz\",\"snapshots\":[]}\n");
  CHECK(decode_snapshot_document(bytes) == doc);
}

TEST_CASE("round trip of a primitive root") {
  auto doc = single(ObjectGraph({ObjectNode::primitive(0, "int", "5")}, {0}));
  auto back = decode_snapshot_document(encode_snapshot_document(doc));
  CHECK(back == doc);
  REQUIRE(back.snapshots.size() == 1);
  CHECK(back.snapshots[0].graph.find(0)->value == "5");
}

TEST_CASE("cyclic graph round trips and encodes canonically") {
  auto doc = single(cyclic_pair());
  std::string bytes = encode_snapshot_document(doc);
  CHECK(bytes ==
        "{\"version\":1,\"test\":\"com.foo.BarTest.t1\",\"method\":\"com.foo.Bar.baz\",\"snapshots\":[\n"
        "{\"exit\":0,\"roots\":[0],\"nodes\":[\n"
        "{\"id\":0,\"kind\":\"object\",\"type\":\"A\",\"fields\":{\"f\":1}},\n"
        "{\"id\":1,\"kind\":\"object\",\"type\":\"B\",\"fields\":{\"g\":0}}\n"
        "]}\n"
        "]}\n");
  CHECK(decode_snapshot_document(bytes) == doc);
  CHECK(encode_snapshot_document(doc) == bytes);
}

TEST_CASE("node order and field order do not affect the bytes") {
  ObjectGraph a({ObjectNode::primitive(2, "int", "1"), ObjectNode::object(0, "T", {{"z", 2}, {"a", 1}}),
                 ObjectNode::null(1)},
                {0});
  ObjectGraph b({ObjectNode::null(1), ObjectNode::object(0, "T", {{"a", 1}, {"z", 2}}),
                 ObjectNode::primitive(2, "int", "1")},
                {0});
  CHECK(encode_snapshot_document(single(a)) == encode_snapshot_document(single(b)));
  std::string bytes = encode_snapshot_document(single(a));
  CHECK(bytes.find("\"fields\":{\"a\":1,\"z\":2}") != std::string::npos);
}

TEST_CASE("all node kinds survive a round trip") {
  ObjectGraph g({ObjectNode::object(0, "T", {{"n", 1}, {"s", 2}, {"arr", 3}}), ObjectNode::null(1),
                 ObjectNode::string(2, "hé\"llo\n"), ObjectNode::array(3, "int", {4, 4}),
                 ObjectNode::primitive(4, "double", canonical_double(1.0))},
                {0, 2});
  SnapshotDocument doc = single(g);
  doc.snapshots.push_back({g, 1});
  CHECK(decode_snapshot_document(encode_snapshot_document(doc)) == doc);
}

TEST_CASE("unsupported version") {
  CHECK(decode_error(R"({"version":999,"test":"a.b","method":"m","snapshots":[]})") ==
        ErrorCode::kUnsupportedVersion);
  // the version is checked before the rest of the structure
  CHECK(decode_error(R"({"version":2})") == ErrorCode::kUnsupportedVersion);
}

TEST_CASE("dangling field reference") {
  std::string text =
      R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":0,"roots":[0],"nodes":[)"
      R"({"id":0,"kind":"object","type":"T","fields":{"f":42}}]}]})";
  CHECK(decode_error(text) == ErrorCode::kInvariantViolation);
}

TEST_CASE("malformed documents") {
  const char* cases[] = {
      "",
      "[]",
      "{\"version\":1",
      R"({"version":"1","test":"a.b","method":"m","snapshots":[]})",
      R"({"version":1,"method":"m","snapshots":[]})",
      R"({"version":1,"test":"a.b","method":"m","snapshots":{}})",
      R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":0,"roots":[0],"nodes":[{"id":0,"kind":"weird"}]}]})",
      R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":0,"roots":[0],"nodes":[{"id":-1,"kind":"null"}]}]})",
      R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":0,"roots":[0],"nodes":[{"id":0,"kind":"null","value":"x"}]}]})",
      R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":0,"roots":[0],"nodes":[{"id":0,"kind":"primitive","type":"int"}]}]})",
      R"({"version":1,"test":"a.b","test":"c.d","method":"m","snapshots":[]})",
  };
  for (const char* c : cases) {
    CAPTURE(c);
    CHECK(decode_error(c) == ErrorCode::kMalformedDocument);
  }
}

TEST_CASE("duplicate field names violate the object invariant") {
  std::string text =
      R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":0,"roots":[0],"nodes":[)"
      R"({"id":0,"kind":"object","type":"T","fields":{"f":1,"f":1}},{"id":1,"kind":"null"}]}]})";
  CHECK(decode_error(text) == ErrorCode::kInvariantViolation);
}

TEST_CASE("document rules") {
  SUBCASE("exit indices must run from zero") {
    std::string text = R"({"version":1,"test":"a.b","method":"m","snapshots":[{"exit":1,"roots":[],"nodes":[]}]})";
    CHECK(decode_error(text) == ErrorCode::kInvariantViolation);
  }
  SUBCASE("empty test name") {
    CHECK(decode_error(R"({"version":1,"test":"","method":"m","snapshots":[]})") == ErrorCode::kInvariantViolation);
  }
  SUBCASE("the encoder refuses invalid documents") {
    auto doc = single(ObjectGraph({ObjectNode::object(0, "T", {{"f", 9}})}, {0}));
    CHECK_THROWS_AS(encode_snapshot_document(doc), Error);
  }
}

TEST_CASE("node budget") {
  auto doc = single(ObjectGraph({ObjectNode::array(0, "int", {1, 2}), ObjectNode::primitive(1, "int", "1"),
                                 ObjectNode::primitive(2, "int", "2")},
                                {0}));
  std::string bytes = encode_snapshot_document(doc);
  CHECK_NOTHROW(decode_snapshot_document(bytes, 3));
  CHECK(decode_error(bytes, 2) == ErrorCode::kInvariantViolation);
  auto v = validate_graph(doc.snapshots[0].graph, 2);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == GraphRule::kBudgetExceeded);
  CHECK_FALSE(v[0].node.has_value());
}

TEST_CASE("validate_graph") {
  SUBCASE("clean") { CHECK(validate_graph(cyclic_pair()).empty()); }
  SUBCASE("unreachable node") {
    ObjectGraph g({ObjectNode::primitive(0, "int", "1"), ObjectNode::null(1)}, {0});
    auto v = validate_graph(g);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == GraphRule::kUnreachable);
    CHECK(v[0].node == NodeId{1});
  }
  SUBCASE("duplicate id") {
    ObjectGraph g({ObjectNode::array(0, "int", {3}), ObjectNode::primitive(3, "int", "1"),
                   ObjectNode::primitive(3, "int", "2")},
                  {0});
    auto v = validate_graph(g);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].rule == GraphRule::kDuplicateId);
    CHECK(v[0].node == NodeId{3});
  }
  SUBCASE("dangling root") {
    auto v = validate_graph(ObjectGraph({}, {7}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == GraphRule::kDanglingRoot);
  }
  SUBCASE("dangling element") {
    auto v = validate_graph(ObjectGraph({ObjectNode::array(0, "int", {5})}, {0}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == GraphRule::kDanglingReference);
  }
  SUBCASE("payload does not match kind") {
    ObjectNode n = ObjectNode::null(0);
    n.value = "x";
    auto v = validate_graph(ObjectGraph({n}, {0}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == GraphRule::kPayloadShape);
  }
  SUBCASE("invalid utf-8") {
    auto v = validate_graph(ObjectGraph({ObjectNode::string(0, std::string("\xc3\x28", 2))}, {0}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == GraphRule::kInvalidUtf8);
  }
}

TEST_CASE("canonical scalar encodings") {
  CHECK(canonical_double(1.0) == "3ff0000000000000");
  CHECK(canonical_double(-0.0) == "8000000000000000");
  CHECK(canonical_float(1.0f) == "3f800000");
  CHECK(canonical_char(U'a') == "97");
  CHECK(canonical_int(-42) == "-42");
  CHECK(canonical_bool(true) == "true");
  CHECK(canonical_bool(false) == "false");
}

TEST_CASE("decode_utf8") {
  CHECK(decode_utf8("abc") == std::u32string(U"abc"));
  CHECK(decode_utf8("h\xc3\xa9") == std::u32string(U"hé"));
  CHECK(decode_utf8("\xf0\x9f\x98\x80") == std::u32string(U"\U0001F600"));
  CHECK_FALSE(decode_utf8("\xc3").has_value());
  CHECK_FALSE(decode_utf8("\xc0\xaf").has_value());        // overlong
  CHECK_FALSE(decode_utf8("\xed\xa0\x80").has_value());    // surrogate
  CHECK_FALSE(decode_utf8("\xf4\x90\x80\x80").has_value()); // above U+10FFFF
}

TEST_CASE("round trip property over random graphs") {
  testing::RandomGraphs gen(7);
  for (int i = 0; i < 300; ++i) {
    auto doc = single(gen.make());
    std::string bytes = encode_snapshot_document(doc);
    auto back = decode_snapshot_document(bytes);
    REQUIRE(back == doc);
    REQUIRE(encode_snapshot_document(back) == bytes);
  }
}

TEST_CASE("decoder is total over mangled input") {
  testing::RandomGraphs gen(11);
  std::mt19937_64 rng(3);
  const std::string noise = "{}[],:\"0123456789-aeflnrstu \n\\";
  int accepted = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string bytes = encode_snapshot_document(single(gen.make()));
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits && !bytes.empty(); ++e) {
      std::size_t pos = rng() % bytes.size();
      switch (rng() % 3) {
        case 0: bytes.erase(pos, 1); break;
        case 1: bytes.insert(pos, 1, noise[rng() % noise.size()]); break;
        default: bytes[pos] = noise[rng() % noise.size()]; break;
      }
    }
    try {
      auto doc = decode_snapshot_document(bytes);
      // anything accepted must be valid and re-encodable
      CHECK(validate_document(doc).empty());
      CHECK_NOTHROW(encode_snapshot_document(doc));
      ++accepted;
    } catch (const Error&) {
    }
  }
  MESSAGE(accepted << " of 2000 mangled documents still decoded");
}
