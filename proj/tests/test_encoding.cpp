#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "uivtsp/encoding.hpp"

using namespace uivtsp;

TEST_CASE("be32/be64 big endian layout") {
  std::string out;
  append_be32(out, 0x01020304u);
  REQUIRE(out == std::string("\x01\x02\x03\x04", 4));
  out.clear();
  append_be64(out, 0x0102030405060708ull);
  REQUIRE(out == std::string("\x01\x02\x03\x04\x05\x06\x07\x08", 8));
  REQUIRE(be64(0) == std::string(8, '\0'));
  REQUIRE(read_be32(std::string("\x01\x02\x03\x04", 4), 0) == 0x01020304u);
  REQUIRE(read_be64(be64(0xfedcba9876543210ull), 0) == 0xfedcba9876543210ull);
}

TEST_CASE("canonical_encode exact bytes") {
  REQUIRE(hex_encode(canonical_encode({std::string("ab"), std::string("c")})) ==
          "000000020000000261620000000163");
  REQUIRE(hex_encode(canonical_encode(std::span<const std::string>{})) == "00000000");
  REQUIRE(hex_encode(canonical_encode({std::string()})) == "0000000100000000");
}

TEST_CASE("canonical_encode is injective over field boundaries") {
  // same concatenated payload, different field split
  auto a = canonical_encode({std::string("ab"), std::string("c")});
  auto b = canonical_encode({std::string("a"), std::string("bc")});
  auto c = canonical_encode({std::string("abc")});
  REQUIRE(a != b);
  REQUIRE(a != c);
  REQUIRE(b != c);
}

TEST_CASE("canonical_decode inverts canonical_encode") {
  std::vector<std::string> fields = {"", "x", std::string("\x00\xff", 2), "longer field value"};
  auto decoded = canonical_decode(canonical_encode(fields));
  REQUIRE(decoded.has_value());
  REQUIRE(*decoded == fields);
}

TEST_CASE("canonical_decode round trips random field lists") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> fields(rng() % 6);
    for (auto& f : fields) {
      f.resize(rng() % 40);
      for (auto& ch : f) ch = static_cast<char>(rng() & 0xff);
    }
    std::string wire = canonical_encode(fields);
    auto decoded = canonical_decode(wire);
    REQUIRE(decoded.has_value());
    REQUIRE(*decoded == fields);
  }
}

TEST_CASE("canonical_decode rejects malformed framing") {
  REQUIRE_FALSE(canonical_decode("").has_value());
  REQUIRE_FALSE(canonical_decode(std::string("\x00\x00\x00", 3)).has_value());
  // count says one field, no length follows
  REQUIRE_FALSE(canonical_decode(std::string("\x00\x00\x00\x01", 4)).has_value());
  // length exceeds remaining bytes
  REQUIRE_FALSE(
      canonical_decode(std::string("\x00\x00\x00\x01\x00\x00\x00\x05zz", 10)).has_value());
  // trailing garbage after a well-formed list
  std::string ok = canonical_encode({std::string("ab")});
  REQUIRE(canonical_decode(ok).has_value());
  REQUIRE_FALSE(canonical_decode(ok + "x").has_value());
}

TEST_CASE("hex encode and decode") {
  REQUIRE(hex_encode(std::string("\x00\x0f\xa0\xff", 4)) == "000fa0ff");
  REQUIRE(hex_decode("000fa0ff") == std::string("\x00\x0f\xa0\xff", 4));
  REQUIRE(hex_decode("ABCDEF") == hex_decode("abcdef"));
  REQUIRE(hex_decode("") == "");
  REQUIRE_THROWS_AS(hex_decode("abc"), std::invalid_argument);
  REQUIRE_THROWS_AS(hex_decode("zz"), std::invalid_argument);
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    std::string raw(rng() % 64, '\0');
    for (auto& ch : raw) ch = static_cast<char>(rng() & 0xff);
    REQUIRE(hex_decode(hex_encode(raw)) == raw);
  }
}
