#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

#include "uivtsp/types.hpp"

using namespace uivtsp;

TEST_CASE("mac address text form round trips") {
  MacAddress mac{{0xaa, 0xbb, 0xcc, 0xdd, 0xee, 0xff}};
  REQUIRE(mac.text() == "aa:bb:cc:dd:ee:ff");
  REQUIRE(MacAddress::from_text("aa:bb:cc:dd:ee:ff") == mac);
  REQUIRE(MacAddress::from_text("00:00:00:00:00:00").bytes() == std::string(6, '\0'));
  REQUIRE(mac.bytes() == std::string("\xaa\xbb\xcc\xdd\xee\xff", 6));
  REQUIRE_THROWS_AS(MacAddress::from_text("aabbccddeeff"), std::invalid_argument);
  REQUIRE_THROWS_AS(MacAddress::from_text("aa:bb:cc:dd:ee"), std::invalid_argument);
  REQUIRE_THROWS_AS(MacAddress::from_text("aa:bb:cc:dd:ee:fg"), std::invalid_argument);
  REQUIRE_THROWS_AS(MacAddress::from_text("aa-bb-cc-dd-ee-ff"), std::invalid_argument);
}

TEST_CASE("digest hex round trips and width") {
  Digest d = Digest::from_hex("00ff");
  REQUIRE(d.bytes == std::string("\x00\xff", 2));
  REQUIRE(d.width_bits() == 16);
  REQUIRE(d.hex() == "00ff");
  REQUIRE(Digest{}.empty());
  REQUIRE(Digest{"a"} < Digest{"b"});
}

TEST_CASE("nonce byte view") {
  Nonce n;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] = static_cast<std::uint8_t>(i);
  REQUIRE(n.bytes().size() == 16);
  REQUIRE(n.bytes()[0] == '\x00');
  REQUIRE(n.bytes()[15] == '\x0f');
}

TEST_CASE("vulnerability meta validation") {
  VulnerabilityMeta meta{"vul-unit", "acme", "plc", 7, 1234567890};
  REQUIRE_NOTHROW(validate(meta));
  meta.severity = 11;
  REQUIRE_THROWS_AS(validate(meta), std::invalid_argument);
  meta.severity = 10;
  REQUIRE_NOTHROW(validate(meta));
  meta.vul_id.clear();
  REQUIRE_THROWS_AS(validate(meta), std::invalid_argument);
}

TEST_CASE("vulnerability meta canonical bytes are framed fields") {
  VulnerabilityMeta meta{"vul-unit", "acme", "plc", 7, 1234567890};
  std::string expect = canonical_encode(
      {std::string("vul-unit"), std::string("acme"), std::string("plc"),
       std::string(1, '\x07'), be64(1234567890)});
  REQUIRE(canonical_bytes(meta) == expect);
  // field identity matters, not just concatenation
  VulnerabilityMeta other = meta;
  other.vendor = "acmep";
  other.device_class = "lc";
  REQUIRE(canonical_bytes(other) != canonical_bytes(meta));
}
