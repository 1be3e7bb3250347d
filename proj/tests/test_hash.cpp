#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <string>

#include "uivtsp/hash.hpp"

using namespace uivtsp;

// Reference digests computed with an independent implementation and frozen
// here; the 256/512 values are the published test vectors for the underlying
// functions.
TEST_CASE("256-bit digest matches reference vectors") {
  REQUIRE(digest("", 256).hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  REQUIRE(digest("abc", 256).hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("512-bit digest matches reference vectors") {
  REQUIRE(digest("", 512).hex() ==
          "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
          "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e");
  REQUIRE(digest("abc", 512).hex() ==
          "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
          "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f");
}

TEST_CASE("1024-bit digest is two domain-separated lanes") {
  Digest d = digest("abc", 1024);
  REQUIRE(d.width_bits() == 1024);
  REQUIRE(d.hex().substr(0, 128) ==
          "e8bed4e1a44c9946bbdbf11761ee919f9639a7598437f3959357936a37892774"
          "378355cff365b9930588325ed0c0e80a3a576acb677c77d79ab209d9e3a87199");
  REQUIRE(d.hex().substr(128) ==
          "b697d2c0e0c4b619126da9b771cac18c8e362d612bd940de47bc314c7ed54cb6"
          "70107bfd559eacf84caf20e17f1344c20d460514eec304132b72b6a4eac7e1de");
  // lanes must differ even on identical input
  REQUIRE(d.bytes.substr(0, 64) != d.bytes.substr(64));
}

TEST_CASE("digest widths and zero digest") {
  REQUIRE(digest("x", 256).width_bits() == 256);
  REQUIRE(digest("x", 512).width_bits() == 512);
  REQUIRE(digest("x", 1024).width_bits() == 1024);
  for (int k : kSupportedWidths) {
    REQUIRE(zero_digest(k).width_bits() == k);
    REQUIRE(zero_digest(k).bytes == std::string(static_cast<std::size_t>(k / 8), '\0'));
  }
  REQUIRE(width_supported(256));
  REQUIRE_FALSE(width_supported(128));
  REQUIRE_THROWS_AS(digest("x", 384), std::invalid_argument);
  REQUIRE_THROWS_AS(zero_digest(0), std::invalid_argument);
}

TEST_CASE("digest is deterministic and input sensitive") {
  for (int k : kSupportedWidths) {
    REQUIRE(digest("same input", k) == digest("same input", k));
    REQUIRE(digest("same input", k) != digest("same inpuT", k));
  }
}
