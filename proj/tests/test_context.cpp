#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "uivtsp/context.hpp"

using namespace uivtsp;

TEST_CASE("counted_digest tallies exactly one hash per call") {
  OpCounters ops;
  counted_digest("a", 256, ops);
  REQUIRE(ops.hash == 1);
  counted_digest("b", 1024, ops);  // double-width output still counts once
  REQUIRE(ops.hash == 2);
  REQUIRE(ops.ske == 0);
  REQUIRE(ops.pke == 0);
  REQUIRE(ops.exp == 0);
  REQUIRE(counted_digest("a", 256, ops) == digest("a", 256));
}

TEST_CASE("rng draws follow the standardized engine sequence") {
  RunRng rng(12345);
  std::mt19937_64 ref(12345);
  for (int i = 0; i < 10; ++i) REQUIRE(rng.next_u64() == ref());
}

TEST_CASE("rng is deterministic per seed and differs across seeds") {
  RunRng a(42), b(42), c(43);
  std::vector<std::uint64_t> va, vb, vc;
  for (int i = 0; i < 8; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
  }
  REQUIRE(va == vb);
  REQUIRE(va != vc);
}

TEST_CASE("uniform01 lies in [0,1) and bernoulli respects edges") {
  RunRng rng(7);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  for (int i = 0; i < 100; ++i) {
    REQUIRE_FALSE(rng.bernoulli(0.0));
    REQUIRE(rng.bernoulli(1.0));
  }
}

TEST_CASE("uniform01 maps the top 53 bits") {
  // first draw of mt19937_64(1) is fixed by the standard
  std::mt19937_64 ref(1);
  std::uint64_t raw = ref();
  RunRng rng(1);
  REQUIRE(rng.uniform01() == static_cast<double>(raw >> 11) * 0x1.0p-53);
}

TEST_CASE("bytes produces big-endian chunks of the raw stream") {
  RunRng rng(9);
  std::mt19937_64 ref(9);
  std::uint64_t raw = ref();
  std::string b = rng.bytes(8);
  for (int i = 0; i < 8; ++i)
    REQUIRE(static_cast<std::uint8_t>(b[i]) == static_cast<std::uint8_t>((raw >> (8 * (7 - i))) & 0xff));
  REQUIRE(rng.bytes(3).size() == 3);
  REQUIRE(rng.bytes(0).empty());
}

TEST_CASE("nonce and mac consume fixed-width draws") {
  RunRng a(11), b(11);
  Nonce n = a.nonce();
  std::string raw = b.bytes(16);
  REQUIRE(n.bytes() == raw);
  MacAddress ma = a.mac(), mb;
  std::string raw6 = b.bytes(6);
  for (std::size_t i = 0; i < 6; ++i) mb.octets[i] = static_cast<std::uint8_t>(raw6[i]);
  REQUIRE(ma == mb);
}

TEST_CASE("shuffle is a deterministic permutation") {
  RunRng a(5), b(5);
  std::vector<int> va{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, vb = va, sorted = va;
  a.shuffle(va);
  b.shuffle(vb);
  REQUIRE(va == vb);
  std::vector<int> copy = va;
  std::sort(copy.begin(), copy.end());
  REQUIRE(copy == sorted);
  RunRng c(6);
  std::vector<int> vc = sorted;
  c.shuffle(vc);
  REQUIRE(vc != va);  // different seed, different order (overwhelmingly)
}
