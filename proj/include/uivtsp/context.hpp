#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uivtsp/hash.hpp"
#include "uivtsp/types.hpp"

namespace uivtsp {

// Operation tally for the cost accounting. Hash counts are incremented only at
// protocol call sites (token generation, rotation, tracing derivation, the
// on-host verification); ledger hashing is deliberately outside the tally.
// The asymmetric-crypto counters exist to make "zero of these anywhere" a
// measured statement rather than a claim.
struct OpCounters {
  std::uint64_t hash = 0;
  std::uint64_t ske = 0;
  std::uint64_t pke = 0;
  std::uint64_t exp = 0;
};

inline Digest counted_digest(std::string_view data, int width_k, OpCounters& ops) {
  ops.hash += 1;
  return digest(data, width_k);
}

// Seeded deterministic randomness. mt19937_64 has a standardized sequence, and
// all draws below are mapped from raw u64 output by hand because the standard
// distribution adaptors are implementation-defined. Same seed, same bytes,
// on any platform.
class RunRng {
 public:
  explicit RunRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform in [0, n). Modulo bias is irrelevant at simulation scales and the
  // mapping stays reproducible.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  std::string bytes(std::size_t n) {
    std::string out;
    out.reserve(n);
    while (out.size() < n) {
      std::uint64_t v = next_u64();
      for (int i = 7; i >= 0 && out.size() < n; --i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    return out;
  }

  Nonce nonce() {
    Nonce n;
    std::string b = bytes(n.value.size());
    for (std::size_t i = 0; i < n.value.size(); ++i)
      n.value[i] = static_cast<std::uint8_t>(b[i]);
    return n;
  }

  MacAddress mac() {
    MacAddress m;
    std::string b = bytes(m.octets.size());
    for (std::size_t i = 0; i < m.octets.size(); ++i)
      m.octets[i] = static_cast<std::uint8_t>(b[i]);
    return m;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Shared mutable state for one run: randomness, op tally, logical clock.
struct RunContext {
  explicit RunContext(std::uint64_t seed) : rng(seed) {}

  RunRng rng;
  OpCounters ops;
  Timestamp now = 0;
};

}  // namespace uivtsp
