#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uivtsp/encoding.hpp"

namespace uivtsp {

// Opaque participant / vulnerability identifiers. Kept as strings on purpose:
// they appear in ledger lines, CSV rows and map keys constantly.
using SwId = std::string;
using VulId = std::string;

// Logical milliseconds since run start. The simulator advances this clock
// deterministically; nothing reads the wall clock on a protocol path.
using Timestamp = std::uint64_t;

struct MacAddress {
  std::array<std::uint8_t, 6> octets{};

  auto operator<=>(const MacAddress&) const = default;

  std::string bytes() const {
    return std::string(reinterpret_cast<const char*>(octets.data()), octets.size());
  }

  std::string text() const {
    std::string hex = hex_encode(bytes());
    std::string out;
    out.reserve(17);
    for (std::size_t i = 0; i < 6; ++i) {
      if (i) out.push_back(':');
      out.push_back(hex[2 * i]);
      out.push_back(hex[2 * i + 1]);
    }
    return out;
  }

  static MacAddress from_text(std::string_view text) {
    if (text.size() != 17) throw std::invalid_argument("mac address must be aa:bb:cc:dd:ee:ff");
    MacAddress mac;
    for (std::size_t i = 0; i < 6; ++i) {
      if (i && text[3 * i - 1] != ':') throw std::invalid_argument("mac address must use ':' separators");
      int hi = hex_nibble(text[3 * i]);
      int lo = hex_nibble(text[3 * i + 1]);
      if (hi < 0 || lo < 0) throw std::invalid_argument("mac address has non-hex octet");
      mac.octets[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return mac;
  }
};

struct Nonce {
  std::array<std::uint8_t, 16> value{};

  auto operator<=>(const Nonce&) const = default;

  std::string bytes() const {
    return std::string(reinterpret_cast<const char*>(value.data()), value.size());
  }
};

// Raw digest bytes; width in bits is 8 * bytes.size(). Produced only by
// digest() in hash.hpp, so the size is always one of 32 / 64 / 128 bytes.
struct Digest {
  std::string bytes;

  auto operator<=>(const Digest&) const = default;

  int width_bits() const { return static_cast<int>(bytes.size() * 8); }
  bool empty() const { return bytes.empty(); }
  std::string hex() const { return hex_encode(bytes); }

  static Digest from_hex(std::string_view hex) { return Digest{hex_decode(hex)}; }
};

struct VulnerabilityMeta {
  VulId vul_id;
  std::string vendor;
  std::string device_class;
  std::uint8_t severity = 0;  // 0..10
  Timestamp reported_at = 0;
};

inline void validate(const VulnerabilityMeta& meta) {
  if (meta.vul_id.empty()) throw std::invalid_argument("vulnerability meta needs a vul_id");
  if (meta.severity > 10) throw std::invalid_argument("severity is graded 0..10");
}

inline std::string canonical_bytes(const VulnerabilityMeta& meta) {
  return canonical_encode({meta.vul_id, meta.vendor, meta.device_class,
                           std::string(1, static_cast<char>(meta.severity)),
                           be64(meta.reported_at)});
}

}  // namespace uivtsp
