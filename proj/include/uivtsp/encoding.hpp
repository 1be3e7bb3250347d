#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uivtsp {

inline void append_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

inline void append_be64(std::string& out, std::uint64_t v) {
  append_be32(out, static_cast<std::uint32_t>(v >> 32));
  append_be32(out, static_cast<std::uint32_t>(v & 0xffffffffULL));
}

inline std::string be64(std::uint64_t v) {
  std::string out;
  out.reserve(8);
  append_be64(out, v);
  return out;
}

// Appender forms of the canonical field framing below, for hot paths that
// reuse a scratch buffer instead of materialising per-field strings.
inline void append_field(std::string& out, std::string_view bytes) {
  append_be32(out, static_cast<std::uint32_t>(bytes.size()));
  out.append(bytes);
}

inline void append_u64_field(std::string& out, std::uint64_t v) {
  append_be32(out, 8);
  append_be64(out, v);
}

inline std::uint32_t read_be32(std::string_view bytes, std::size_t at) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 3]));
}

inline std::uint64_t read_be64(std::string_view bytes, std::size_t at) {
  return (static_cast<std::uint64_t>(read_be32(bytes, at)) << 32) |
         static_cast<std::uint64_t>(read_be32(bytes, at + 4));
}

// Length-prefixed field framing used for everything that gets hashed: a 4-byte
// big-endian field count, then per field a 4-byte big-endian byte length
// followed by the raw bytes. Unambiguous, so distinct field lists always
// produce distinct encodings.
inline std::string canonical_encode(std::span<const std::string> fields) {
  std::size_t total = 4;
  for (const auto& f : fields) total += 4 + f.size();
  std::string out;
  out.reserve(total);
  append_be32(out, static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) {
    append_be32(out, static_cast<std::uint32_t>(f.size()));
    out.append(f);
  }
  return out;
}

inline std::string canonical_encode(std::initializer_list<std::string> fields) {
  return canonical_encode(std::span<const std::string>(fields.begin(), fields.size()));
}

// Inverse of canonical_encode. Empty optional when the framing is malformed
// or the buffer has trailing bytes.
inline std::optional<std::vector<std::string>> canonical_decode(std::string_view bytes) {
  if (bytes.size() < 4) return std::nullopt;
  std::uint32_t count = read_be32(bytes, 0);
  std::size_t at = 4;
  std::vector<std::string> fields;
  fields.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (bytes.size() - at < 4) return std::nullopt;
    std::uint32_t len = read_be32(bytes, at);
    at += 4;
    if (bytes.size() - at < len) return std::nullopt;
    fields.emplace_back(bytes.substr(at, len));
    at += len;
  }
  if (at != bytes.size()) return std::nullopt;
  return fields;
}

inline std::string hex_encode(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0x0f]);
  }
  return out;
}

inline int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline std::string hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("hex string has non-hex character");
    out.push_back(static_cast<char>((hi << 4) | lo));
  }
  return out;
}

}  // namespace uivtsp
