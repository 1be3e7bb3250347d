#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uivtsp/context.hpp"
#include "uivtsp/encoding.hpp"
#include "uivtsp/hash.hpp"
#include "uivtsp/types.hpp"

namespace uivtsp {

enum class TokenStatus : std::uint8_t { revoked = 0, active = 1 };

inline const char* to_string(TokenStatus s) {
  return s == TokenStatus::active ? "active" : "revoked";
}

// Per-worker, per-vulnerability access capability. The value is a digest of
// (sw_id, vulnerability meta, issue time, nonce); the epoch counts issuances
// for the pair and increases by one on every rotation.
struct AccessToken {
  Digest value;
  SwId sw_id;
  VulId vul_id;
  std::uint64_t epoch = 0;
  TokenStatus status = TokenStatus::active;
  Timestamp created_at = 0;
};

// Leak-attribution value bound to a token generation and the holder's
// registered MAC address. Embedded into released documents and logged, so a
// copy found anywhere identifies its authorized recipient.
struct TracingToken {
  Digest value;
  SwId sw_id;
  VulId vul_id;
  MacAddress bound_mac;
  std::uint64_t source_epoch = 0;
};

struct VulnerabilityDocument {
  VulnerabilityMeta meta;
  std::string payload;
};

// A document prepared for release: payload plus `embed_count` identical copies
// of the tracing value. False documents carry an expiry time; real ones never
// do.
struct SealedDocument {
  VulnerabilityDocument doc;
  std::vector<Digest> embedded;
  bool is_false = false;
  std::optional<Timestamp> valid_until;
};

inline AccessToken generate_access_token(const SwId& sw_id, const VulnerabilityMeta& meta,
                                         Timestamp now, const Nonce& nonce, int width_k,
                                         OpCounters& ops, std::uint64_t epoch = 0) {
  if (sw_id.empty()) throw std::invalid_argument("access token needs a worker id");
  validate(meta);
  Digest value = counted_digest(
      canonical_encode({sw_id, canonical_bytes(meta), be64(now), nonce.bytes()}), width_k, ops);
  return AccessToken{std::move(value), sw_id, meta.vul_id, epoch, TokenStatus::active, now};
}

// Revokes the current token and issues the follower in one step. The revoked
// half keeps its value so tracing derivation can still refer to it.
inline std::pair<AccessToken, AccessToken> rotate_access_token(const AccessToken& current,
                                                               const VulnerabilityMeta& meta,
                                                               Timestamp now, const Nonce& fresh_nonce,
                                                               OpCounters& ops) {
  if (current.status != TokenStatus::active)
    throw std::logic_error("only an active token can be rotated");
  if (meta.vul_id != current.vul_id)
    throw std::invalid_argument("rotation must use the token's own vulnerability");
  AccessToken revoked = current;
  revoked.status = TokenStatus::revoked;
  AccessToken next = generate_access_token(current.sw_id, meta, now, fresh_nonce,
                                           current.value.width_bits(), ops, current.epoch + 1);
  return {std::move(revoked), std::move(next)};
}

inline TracingToken derive_tracing_token(const AccessToken& revoked, const MacAddress& mac,
                                         OpCounters& ops) {
  if (revoked.status != TokenStatus::revoked)
    throw std::logic_error("tracing derives from the just-revoked token");
  Digest value = counted_digest(canonical_encode({revoked.value.bytes, mac.bytes()}),
                                revoked.value.width_bits(), ops);
  return TracingToken{std::move(value), revoked.sw_id, revoked.vul_id, mac, revoked.epoch};
}

inline SealedDocument embed_tracing_token(const VulnerabilityDocument& doc,
                                          const TracingToken& tracing, int embed_count,
                                          bool is_false, std::optional<Timestamp> valid_until) {
  if (embed_count < 1 || embed_count > 4)
    throw std::invalid_argument("embed count must be between 1 and 4");
  if (is_false && (!valid_until || *valid_until == 0))
    throw std::invalid_argument("a false document needs a nonzero expiry");
  if (!is_false && valid_until)
    throw std::invalid_argument("real documents carry no expiry");
  SealedDocument sealed;
  sealed.doc = doc;
  sealed.embedded.assign(static_cast<std::size_t>(embed_count), tracing.value);
  sealed.is_false = is_false;
  sealed.valid_until = valid_until;
  return sealed;
}

// ---------------------------------------------------------------------------
// wire form
//
// A sealed document serializes as
//
//   body    := canonical_encode([vul_id, vendor, device_class,
//                                severity (1 byte), reported_at (8 bytes BE),
//                                payload])
//   trailer := "UIVT" | embed_count u8 | width_k u16 BE | is_false u8 |
//              valid_until u64 BE (0 = none) | embed_count tracing copies
//              of width_k/8 bytes each
//   bytes   := body | trailer
//
// The trailer header is 16 bytes. Parsing tries each of the twelve
// (width, count) trailer sizes against the end of the buffer and accepts the
// one whose header is self-consistent.
// ---------------------------------------------------------------------------

inline constexpr char kTrailerMagic[4] = {'U', 'I', 'V', 'T'};
inline constexpr std::size_t kTrailerHeaderSize = 16;

inline std::string seal_to_bytes(const SealedDocument& sealed) {
  if (sealed.embedded.empty()) throw std::logic_error("sealed document has no embedded copies");
  const int width_k = sealed.embedded.front().width_bits();
  require_width(width_k);
  std::string out =
      canonical_encode({sealed.doc.meta.vul_id, sealed.doc.meta.vendor, sealed.doc.meta.device_class,
                        std::string(1, static_cast<char>(sealed.doc.meta.severity)),
                        be64(sealed.doc.meta.reported_at), sealed.doc.payload});
  out.append(kTrailerMagic, sizeof kTrailerMagic);
  out.push_back(static_cast<char>(sealed.embedded.size()));
  out.push_back(static_cast<char>((width_k >> 8) & 0xff));
  out.push_back(static_cast<char>(width_k & 0xff));
  out.push_back(sealed.is_false ? '\x01' : '\x00');
  append_be64(out, sealed.valid_until.value_or(0));
  for (const auto& copy : sealed.embedded) out.append(copy.bytes);
  return out;
}

inline std::optional<SealedDocument> parse_sealed(std::string_view bytes) {
  for (int width_k : kSupportedWidths) {
    for (int count = 1; count <= 4; ++count) {
      const std::size_t trailer = kTrailerHeaderSize + static_cast<std::size_t>(count) * (width_k / 8);
      if (bytes.size() < trailer + 4) continue;
      const std::size_t at = bytes.size() - trailer;
      if (bytes.compare(at, 4, kTrailerMagic, 4) != 0) continue;
      if (static_cast<unsigned char>(bytes[at + 4]) != static_cast<unsigned>(count)) continue;
      int parsed_width = (static_cast<unsigned char>(bytes[at + 5]) << 8) |
                         static_cast<unsigned char>(bytes[at + 6]);
      if (parsed_width != width_k) continue;
      unsigned char false_byte = static_cast<unsigned char>(bytes[at + 7]);
      if (false_byte > 1) continue;
      auto fields = canonical_decode(bytes.substr(0, at));
      if (!fields || fields->size() != 6) continue;
      if ((*fields)[3].size() != 1 || (*fields)[4].size() != 8) continue;
      std::uint64_t valid_raw = read_be64(bytes, at + 8);
      SealedDocument sealed;
      sealed.doc.meta.vul_id = (*fields)[0];
      sealed.doc.meta.vendor = (*fields)[1];
      sealed.doc.meta.device_class = (*fields)[2];
      sealed.doc.meta.severity = static_cast<std::uint8_t>((*fields)[3][0]);
      sealed.doc.meta.reported_at = read_be64((*fields)[4], 0);
      sealed.doc.payload = (*fields)[5];
      sealed.is_false = false_byte == 1;
      if (valid_raw != 0) sealed.valid_until = valid_raw;
      std::size_t copy_at = at + kTrailerHeaderSize;
      for (int i = 0; i < count; ++i) {
        sealed.embedded.push_back(Digest{std::string(bytes.substr(copy_at, width_k / 8))});
        copy_at += width_k / 8;
      }
      return sealed;
    }
  }
  return std::nullopt;
}

enum class ExtractStatus { found, missing, corrupted };

struct ExtractResult {
  ExtractStatus status = ExtractStatus::missing;
  Digest value;
};

// Unanimity rule: every embedded copy must agree or the trailer is treated as
// damaged. No hashing happens here, only byte comparison.
inline ExtractResult extract_tracing_token(const SealedDocument& sealed) {
  if (sealed.embedded.empty()) return {ExtractStatus::missing, {}};
  for (std::size_t i = 1; i < sealed.embedded.size(); ++i)
    if (sealed.embedded[i].bytes != sealed.embedded.front().bytes)
      return {ExtractStatus::corrupted, {}};
  return {ExtractStatus::found, sealed.embedded.front()};
}

inline ExtractResult extract_tracing_token(std::string_view bytes) {
  auto sealed = parse_sealed(bytes);
  if (!sealed) return {ExtractStatus::missing, {}};
  return extract_tracing_token(*sealed);
}

}  // namespace uivtsp
