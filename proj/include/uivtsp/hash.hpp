#pragma once

#define OPENSSL_SUPPRESS_DEPRECATED  // low-level SHA ctx API: hot path, EVP dispatch is ~3x slower
#include <openssl/sha.h>

#include <stdexcept>
#include <string>
#include <string_view>

#include "uivtsp/types.hpp"

namespace uivtsp {

inline constexpr int kSupportedWidths[] = {256, 512, 1024};

inline bool width_supported(int width_k) {
  return width_k == 256 || width_k == 512 || width_k == 1024;
}

inline void require_width(int width_k) {
  if (!width_supported(width_k))
    throw std::invalid_argument("digest width must be 256, 512 or 1024 bits");
}

namespace detail {

inline void sha256_into(unsigned char* out, std::string_view data) {
  SHA256_CTX ctx;
  SHA256_Init(&ctx);
  SHA256_Update(&ctx, data.data(), data.size());
  SHA256_Final(out, &ctx);
}

inline void sha512_into(unsigned char* out, std::string_view data, char prefix = 0,
                        bool use_prefix = false) {
  SHA512_CTX ctx;
  SHA512_Init(&ctx);
  if (use_prefix) SHA512_Update(&ctx, &prefix, 1);
  SHA512_Update(&ctx, data.data(), data.size());
  SHA512_Final(out, &ctx);
}

}  // namespace detail

// Writes the digest into `out`, reusing its capacity. Hot loops (Merkle tree
// folding, per-block hashing) call this to avoid reallocating result strings.
inline void digest_into(std::string& out, std::string_view data, int width_k) {
  require_width(width_k);
  unsigned char buf[2 * SHA512_DIGEST_LENGTH];
  switch (width_k) {
    case 256:
      detail::sha256_into(buf, data);
      out.assign(reinterpret_cast<const char*>(buf), SHA256_DIGEST_LENGTH);
      return;
    case 512:
      detail::sha512_into(buf, data);
      out.assign(reinterpret_cast<const char*>(buf), SHA512_DIGEST_LENGTH);
      return;
    default:
      detail::sha512_into(buf, data, 0x00, true);
      detail::sha512_into(buf + SHA512_DIGEST_LENGTH, data, 0x01, true);
      out.assign(reinterpret_cast<const char*>(buf), 2 * SHA512_DIGEST_LENGTH);
      return;
  }
}

// The configurable-width hash behind every token and ledger entry.
// 256 -> SHA-256, 512 -> SHA-512, 1024 -> two domain-separated SHA-512 lanes
// (0x00 || data and 0x01 || data) concatenated. The 1024-bit form still counts
// as a single logical hash invocation wherever invocations are counted.
inline Digest digest(std::string_view data, int width_k) {
  Digest d;
  digest_into(d.bytes, data, width_k);
  return d;
}

inline Digest zero_digest(int width_k) {
  require_width(width_k);
  return Digest{std::string(static_cast<std::size_t>(width_k / 8), '\0')};
}

}  // namespace uivtsp
