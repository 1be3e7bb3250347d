#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "uivtsp/context.hpp"
#include "uivtsp/token.hpp"
#include "uivtsp/types.hpp"

namespace uivtsp {

// Where a document copy currently sits: the host's MAC address and the local
// clock at evaluation time.
struct HostEnvironment {
  MacAddress mac;
  Timestamp now = 0;
};

// State the protection wrapper carries alongside the payload: the revoked
// token the embedded tracing value was derived from, and the origin
// coordinates used when phoning home.
struct GuardContext {
  Digest revoked_token_value;
  SwId sw_id;
  VulId vul_id;
};

// Outcome of the MAC-bound self check: 0 keeps lurking, 1 reacts.
enum class VerificationFlag : std::uint8_t { match = 0, mismatch = 1 };

struct FeedbackMessage {
  Digest tracing_value;
  VulId vul_id;
  SwId sw_id;
  MacAddress mac_current;
  Timestamp t_feedback = 0;
};

struct GuardVerdict {
  enum class Kind { lurk, destroyed, destroyed_silent, false_doc_observed };

  Kind kind = Kind::lurk;
  std::optional<FeedbackMessage> feedback;

  bool document_destroyed() const {
    return kind == Kind::destroyed || kind == Kind::destroyed_silent;
  }
};

// Recomputes the tracing value from the wrapped revoked token and the MAC of
// the host the copy currently sits on, and compares with the embedded value.
// On the licensed host the two agree. Exactly one counted hash.
inline VerificationFlag self_check(const SealedDocument& sealed, const GuardContext& guard,
                                   const HostEnvironment& env, OpCounters& ops) {
  auto extracted = extract_tracing_token(sealed);
  if (extracted.status != ExtractStatus::found)
    throw std::logic_error("self check needs an extractable tracing token");
  Digest recomputed =
      counted_digest(canonical_encode({guard.revoked_token_value.bytes, env.mac.bytes()}),
                     extracted.value.width_bits(), ops);
  return recomputed == extracted.value ? VerificationFlag::match : VerificationFlag::mismatch;
}

// Full decision procedure for a copy evaluated on some host:
//   - no recoverable tracing token (stripped or damaged trailer): destroy, no report;
//   - MAC matches: keep lurking;
//   - MAC mismatch on a real document: destroy and report;
//   - MAC mismatch on a false document inside its validity window: report the
//     observed host but leave the bait intact;
//   - MAC mismatch on an expired false document: destroy quietly.
inline GuardVerdict enforce(const SealedDocument& sealed, const GuardContext& guard,
                            const HostEnvironment& env, OpCounters& ops) {
  auto extracted = extract_tracing_token(sealed);
  if (extracted.status != ExtractStatus::found)
    return GuardVerdict{GuardVerdict::Kind::destroyed_silent, std::nullopt};
  if (self_check(sealed, guard, env, ops) == VerificationFlag::match)
    return GuardVerdict{GuardVerdict::Kind::lurk, std::nullopt};
  FeedbackMessage feedback{extracted.value, guard.vul_id, guard.sw_id, env.mac, env.now};
  if (!sealed.is_false)
    return GuardVerdict{GuardVerdict::Kind::destroyed, std::move(feedback)};
  if (sealed.valid_until && env.now <= *sealed.valid_until)
    return GuardVerdict{GuardVerdict::Kind::false_doc_observed, std::move(feedback)};
  return GuardVerdict{GuardVerdict::Kind::destroyed_silent, std::nullopt};
}

// Byte-identical copy of the document moved to a foreign host, then the guard
// evaluated at the destination.
inline std::pair<SealedDocument, GuardVerdict> simulate_exfiltration(
    const SealedDocument& sealed, const GuardContext& guard, const HostEnvironment& from,
    const HostEnvironment& to, OpCounters& ops) {
  if (from.mac == to.mac)
    throw std::invalid_argument("exfiltration needs distinct source and destination hosts");
  auto copy = parse_sealed(seal_to_bytes(sealed));
  if (!copy) throw std::logic_error("sealed document failed to round-trip");
  GuardVerdict verdict = enforce(*copy, guard, to, ops);
  return {std::move(*copy), std::move(verdict)};
}

}  // namespace uivtsp
