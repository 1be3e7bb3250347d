#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uivtsp/encoding.hpp"
#include "uivtsp/hash.hpp"
#include "uivtsp/token.hpp"
#include "uivtsp/types.hpp"

namespace uivtsp {

// ---------------------------------------------------------------------------
// leaf kinds
// ---------------------------------------------------------------------------

struct AccessTokenLeaf {
  Digest value;
  SwId sw_id;
  VulId vul_id;
  std::uint64_t epoch = 0;
  TokenStatus status = TokenStatus::active;
};

struct TracingTokenLeaf {
  Digest value;
  SwId sw_id;
  VulId vul_id;
  MacAddress bound_mac;
};

struct TrustOldLeaf {
  std::int64_t sec = 0;
  std::int64_t lek = 0;
};

struct TrustNewLeaf {
  std::int64_t sec = 0;
  std::int64_t lek = 0;
};

struct AccessRequestLeaf {
  SwId sw_id;
  VulId vul_id;
  Timestamp time = 0;
};

struct FalseFlagLeaf {
  bool released_false = false;
};

using LogLeaf = std::variant<AccessTokenLeaf, TracingTokenLeaf, TrustOldLeaf, TrustNewLeaf,
                             AccessRequestLeaf, FalseFlagLeaf>;

// Appenders write the same length-prefixed framing canonical_encode produces,
// without per-field temporaries; the string forms below wrap them.
inline void canonical_body_append(std::string& out, const AccessTokenLeaf& l) {
  append_be32(out, 5);
  append_field(out, l.value.bytes);
  append_field(out, l.sw_id);
  append_field(out, l.vul_id);
  append_u64_field(out, l.epoch);
  const char status = static_cast<char>(l.status);
  append_field(out, std::string_view(&status, 1));
}

inline void canonical_body_append(std::string& out, const TracingTokenLeaf& l) {
  append_be32(out, 4);
  append_field(out, l.value.bytes);
  append_field(out, l.sw_id);
  append_field(out, l.vul_id);
  append_field(out, l.bound_mac.bytes());
}

inline void canonical_body_append(std::string& out, const TrustOldLeaf& l) {
  append_be32(out, 2);
  append_u64_field(out, static_cast<std::uint64_t>(l.sec));
  append_u64_field(out, static_cast<std::uint64_t>(l.lek));
}

inline void canonical_body_append(std::string& out, const TrustNewLeaf& l) {
  append_be32(out, 2);
  append_u64_field(out, static_cast<std::uint64_t>(l.sec));
  append_u64_field(out, static_cast<std::uint64_t>(l.lek));
}

inline void canonical_body_append(std::string& out, const AccessRequestLeaf& l) {
  append_be32(out, 3);
  append_field(out, l.sw_id);
  append_field(out, l.vul_id);
  append_u64_field(out, l.time);
}

inline void canonical_body_append(std::string& out, const FalseFlagLeaf& l) {
  append_be32(out, 1);
  const char flag = l.released_false ? '\x01' : '\x00';
  append_field(out, std::string_view(&flag, 1));
}

template <typename Leaf>
inline std::string canonical_body(const Leaf& l) {
  std::string out;
  canonical_body_append(out, l);
  return out;
}

inline std::uint8_t leaf_kind_byte(const LogLeaf& leaf) {
  return static_cast<std::uint8_t>(leaf.index() + 1);
}

inline const char* leaf_kind_name(const LogLeaf& leaf) {
  static constexpr const char* kNames[] = {"access_token", "tracing_token", "trust_old",
                                           "trust_new",    "access_request", "false_flag"};
  return kNames[leaf.index()];
}

// Leaf hash is domain-separated by a kind byte, so two kinds with identical
// field bytes can never collide in the tree. The _into form reuses caller
// buffers; block append runs it tens of thousands of times per simulation.
inline void leaf_hash_into(Digest& out, std::string& scratch, const LogLeaf& leaf, int width_k) {
  scratch.clear();
  scratch.push_back(static_cast<char>(leaf_kind_byte(leaf)));
  std::visit([&scratch](const auto& l) { canonical_body_append(scratch, l); }, leaf);
  digest_into(out.bytes, scratch, width_k);
}

inline Digest leaf_hash(const LogLeaf& leaf, int width_k) {
  Digest out;
  std::string scratch;
  leaf_hash_into(out, scratch, leaf, width_k);
  return out;
}

namespace detail {

// Folds the first n digests of level into level[0] without shrinking the
// vector, so element capacity survives for the next block. Writes parent p
// after reading children 2p and 2p+1, which it never clobbers since 2p >= p
// and the pair bytes are copied to scratch before the overwrite.
inline void merkle_fold(std::vector<Digest>& level, std::size_t n, int width_k,
                        std::string& scratch) {
  while (n > 1) {
    const std::size_t parents = (n + 1) / 2;
    for (std::size_t p = 0; p < parents; ++p) {
      const Digest& left = level[2 * p];
      const Digest& right = (2 * p + 1 < n) ? level[2 * p + 1] : level[2 * p];
      scratch.clear();
      append_be32(scratch, 2);
      append_field(scratch, left.bytes);
      append_field(scratch, right.bytes);
      digest_into(level[p].bytes, scratch, width_k);
    }
    n = parents;
  }
}

}  // namespace detail

// Binary tree, odd node duplicated at each level, single leaf hashes to
// itself.
inline Digest merkle_root(std::vector<Digest> level, int width_k) {
  if (level.empty()) throw std::invalid_argument("merkle tree needs at least one leaf");
  std::string scratch;
  detail::merkle_fold(level, level.size(), width_k, scratch);
  return std::move(level.front());
}

// ---------------------------------------------------------------------------
// blocks
// ---------------------------------------------------------------------------

struct BlockHead {
  std::uint64_t block_id = 0;
  Digest prev_hash;
  Timestamp timestamp = 0;
  Digest merkle_root;
  SwId sw_id;
  double trust_value = 0.0;
  Digest vul_meta_digest;
};

struct Block {
  BlockHead head;
  std::vector<LogLeaf> leaves;
};

inline void head_frame_append(std::string& out, const BlockHead& head) {
  append_be32(out, 7);
  append_u64_field(out, head.block_id);
  append_field(out, head.prev_hash.bytes);
  append_u64_field(out, head.timestamp);
  append_field(out, head.merkle_root.bytes);
  append_field(out, head.sw_id);
  append_u64_field(out, std::bit_cast<std::uint64_t>(head.trust_value));
  append_field(out, head.vul_meta_digest.bytes);
}

inline Digest head_hash(const BlockHead& head, int width_k) {
  std::string frame;
  head_frame_append(frame, head);
  return digest(frame, width_k);
}

struct VerifyResult {
  bool valid = true;
  std::size_t height = 0;
  std::string reason;

  static VerifyResult ok(std::size_t n) { return {true, n, ""}; }
  static VerifyResult bad(std::size_t h, std::string why) { return {false, h, std::move(why)}; }
};

// Whole-chain recomputation: ordinals, every merkle root, every head link, and
// (when given) the externally held tip anchor over the final head. The anchor
// is what makes edits to the last block's head detectable.
inline VerifyResult verify_blocks(const std::vector<Block>& blocks, int width_k,
                                  const Digest* expected_tip) {
  Digest running = zero_digest(width_k);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.head.block_id != i) return VerifyResult::bad(i, "block id does not match height");
    if (b.leaves.empty()) return VerifyResult::bad(i, "block has no leaves");
    if (b.head.prev_hash != running) return VerifyResult::bad(i, "hash link mismatch");
    std::vector<Digest> hashes;
    hashes.reserve(b.leaves.size());
    for (const auto& leaf : b.leaves) hashes.push_back(leaf_hash(leaf, width_k));
    if (merkle_root(std::move(hashes), width_k) != b.head.merkle_root)
      return VerifyResult::bad(i, "merkle root mismatch");
    running = head_hash(b.head, width_k);
  }
  if (expected_tip && *expected_tip != running)
    return VerifyResult::bad(blocks.empty() ? 0 : blocks.size() - 1, "tip hash mismatch");
  return VerifyResult::ok(blocks.size());
}

class LedgerParseError : public std::runtime_error {
 public:
  explicit LedgerParseError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

// Single-writer private chain. Append is the only mutation; the running tip
// hash anchors the newest head. Lookup indexes are rebuilt from block content
// on load and are pure caches over the block list.
class Chain {
 public:
  explicit Chain(int width_k) : width_(width_k), tip_(zero_digest(width_k)) {}

  int width_k() const { return width_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Digest& tip_hash() const { return tip_; }

  const Block& append(const SwId& sw_id, double trust_value, const Digest& vul_meta_digest,
                      std::vector<LogLeaf> leaves, Timestamp now) {
    if (leaves.empty()) throw std::invalid_argument("a block needs at least one leaf");
    if (!blocks_.empty() && now < blocks_.back().head.timestamp)
      throw std::logic_error("block timestamps must not decrease");
    Block block;
    block.head.block_id = blocks_.size();
    block.head.prev_hash = tip_;
    block.head.timestamp = now;
    block.head.sw_id = sw_id;
    block.head.trust_value = trust_value;
    block.head.vul_meta_digest = vul_meta_digest;
    if (hash_scratch_.size() < leaves.size()) hash_scratch_.resize(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i)
      leaf_hash_into(hash_scratch_[i], encode_scratch_, leaves[i], width_);
    detail::merkle_fold(hash_scratch_, leaves.size(), width_, encode_scratch_);
    block.head.merkle_root = hash_scratch_.front();
    block.leaves = std::move(leaves);
    encode_scratch_.clear();
    head_frame_append(encode_scratch_, block.head);
    digest_into(tip_.bytes, encode_scratch_, width_);
    blocks_.push_back(std::move(block));
    index_block(blocks_.back(), blocks_.size() - 1);
    return blocks_.back();
  }

  VerifyResult verify() const { return verify_blocks(blocks_, width_, &tip_); }

  // Newest token entry for the pair; empty when the pair has none or the
  // newest entry is a revocation.
  std::optional<AccessTokenLeaf> latest_access_token(const SwId& sw_id, const VulId& vul_id) const {
    auto it = token_index_.find(canonical_encode({sw_id, vul_id}));
    if (it == token_index_.end()) return std::nullopt;
    if (it->second.status != TokenStatus::active) return std::nullopt;
    return it->second;
  }

  struct TrustSnapshot {
    std::int64_t sec = 0;
    std::int64_t lek = 0;
    double trust_value = 0.0;
  };

  // Counts from the newest trust entry in a block headed by the worker, plus
  // that head's cached trust value.
  std::optional<TrustSnapshot> latest_trust(const SwId& sw_id) const {
    auto it = trust_index_.find(sw_id);
    if (it == trust_index_.end()) return std::nullopt;
    return it->second;
  }

  struct TracingRecord {
    SwId sw_id;
    VulId vul_id;
    MacAddress bound_mac;
    std::size_t block_index = 0;
    bool released_false = false;
  };

  std::optional<TracingRecord> lookup_by_tracing_token(const Digest& value) const {
    const TracingRecord* rec = tracing_index_.find(value.bytes);
    if (!rec) return std::nullopt;
    return *rec;
  }

  // -------------------------------------------------------------------------
  // persistence: one JSON object per line, one block per line, then a final
  // {"tip_hash": ...} trailer line anchoring the last head.
  // -------------------------------------------------------------------------

  std::string to_jsonl() const {
    std::string out;
    for (const Block& b : blocks_) {
      out += block_to_json(b).dump();
      out.push_back('\n');
    }
    nlohmann::ordered_json tip;
    tip["tip_hash"] = tip_.hex();
    out += tip.dump();
    out.push_back('\n');
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_jsonl();
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  static Chain from_jsonl(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos)
        throw LedgerParseError("truncated ledger: missing final newline");
      lines.emplace_back(text.substr(start, end - start));
      start = end + 1;
    }
    if (lines.empty()) throw LedgerParseError("empty ledger file");
    nlohmann::ordered_json tip_line = parse_line(lines.back(), lines.size());
    if (!tip_line.contains("tip_hash") || !tip_line["tip_hash"].is_string())
      throw LedgerParseError("last line must be the tip_hash trailer");
    Digest tip = parse_digest(tip_line["tip_hash"], 0, lines.size());
    if (!width_supported(tip.width_bits()))
      throw LedgerParseError("tip hash has unsupported digest width");
    Chain chain(tip.width_bits());
    for (std::size_t i = 0; i + 1 < lines.size(); ++i)
      chain.push_parsed(block_from_json(parse_line(lines[i], i + 1), chain.width_, i + 1));
    chain.tip_ = std::move(tip);
    return chain;
  }

  static Chain load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LedgerParseError("cannot open ledger file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
  }

 private:
  // Flat open-addressed index over tracing-token values. One entry lands here
  // per embedded token per grant, so the table outgrows cache within a long
  // run; linear probing over a contiguous slot array keeps that maintenance
  // off the node-based-map path that degrades badly once lookups miss cache.
  // Keyed by the first 8 bytes of the token digest (uniformly distributed),
  // with the stored full value disambiguating the rare prefix collision.
  class TracingIndex {
   public:
    void insert(const std::string& value, TracingRecord rec) {
      if (slots_.empty() || (used_ + 1) * 10 >= slots_.size() * 6) grow();
      const std::size_t at = probe(value);
      if (slots_[at].rec == kEmpty) {
        slots_[at] = Slot{read_be64(value, 0), static_cast<std::uint32_t>(entries_.size())};
        entries_.push_back(Entry{value, std::move(rec)});
        ++used_;
      } else {
        entries_[slots_[at].rec].record = std::move(rec);
      }
    }

    const TracingRecord* find(const std::string& value) const {
      if (slots_.empty()) return nullptr;
      const std::size_t at = probe(value);
      if (slots_[at].rec == kEmpty) return nullptr;
      return &entries_[slots_[at].rec].record;
    }

   private:
    struct Slot {
      std::uint64_t prefix = 0;
      std::uint32_t rec = kEmpty;
    };
    struct Entry {
      std::string value;
      TracingRecord record;
    };
    static constexpr std::uint32_t kEmpty = 0xffffffffu;

    // slot holding the value, or the empty slot an insert would claim
    std::size_t probe(const std::string& value) const {
      const std::uint64_t prefix = read_be64(value, 0);
      const std::size_t mask = slots_.size() - 1;
      std::size_t at = static_cast<std::size_t>(prefix) & mask;
      while (slots_[at].rec != kEmpty &&
             (slots_[at].prefix != prefix || entries_[slots_[at].rec].value != value))
        at = (at + 1) & mask;
      return at;
    }

    void grow() {
      const std::size_t cap = slots_.empty() ? 1024 : slots_.size() * 2;
      std::vector<Slot> old = std::move(slots_);
      slots_.assign(cap, Slot{});
      const std::size_t mask = cap - 1;
      for (const Slot& s : old) {
        if (s.rec == kEmpty) continue;
        std::size_t at = static_cast<std::size_t>(s.prefix) & mask;
        while (slots_[at].rec != kEmpty) at = (at + 1) & mask;
        slots_[at] = s;
      }
    }

    std::vector<Slot> slots_;
    std::vector<Entry> entries_;
    std::size_t used_ = 0;
  };

  void push_parsed(Block block) {
    blocks_.push_back(std::move(block));
    index_block(blocks_.back(), blocks_.size() - 1);
  }

  void index_block(const Block& block, std::size_t idx) {
    bool released_false = false;
    for (const auto& leaf : block.leaves)
      if (const auto* f = std::get_if<FalseFlagLeaf>(&leaf)) released_false = f->released_false;
    for (const auto& leaf : block.leaves) {
      if (const auto* t = std::get_if<AccessTokenLeaf>(&leaf)) {
        token_index_[canonical_encode({t->sw_id, t->vul_id})] = *t;
      } else if (const auto* t = std::get_if<TracingTokenLeaf>(&leaf)) {
        tracing_index_.insert(t->value.bytes,
                              TracingRecord{t->sw_id, t->vul_id, t->bound_mac, idx, released_false});
      } else if (const auto* t = std::get_if<TrustNewLeaf>(&leaf)) {
        trust_index_[block.head.sw_id] = TrustSnapshot{t->sec, t->lek, block.head.trust_value};
      }
    }
  }

  static nlohmann::ordered_json leaf_to_json(const LogLeaf& leaf) {
    nlohmann::ordered_json j;
    j["kind"] = leaf_kind_name(leaf);
    std::visit(
        [&j](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, AccessTokenLeaf>) {
            j["token"] = l.value.hex();
            j["sw_id"] = l.sw_id;
            j["vul_id"] = l.vul_id;
            j["epoch"] = l.epoch;
            j["status"] = to_string(l.status);
          } else if constexpr (std::is_same_v<T, TracingTokenLeaf>) {
            j["token"] = l.value.hex();
            j["sw_id"] = l.sw_id;
            j["vul_id"] = l.vul_id;
            j["mac"] = l.bound_mac.text();
          } else if constexpr (std::is_same_v<T, TrustOldLeaf> || std::is_same_v<T, TrustNewLeaf>) {
            j["sec"] = l.sec;
            j["lek"] = l.lek;
          } else if constexpr (std::is_same_v<T, AccessRequestLeaf>) {
            j["sw_id"] = l.sw_id;
            j["vul_id"] = l.vul_id;
            j["time"] = l.time;
          } else {
            j["value"] = l.released_false;
          }
        },
        leaf);
    return j;
  }

  static nlohmann::ordered_json block_to_json(const Block& b) {
    nlohmann::ordered_json j;
    j["block_id"] = b.head.block_id;
    j["prev_hash"] = b.head.prev_hash.hex();
    j["timestamp"] = b.head.timestamp;
    j["merkle_root"] = b.head.merkle_root.hex();
    j["sw_id"] = b.head.sw_id;
    j["trust_value"] = b.head.trust_value;
    j["vul_meta_digest"] = b.head.vul_meta_digest.hex();
    nlohmann::ordered_json leaves = nlohmann::ordered_json::array();
    for (const auto& leaf : b.leaves) leaves.push_back(leaf_to_json(leaf));
    j["leaves"] = leaves;
    return j;
  }

  static nlohmann::ordered_json parse_line(const std::string& line, std::size_t lineno) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw LedgerParseError("line " + std::to_string(lineno) + ": not a JSON object");
    return j;
  }

  static Digest parse_digest(const nlohmann::ordered_json& v, int expect_width,
                             std::size_t lineno) {
    if (!v.is_string()) throw LedgerParseError("line " + std::to_string(lineno) + ": digest must be hex string");
    Digest d;
    try {
      d = Digest::from_hex(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw LedgerParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (expect_width != 0 && d.width_bits() != expect_width)
      throw LedgerParseError("line " + std::to_string(lineno) + ": digest width mismatch");
    return d;
  }

  static LogLeaf leaf_from_json(const nlohmann::ordered_json& j, int width_k, std::size_t lineno) {
    auto fail = [lineno](const std::string& why) -> LedgerParseError {
      return LedgerParseError("line " + std::to_string(lineno) + ": " + why);
    };
    if (!j.contains("kind") || !j["kind"].is_string()) throw fail("leaf without kind");
    const std::string kind = j["kind"];
    try {
      if (kind == "access_token") {
        AccessTokenLeaf l;
        l.value = parse_digest(j.at("token"), width_k, lineno);
        l.sw_id = j.at("sw_id").get<std::string>();
        l.vul_id = j.at("vul_id").get<std::string>();
        l.epoch = j.at("epoch").get<std::uint64_t>();
        const std::string status = j.at("status").get<std::string>();
        if (status != "active" && status != "revoked") throw fail("unknown token status");
        l.status = status == "active" ? TokenStatus::active : TokenStatus::revoked;
        return l;
      }
      if (kind == "tracing_token") {
        TracingTokenLeaf l;
        l.value = parse_digest(j.at("token"), width_k, lineno);
        l.sw_id = j.at("sw_id").get<std::string>();
        l.vul_id = j.at("vul_id").get<std::string>();
        l.bound_mac = MacAddress::from_text(j.at("mac").get<std::string>());
        return l;
      }
      if (kind == "trust_old" || kind == "trust_new") {
        std::int64_t sec = j.at("sec").get<std::int64_t>();
        std::int64_t lek = j.at("lek").get<std::int64_t>();
        if (sec < 0 || lek < 0) throw fail("negative trust counts");
        if (kind == "trust_old") return TrustOldLeaf{sec, lek};
        return TrustNewLeaf{sec, lek};
      }
      if (kind == "access_request") {
        AccessRequestLeaf l;
        l.sw_id = j.at("sw_id").get<std::string>();
        l.vul_id = j.at("vul_id").get<std::string>();
        l.time = j.at("time").get<std::uint64_t>();
        return l;
      }
      if (kind == "false_flag") {
        if (!j.at("value").is_boolean()) throw fail("false_flag value must be boolean");
        return FalseFlagLeaf{j.at("value").get<bool>()};
      }
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("malformed leaf: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(std::string("malformed leaf: ") + e.what());
    }
    throw fail("unknown leaf kind '" + kind + "'");
  }

  static Block block_from_json(const nlohmann::ordered_json& j, int width_k, std::size_t lineno) {
    auto fail = [lineno](const std::string& why) -> LedgerParseError {
      return LedgerParseError("line " + std::to_string(lineno) + ": " + why);
    };
    Block b;
    try {
      b.head.block_id = j.at("block_id").get<std::uint64_t>();
      b.head.prev_hash = parse_digest(j.at("prev_hash"), width_k, lineno);
      b.head.timestamp = j.at("timestamp").get<std::uint64_t>();
      b.head.merkle_root = parse_digest(j.at("merkle_root"), width_k, lineno);
      b.head.sw_id = j.at("sw_id").get<std::string>();
      if (!j.at("trust_value").is_number()) throw fail("trust_value must be a number");
      b.head.trust_value = j.at("trust_value").get<double>();
      b.head.vul_meta_digest = parse_digest(j.at("vul_meta_digest"), width_k, lineno);
      if (!j.at("leaves").is_array() || j.at("leaves").empty()) throw fail("block needs a leaf array");
      for (const auto& lj : j.at("leaves")) b.leaves.push_back(leaf_from_json(lj, width_k, lineno));
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("malformed block: ") + e.what());
    }
    return b;
  }

  int width_;
  Digest tip_;
  std::vector<Block> blocks_;
  // append-path scratch; holds no state between calls beyond capacity
  std::vector<Digest> hash_scratch_;
  std::string encode_scratch_;
  std::unordered_map<std::string, AccessTokenLeaf> token_index_;
  std::unordered_map<std::string, TrustSnapshot> trust_index_;
  TracingIndex tracing_index_;
};

}  // namespace uivtsp
