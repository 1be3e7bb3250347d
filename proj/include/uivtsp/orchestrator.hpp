#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uivtsp/context.hpp"
#include "uivtsp/guard.hpp"
#include "uivtsp/ledger.hpp"
#include "uivtsp/token.hpp"
#include "uivtsp/trust.hpp"
#include "uivtsp/types.hpp"

namespace uivtsp {

// uiv_tsp is the full protocol; uiv_sp is the comparison baseline that keeps
// tokens, ledger and guard but has no trust mechanism: nobody is ever gated,
// trapped, reclassified or removed.
enum class Scheme { uiv_tsp, uiv_sp };

inline const char* to_string(Scheme s) { return s == Scheme::uiv_tsp ? "uiv-tsp" : "uiv-sp"; }

struct TaConfig {
  int width_k = 256;
  int embed_count = 2;
  Thresholds thresholds{};
  PenaltyMode penalty_mode = PenaltyMode::on_leak;
  Scheme scheme = Scheme::uiv_tsp;
  Timestamp trap_validity_ms = 5000;
};

inline void validate(const TaConfig& cfg) {
  require_width(cfg.width_k);
  if (cfg.embed_count < 1 || cfg.embed_count > 4)
    throw std::invalid_argument("embed count must be between 1 and 4");
  validate(cfg.thresholds);
  if (cfg.trap_validity_ms == 0) throw std::invalid_argument("trap validity must be positive");
}

struct AccessRequest {
  SwId sw_id;
  VulId vul_id;
  Timestamp time = 0;
};

struct AccessDecision {
  enum class Kind { denied, granted_real, granted_false };

  Kind kind = Kind::denied;
  std::string reason;
  std::optional<SealedDocument> document;
  std::optional<GuardContext> guard;

  bool granted() const { return kind != Kind::denied; }
};

struct WorkerRecord {
  SwId sw_id;
  MacAddress mac;
  TrustState trust;
  ConspiracyState conspiracy;
  bool removed = false;
  std::map<VulId, AccessToken> active_tokens;
  std::map<VulId, std::uint64_t> next_epoch;  // survives revocation, so re-listing continues the sequence
};

// The trusted authority: owns the worker registry, the vulnerability store and
// the private chain, and is the only writer of all three. Every externally
// visible event appends exactly one block.
class TrustedAuthority {
 public:
  TrustedAuthority(const TaConfig& cfg, RunContext& ctx)
      : cfg_(cfg), ctx_(ctx), chain_(cfg.width_k) {
    validate(cfg_);
  }

  const TaConfig& config() const { return cfg_; }
  const Chain& chain() const { return chain_; }
  Chain release_chain() { return std::move(chain_); }
  const std::map<SwId, WorkerRecord>& workers() const { return workers_; }

  const WorkerRecord* find_worker(const SwId& sw_id) const {
    auto it = workers_.find(sw_id);
    return it == workers_.end() ? nullptr : &it->second;
  }

  Classification classification_of(const SwId& sw_id) const {
    const WorkerRecord* rec = find_worker(sw_id);
    if (!rec) throw std::invalid_argument("unknown worker: " + sw_id);
    if (rec->removed) return Classification::removed;
    return classify(rec->trust.tr, cfg_.thresholds);
  }

  const VulnerabilityMeta* vul_meta(const VulId& vul_id) const {
    auto it = vuls_.find(vul_id);
    return it == vuls_.end() ? nullptr : &it->second.doc.meta;
  }

  // Admits a worker to the pool and writes its trust baseline on chain.
  void register_worker(const SwId& sw_id, const MacAddress& mac) {
    if (sw_id.empty()) throw std::invalid_argument("worker id must not be empty");
    if (workers_.count(sw_id)) throw std::invalid_argument("worker already registered: " + sw_id);
    for (const auto& [id, rec] : workers_)
      if (rec.mac == mac) throw std::invalid_argument("mac address already registered");
    WorkerRecord rec;
    rec.sw_id = sw_id;
    rec.mac = mac;
    rec.trust = initial_trust_state(cfg_.penalty_mode);
    workers_.emplace(sw_id, std::move(rec));
    append_block(sw_id, workers_.at(sw_id).trust.tr, zero_digest(cfg_.width_k),
                 {TrustOldLeaf{0, 0}, TrustNewLeaf{0, 0}});
  }

  void submit_vulnerability(VulnerabilityDocument doc, const SwId& submitter) {
    validate(doc.meta);
    const WorkerRecord* rec = find_worker(submitter);
    if (!rec) throw std::invalid_argument("submitter is not registered: " + submitter);
    if (vuls_.count(doc.meta.vul_id))
      throw std::invalid_argument("vulnerability already submitted: " + doc.meta.vul_id);
    VulRecord vr;
    vr.meta_digest = digest(canonical_bytes(doc.meta), cfg_.width_k);
    vr.doc = std::move(doc);
    const VulId vul_id = vr.doc.meta.vul_id;
    vuls_.emplace(vul_id, std::move(vr));
    append_block(submitter, rec->trust.tr, vuls_.at(vul_id).meta_digest,
                 {AccessRequestLeaf{submitter, vul_id, ctx_.now}});
  }

  // Replaces the disclosure list. Newly listed workers get a generated token
  // (one block each); delisted workers get their token revoked (one block
  // each).
  void set_access_list(const VulId& vul_id, const std::vector<SwId>& allowed) {
    VulRecord& vr = vul_record(vul_id);
    std::set<SwId> next(allowed.begin(), allowed.end());
    for (const SwId& sw_id : next)
      if (!workers_.count(sw_id))
        throw std::invalid_argument("access list names unregistered worker: " + sw_id);
    std::vector<SwId> delisted;
    for (const SwId& sw_id : vr.allowed)
      if (!next.count(sw_id)) delisted.push_back(sw_id);
    for (const SwId& sw_id : delisted) revoke_active_token(sw_id, vul_id);
    for (const SwId& sw_id : next) {
      if (vr.allowed.count(sw_id)) continue;
      WorkerRecord& rec = workers_.at(sw_id);
      std::uint64_t epoch = 0;
      if (auto it = rec.next_epoch.find(vul_id); it != rec.next_epoch.end()) epoch = it->second;
      AccessToken token = generate_access_token(sw_id, vr.doc.meta, ctx_.now, ctx_.rng.nonce(),
                                                cfg_.width_k, ctx_.ops, epoch);
      rec.next_epoch[vul_id] = token.epoch + 1;
      append_block(sw_id, rec.trust.tr, vr.meta_digest,
                   {AccessTokenLeaf{token.value, sw_id, vul_id, token.epoch, TokenStatus::active}});
      rec.active_tokens[vul_id] = std::move(token);
    }
    vr.allowed = std::move(next);
  }

  // The release pipeline: eligibility checks, token retrieval from the chain,
  // the trust gate, then rotation + tracing derivation + sealing, all logged
  // as a single block.
  AccessDecision handle_access_request(const AccessRequest& req) {
    auto wit = workers_.find(req.sw_id);
    if (wit == workers_.end()) return deny_unlogged("unregistered worker");
    WorkerRecord& rec = wit->second;
    auto vit = vuls_.find(req.vul_id);
    if (vit == vuls_.end()) return deny_logged(rec, req, nullptr, "unknown vulnerability");
    VulRecord& vr = vit->second;
    if (rec.removed) return deny_logged(rec, req, &vr, "worker removed from pool");
    if (!vr.allowed.count(req.sw_id)) return deny_logged(rec, req, &vr, "not on access list");

    auto current_leaf = chain_.latest_access_token(req.sw_id, req.vul_id);
    if (!current_leaf) return deny_logged(rec, req, &vr, "no active token on ledger");

    // Trust is retrieved from the chain at request time; the registry mirror
    // is only the writer's working copy.
    auto snapshot = chain_.latest_trust(req.sw_id);
    std::int64_t sec = snapshot ? snapshot->sec : 0;
    std::int64_t lek = snapshot ? snapshot->lek : 0;
    double tr = trust_value(sec, lek, cfg_.penalty_mode);

    bool release_false = false;
    if (cfg_.scheme == Scheme::uiv_tsp) {
      switch (classify(tr, cfg_.thresholds)) {
        case Classification::dishonest:
          return deny_logged(rec, req, &vr, "trust below release threshold");
        case Classification::semi_honest:
          release_false = true;
          break;
        default:
          break;
      }
    }

    AccessToken current{current_leaf->value, req.sw_id, req.vul_id, current_leaf->epoch,
                        TokenStatus::active, 0};
    auto [revoked, next] =
        rotate_access_token(current, vr.doc.meta, req.time, ctx_.rng.nonce(), ctx_.ops);
    TracingToken tracing = derive_tracing_token(revoked, rec.mac, ctx_.ops);
    rec.next_epoch[req.vul_id] = next.epoch + 1;
    rec.active_tokens[req.vul_id] = next;

    VulnerabilityDocument released = vr.doc;
    std::optional<Timestamp> valid_until;
    if (release_false) {
      released.payload = ctx_.rng.bytes(vr.doc.payload.size());
      valid_until = req.time + cfg_.trap_validity_ms;
    }
    SealedDocument sealed =
        embed_tracing_token(released, tracing, cfg_.embed_count, release_false, valid_until);

    append_block(req.sw_id, tr, vr.meta_digest,
                 {AccessTokenLeaf{revoked.value, req.sw_id, req.vul_id, revoked.epoch,
                                  TokenStatus::revoked},
                  AccessTokenLeaf{next.value, req.sw_id, req.vul_id, next.epoch,
                                  TokenStatus::active},
                  TracingTokenLeaf{tracing.value, req.sw_id, req.vul_id, rec.mac},
                  TrustOldLeaf{sec, lek}, TrustNewLeaf{sec, lek},
                  AccessRequestLeaf{req.sw_id, req.vul_id, req.time},
                  FalseFlagLeaf{release_false}});

    AccessDecision decision;
    decision.kind =
        release_false ? AccessDecision::Kind::granted_false : AccessDecision::Kind::granted_real;
    decision.document = std::move(sealed);
    decision.guard = GuardContext{revoked.value, req.sw_id, req.vul_id};
    return decision;
  }

  // Resolves a guard report through the chain. A report on a real release
  // records a leak against the identified worker; a report on a trap release
  // records the observed host as a conspirator and removes the worker for
  // good.
  void process_feedback(const FeedbackMessage& fb) {
    auto traced = chain_.lookup_by_tracing_token(fb.tracing_value);
    if (!traced) return;  // not one of ours; nothing to attribute
    auto wit = workers_.find(traced->sw_id);
    if (wit == workers_.end()) return;
    WorkerRecord& rec = wit->second;
    if (cfg_.scheme == Scheme::uiv_sp) return;  // traceability only, no trust mechanism
    const Digest& meta_digest = vul_record(traced->vul_id).meta_digest;
    if (traced->released_false) {
      rec.conspiracy.add(fb.mac_current);
      if (rec.removed) return;  // evidence grows, chain state already final
      auto [state, cls] = apply_conspirator_rule(rec.trust, rec.conspiracy, cfg_.thresholds);
      if (cls != Classification::removed) return;
      rec.removed = true;
      std::vector<LogLeaf> leaves{TrustOldLeaf{rec.trust.sec, rec.trust.lek},
                                  TrustNewLeaf{state.sec, state.lek}};
      for (const auto& [vul_id, token] : rec.active_tokens)
        leaves.push_back(
            AccessTokenLeaf{token.value, rec.sw_id, vul_id, token.epoch, TokenStatus::revoked});
      rec.active_tokens.clear();
      rec.trust = state;
      append_block(rec.sw_id, rec.trust.tr, meta_digest, std::move(leaves));
      return;
    }
    if (rec.removed) return;
    TrustState old = rec.trust;
    rec.trust = register_outcome(old, Outcome::leaked, cfg_.penalty_mode);
    append_block(rec.sw_id, rec.trust.tr, meta_digest,
                 {TrustOldLeaf{old.sec, old.lek}, TrustNewLeaf{rec.trust.sec, rec.trust.lek}});
  }

  // One full holding period of a real document with no leak report.
  void register_keep(const SwId& sw_id, const VulId& vul_id) {
    auto wit = workers_.find(sw_id);
    if (wit == workers_.end()) throw std::invalid_argument("unknown worker: " + sw_id);
    WorkerRecord& rec = wit->second;
    const Digest& meta_digest = vul_record(vul_id).meta_digest;
    if (cfg_.scheme == Scheme::uiv_sp) return;
    if (rec.removed) return;
    TrustState old = rec.trust;
    rec.trust = register_outcome(old, Outcome::kept, cfg_.penalty_mode);
    append_block(sw_id, rec.trust.tr, meta_digest,
                 {TrustOldLeaf{old.sec, old.lek}, TrustNewLeaf{rec.trust.sec, rec.trust.lek}});
  }

 private:
  struct VulRecord {
    VulnerabilityDocument doc;
    Digest meta_digest;
    std::set<SwId> allowed;
  };

  VulRecord& vul_record(const VulId& vul_id) {
    auto it = vuls_.find(vul_id);
    if (it == vuls_.end()) throw std::invalid_argument("unknown vulnerability: " + vul_id);
    return it->second;
  }

  void append_block(const SwId& sw_id, double trust, const Digest& meta_digest,
                    std::vector<LogLeaf> leaves) {
    chain_.append(sw_id, trust, meta_digest, std::move(leaves), ctx_.now);
  }

  void revoke_active_token(const SwId& sw_id, const VulId& vul_id) {
    WorkerRecord& rec = workers_.at(sw_id);
    auto it = rec.active_tokens.find(vul_id);
    if (it == rec.active_tokens.end()) return;
    append_block(sw_id, rec.trust.tr, vuls_.at(vul_id).meta_digest,
                 {AccessTokenLeaf{it->second.value, sw_id, vul_id, it->second.epoch,
                                  TokenStatus::revoked}});
    rec.active_tokens.erase(it);
  }

  AccessDecision deny_unlogged(std::string reason) {
    AccessDecision d;
    d.kind = AccessDecision::Kind::denied;
    d.reason = std::move(reason);
    return d;
  }

  AccessDecision deny_logged(const WorkerRecord& rec, const AccessRequest& req,
                             const VulRecord* vr, std::string reason) {
    append_block(rec.sw_id, rec.trust.tr, vr ? vr->meta_digest : zero_digest(cfg_.width_k),
                 {AccessRequestLeaf{req.sw_id, req.vul_id, req.time}});
    return deny_unlogged(std::move(reason));
  }

  TaConfig cfg_;
  RunContext& ctx_;
  Chain chain_;
  std::map<SwId, WorkerRecord> workers_;
  std::map<VulId, VulRecord> vuls_;
};

}  // namespace uivtsp
