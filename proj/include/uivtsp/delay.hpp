#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uivtsp/guard.hpp"
#include "uivtsp/orchestrator.hpp"
#include "uivtsp/simulator.hpp"

namespace uivtsp {

struct DelayConfig {
  int width_k = 256;
  int embed_count = 2;
  std::size_t rounds = 1050;
  std::size_t warmup = 50;
  std::uint64_t seed = 7;
};

struct DelayResult {
  double median_us = 0.0;
  double mean_us = 0.0;
  std::size_t rounds_measured = 0;
  // Every grant-leak-trace round must consume exactly three protocol hashes:
  // token rotation, tracing-token derivation, and the on-copy verification.
  bool hash_budget_ok = true;
  std::uint64_t min_round_hashes = 0;
  std::uint64_t max_round_hashes = 0;
};

// Times the identification path alone: raw copy arrives on a foreign host,
// gets parsed, its embedded token extracted and checked against the host,
// and the resulting feedback resolved against the ledger. Grant-side work
// happens outside the timed span but inside the per-round hash budget.
inline DelayResult measure_tracing_delay(const DelayConfig& cfg) {
  if (cfg.rounds <= cfg.warmup) throw std::invalid_argument("need more rounds than warmup");
  if (cfg.embed_count < 1 || cfg.embed_count > 4)
    throw std::invalid_argument("embed count must be between 1 and 4");
  require_width(cfg.width_k);

  RunContext ctx(cfg.seed);
  TaConfig tc;
  tc.width_k = cfg.width_k;
  tc.embed_count = cfg.embed_count;
  TrustedAuthority ta(tc, ctx);

  const SwId vendor = "vendor-000001";
  const SwId worker = "sw-000001";
  const VulId vul = "vul-000001";
  ctx.now = 0;
  ta.register_worker(vendor, ctx.rng.mac());
  MacAddress worker_mac = ctx.rng.mac();
  ta.register_worker(worker, worker_mac);
  VulnerabilityDocument doc;
  doc.meta = VulnerabilityMeta{vul, "vendor-lab", "iiot-gateway", 8, 0};
  doc.payload = ctx.rng.bytes(256);
  ta.submit_vulnerability(doc, vendor);
  ta.set_access_list(vul, {worker});

  std::vector<double> samples;
  samples.reserve(cfg.rounds - cfg.warmup);
  DelayResult r;
  r.min_round_hashes = ~0ULL;
  std::uint64_t sink = 0;

  for (std::size_t round = 0; round < cfg.rounds; ++round) {
    ctx.now += kCycleMs;
    const std::uint64_t mark = ctx.ops.hash;
    AccessDecision decision = ta.handle_access_request({worker, vul, ctx.now});
    if (!decision.granted() || decision.kind != AccessDecision::Kind::granted_real)
      throw std::logic_error("delay harness expected a real grant every round");
    std::string wire = seal_to_bytes(*decision.document);
    MacAddress attacker = ctx.rng.mac();
    while (attacker == worker_mac) attacker = ctx.rng.mac();
    HostEnvironment target{attacker, ctx.now};

    const auto t0 = std::chrono::steady_clock::now();
    auto parsed = parse_sealed(wire);
    if (!parsed) throw std::logic_error("delay harness copy failed to parse");
    GuardVerdict verdict = enforce(*parsed, *decision.guard, target, ctx.ops);
    if (verdict.kind != GuardVerdict::Kind::destroyed || !verdict.feedback)
      throw std::logic_error("delay harness expected destruction with feedback");
    auto traced = ta.chain().lookup_by_tracing_token(verdict.feedback->tracing_value);
    const auto t1 = std::chrono::steady_clock::now();

    if (!traced || traced->sw_id != worker)
      throw std::logic_error("delay harness feedback did not resolve to the leaking worker");
    sink += traced->block_index;

    const std::uint64_t round_hashes = ctx.ops.hash - mark;
    r.min_round_hashes = std::min(r.min_round_hashes, round_hashes);
    r.max_round_hashes = std::max(r.max_round_hashes, round_hashes);
    if (round_hashes != 3) r.hash_budget_ok = false;
    if (round >= cfg.warmup)
      samples.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  if (sink == ~0ULL) throw std::logic_error("unreachable");

  std::sort(samples.begin(), samples.end());
  r.rounds_measured = samples.size();
  const std::size_t mid = samples.size() / 2;
  r.median_us = samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
  double sum = 0.0;
  for (double s : samples) sum += s;
  r.mean_us = sum / static_cast<double>(samples.size());
  return r;
}

}  // namespace uivtsp
