#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uivtsp/context.hpp"
#include "uivtsp/guard.hpp"
#include "uivtsp/orchestrator.hpp"
#include "uivtsp/trust.hpp"

namespace uivtsp {

inline constexpr Timestamp kCycleMs = 1000;

// Behavior archetype assigned by the scenario, invisible to the authority.
// Detection quality is judged by comparing final classifications against
// these ground-truth labels.
enum class Archetype { honest, dishonest, semi_honest };

inline const char* to_string(Archetype a) {
  switch (a) {
    case Archetype::honest: return "honest";
    case Archetype::dishonest: return "dishonest";
    case Archetype::semi_honest: return "semi-honest";
  }
  return "?";
}

struct ScenarioConfig {
  std::size_t n_workers = 2000;
  double pct_dishonest = 0.10;
  double pct_semihonest = 0.10;
  std::size_t cycles = 200;
  int width_k = 256;
  int embed_count = 2;
  double p_leak_dishonest = 0.3;
  double p_leak_semihonest = 0.1;
  Thresholds thresholds{};
  PenaltyMode penalty_mode = PenaltyMode::on_leak;
  Scheme scheme = Scheme::uiv_tsp;
  std::size_t trap_window_cycles = 5;
  std::uint64_t seed = 1;
};

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.n_workers < 1) throw std::invalid_argument("scenario needs at least one worker");
  if (cfg.cycles < 1) throw std::invalid_argument("scenario needs at least one cycle");
  auto pct = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!pct(cfg.pct_dishonest) || !pct(cfg.pct_semihonest) ||
      cfg.pct_dishonest + cfg.pct_semihonest > 1.0)
    throw std::invalid_argument("archetype fractions must be in [0,1] and sum to at most 1");
  if (!pct(cfg.p_leak_dishonest) || !pct(cfg.p_leak_semihonest))
    throw std::invalid_argument("leak probabilities must be in [0,1]");
  if (cfg.trap_window_cycles < 1) throw std::invalid_argument("trap window must be at least one cycle");
  require_width(cfg.width_k);
  if (cfg.embed_count < 1 || cfg.embed_count > 4)
    throw std::invalid_argument("embed count must be between 1 and 4");
  validate(cfg.thresholds);
}

inline TaConfig ta_config(const ScenarioConfig& cfg) {
  TaConfig ta;
  ta.width_k = cfg.width_k;
  ta.embed_count = cfg.embed_count;
  ta.thresholds = cfg.thresholds;
  ta.penalty_mode = cfg.penalty_mode;
  ta.scheme = cfg.scheme;
  ta.trap_validity_ms = static_cast<Timestamp>(cfg.trap_window_cycles) * kCycleMs;
  return ta;
}

struct CycleMetrics {
  std::size_t cycle = 0;
  std::uint64_t leaks_attempted = 0;
  std::uint64_t leaks_succeeded = 0;  // exfiltrated copies surviving enforcement (any kind)
  std::uint64_t leaks_destroyed = 0;
  std::uint64_t grants_real = 0;
  std::uint64_t grants_false = 0;
  std::uint64_t denials = 0;
  std::uint64_t flagged_dishonest = 0;
  std::uint64_t flagged_honest = 0;
  std::uint64_t hash_invocations = 0;
};

struct WorkerOutcome {
  SwId sw_id;
  Archetype archetype = Archetype::honest;
  Classification classification = Classification::monitored;
  std::int64_t sec = 0;
  std::int64_t lek = 0;
  double tr = 0.5;
  std::size_t mu = 0;
};

struct RunMetrics {
  std::vector<CycleMetrics> cycles;
  std::vector<WorkerOutcome> workers;

  std::optional<double> detection_rate;
  std::optional<double> false_alarm_rate;
  std::optional<double> leakage_probability;

  std::uint64_t total_requests = 0;
  std::uint64_t total_grants_real = 0;
  std::uint64_t total_grants_false = 0;
  std::uint64_t total_denials = 0;

  // Guard audit trail for the whole run.
  std::uint64_t licensed_evaluations = 0;
  std::uint64_t licensed_destructions = 0;
  std::uint64_t offhost_real_evaluations = 0;
  std::uint64_t offhost_real_destroyed = 0;
  std::uint64_t offhost_lurks = 0;
  std::uint64_t feedback_events = 0;
  std::uint64_t feedback_resolved_correctly = 0;
  std::uint64_t real_leaks_succeeded = 0;
  std::uint64_t false_copies_expired = 0;
  std::uint64_t live_false_copies_at_end = 0;

  OpCounters ops;
};

struct RunResult {
  RunMetrics metrics;
  Chain ledger;

  RunResult(RunMetrics m, Chain c) : metrics(std::move(m)), ledger(std::move(c)) {}
};

struct DetectionRates {
  std::optional<double> detection_rate;
  std::optional<double> false_alarm_rate;
};

// Detection: share of dishonest-archetype workers the authority ended up
// classifying dishonest or removed. False alarm: same numerator logic over
// honest-archetype workers. Empty archetype classes report no rate at all.
inline DetectionRates compute_detection_rates(const std::vector<WorkerOutcome>& workers) {
  std::uint64_t dis_total = 0, dis_flagged = 0, hon_total = 0, hon_flagged = 0;
  for (const WorkerOutcome& w : workers) {
    bool flagged =
        w.classification == Classification::dishonest || w.classification == Classification::removed;
    if (w.archetype == Archetype::dishonest) {
      dis_total++;
      if (flagged) dis_flagged++;
    } else if (w.archetype == Archetype::honest) {
      hon_total++;
      if (flagged) hon_flagged++;
    }
  }
  DetectionRates rates;
  if (dis_total) rates.detection_rate = static_cast<double>(dis_flagged) / static_cast<double>(dis_total);
  if (hon_total) rates.false_alarm_rate = static_cast<double>(hon_flagged) / static_cast<double>(hon_total);
  return rates;
}

// Real documents only: surviving exfiltrated real copies over real grants.
inline std::optional<double> compute_leakage_probability(std::uint64_t real_leaks_succeeded,
                                                         std::uint64_t grants_real) {
  if (grants_real == 0) return std::nullopt;
  return static_cast<double>(real_leaks_succeeded) / static_cast<double>(grants_real);
}

namespace detail {

struct LiveFalseCopy {
  MacAddress host;
  Timestamp valid_until = 0;
};

inline std::string worker_name(std::size_t index) {
  std::string digits = std::to_string(index + 1);
  return "sw-" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

}  // namespace detail

// One full scenario: an authority, one submitted vulnerability with every
// worker on its access list, then `cycles` rounds in which each worker asks
// for access and, by archetype, leaks the copy to a fresh foreign host or
// holds it for the round. Fully deterministic for a given config.
inline RunResult run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  RunContext ctx(cfg.seed);
  TrustedAuthority ta(ta_config(cfg), ctx);
  RunMetrics m;

  // pool setup
  const SwId vendor = "vendor-000001";
  std::set<std::string> used_macs;
  auto fresh_mac = [&]() {
    for (;;) {
      MacAddress mac = ctx.rng.mac();
      if (used_macs.insert(mac.bytes()).second) return mac;
    }
  };
  ctx.now = 0;
  ta.register_worker(vendor, fresh_mac());

  std::vector<SwId> worker_ids(cfg.n_workers);
  std::vector<MacAddress> worker_macs(cfg.n_workers);
  for (std::size_t i = 0; i < cfg.n_workers; ++i) {
    worker_ids[i] = detail::worker_name(i);
    worker_macs[i] = fresh_mac();
    ctx.now = i + 1;
    ta.register_worker(worker_ids[i], worker_macs[i]);
  }

  std::vector<Archetype> archetypes(cfg.n_workers, Archetype::honest);
  {
    const auto n_dis = static_cast<std::size_t>(
        std::llround(cfg.pct_dishonest * static_cast<double>(cfg.n_workers)));
    const auto n_semi = static_cast<std::size_t>(
        std::llround(cfg.pct_semihonest * static_cast<double>(cfg.n_workers)));
    std::vector<std::size_t> order(cfg.n_workers);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    ctx.rng.shuffle(order);
    for (std::size_t i = 0; i < order.size() && i < n_dis + n_semi; ++i)
      archetypes[order[i]] = i < n_dis ? Archetype::dishonest : Archetype::semi_honest;
  }

  VulnerabilityDocument doc;
  doc.meta = VulnerabilityMeta{"vul-000001", "vendor-lab", "iiot-gateway", 8, 0};
  doc.payload = ctx.rng.bytes(256);
  ctx.now = cfg.n_workers + 1;
  ta.submit_vulnerability(doc, vendor);
  ctx.now = cfg.n_workers + 2;
  ta.set_access_list("vul-000001", worker_ids);
  const VulId vul = "vul-000001";

  std::vector<detail::LiveFalseCopy> live_false;
  std::uint64_t hash_mark = ctx.ops.hash;

  auto leak_probability = [&](Archetype a) {
    switch (a) {
      case Archetype::dishonest: return cfg.p_leak_dishonest;
      case Archetype::semi_honest: return cfg.p_leak_semihonest;
      default: return 0.0;
    }
  };

  for (std::size_t cycle = 0; cycle < cfg.cycles; ++cycle) {
    ctx.now = (cycle + 1) * kCycleMs;
    CycleMetrics cm;
    cm.cycle = cycle;

    // The protection payload destroys expired bait on its own clock.
    std::erase_if(live_false, [&](const detail::LiveFalseCopy& c) {
      if (ctx.now > c.valid_until) {
        m.false_copies_expired++;
        return true;
      }
      return false;
    });

    for (std::size_t i = 0; i < cfg.n_workers; ++i) {
      const WorkerRecord* rec = ta.find_worker(worker_ids[i]);
      if (rec->removed) continue;
      ctx.now++;
      m.total_requests++;
      AccessDecision decision = ta.handle_access_request({worker_ids[i], vul, ctx.now});
      if (!decision.granted()) {
        cm.denials++;
        continue;
      }
      const bool is_false = decision.kind == AccessDecision::Kind::granted_false;
      if (is_false) {
        cm.grants_false++;
        live_false.push_back({worker_macs[i], *decision.document->valid_until});
      } else {
        cm.grants_real++;
      }

      // Arrival self-check on the licensed host.
      HostEnvironment holder{worker_macs[i], ctx.now};
      GuardVerdict arrival = enforce(*decision.document, *decision.guard, holder, ctx.ops);
      m.licensed_evaluations++;
      if (arrival.kind != GuardVerdict::Kind::lurk) m.licensed_destructions++;

      if (ctx.rng.bernoulli(leak_probability(archetypes[i]))) {
        MacAddress attacker = ctx.rng.mac();
        while (attacker == worker_macs[i]) attacker = ctx.rng.mac();
        HostEnvironment target{attacker, ctx.now};
        auto [copy, verdict] =
            simulate_exfiltration(*decision.document, *decision.guard, holder, target, ctx.ops);
        cm.leaks_attempted++;
        if (!copy.is_false) m.offhost_real_evaluations++;
        switch (verdict.kind) {
          case GuardVerdict::Kind::destroyed:
            m.offhost_real_destroyed++;
            if (cfg.scheme == Scheme::uiv_sp) {
              // Baseline accounting: without the trust mechanism the exposure
              // stands; destruction is not credited as prevention.
              cm.leaks_succeeded++;
              m.real_leaks_succeeded++;
            } else {
              cm.leaks_destroyed++;
            }
            break;
          case GuardVerdict::Kind::false_doc_observed:
            cm.leaks_succeeded++;
            live_false.push_back({attacker, *copy.valid_until});
            break;
          case GuardVerdict::Kind::destroyed_silent:
            cm.leaks_destroyed++;
            break;
          case GuardVerdict::Kind::lurk:
            m.offhost_lurks++;
            break;
        }
        if (verdict.feedback) {
          m.feedback_events++;
          auto traced = ta.chain().lookup_by_tracing_token(verdict.feedback->tracing_value);
          if (traced && traced->sw_id == worker_ids[i]) m.feedback_resolved_correctly++;
          ta.process_feedback(*verdict.feedback);
        }
      } else if (!is_false) {
        ta.register_keep(worker_ids[i], vul);
      }
    }

    for (std::size_t i = 0; i < cfg.n_workers; ++i) {
      Classification c = ta.classification_of(worker_ids[i]);
      if (c == Classification::dishonest || c == Classification::removed) cm.flagged_dishonest++;
      if (c == Classification::honest) cm.flagged_honest++;
    }
    cm.hash_invocations = ctx.ops.hash - hash_mark;
    hash_mark = ctx.ops.hash;
    m.total_grants_real += cm.grants_real;
    m.total_grants_false += cm.grants_false;
    m.total_denials += cm.denials;
    m.cycles.push_back(cm);
  }

  m.live_false_copies_at_end = live_false.size();
  m.workers.reserve(cfg.n_workers);
  for (std::size_t i = 0; i < cfg.n_workers; ++i) {
    const WorkerRecord* rec = ta.find_worker(worker_ids[i]);
    m.workers.push_back(WorkerOutcome{worker_ids[i], archetypes[i], ta.classification_of(worker_ids[i]),
                                      rec->trust.sec, rec->trust.lek, rec->trust.tr,
                                      rec->conspiracy.mu()});
  }
  DetectionRates rates = compute_detection_rates(m.workers);
  m.detection_rate = rates.detection_rate;
  m.false_alarm_rate = rates.false_alarm_rate;
  m.leakage_probability = compute_leakage_probability(m.real_leaks_succeeded, m.total_grants_real);
  m.ops = ctx.ops;
  return RunResult(std::move(m), ta.release_chain());
}

}  // namespace uivtsp
