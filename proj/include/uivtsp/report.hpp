#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uivtsp/encoding.hpp"
#include "uivtsp/hash.hpp"
#include "uivtsp/simulator.hpp"

namespace uivtsp {

// Shortest round-trip decimal form, locale independent.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline std::string format_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline constexpr const char* kCycleCsvHeader =
    "cycle,leaks_attempted,leaks_succeeded,leaks_destroyed,grants_real,grants_false,"
    "denials,flagged_dishonest,flagged_honest,hash_invocations";

inline std::string cycles_to_csv(const std::vector<CycleMetrics>& cycles) {
  std::string out(kCycleCsvHeader);
  out += '\n';
  for (const CycleMetrics& c : cycles) {
    out += std::to_string(c.cycle);
    for (std::uint64_t v : {c.leaks_attempted, c.leaks_succeeded, c.leaks_destroyed, c.grants_real,
                            c.grants_false, c.denials, c.flagged_dishonest, c.flagged_honest,
                            c.hash_invocations}) {
      out += ',';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

inline constexpr const char* kSummaryCsvHeader =
    "scheme,pct_dishonest,delta_l,delta_m,delta_h,k,epsilon,detection_rate,"
    "false_alarm_rate,leakage_probability,avg_tracing_delay_us";

struct SummaryRow {
  std::string scheme;
  double pct_dishonest = 0.0;
  Thresholds thresholds{};
  int width_k = 256;
  int embed_count = 2;
  std::optional<double> detection_rate;
  std::optional<double> false_alarm_rate;
  std::optional<double> leakage_probability;
  std::optional<double> avg_tracing_delay_us;
};

inline SummaryRow summary_row(const ScenarioConfig& cfg, const RunMetrics& m) {
  SummaryRow row;
  row.scheme = to_string(cfg.scheme);
  row.pct_dishonest = cfg.pct_dishonest;
  row.thresholds = cfg.thresholds;
  row.width_k = cfg.width_k;
  row.embed_count = cfg.embed_count;
  row.detection_rate = m.detection_rate;
  row.false_alarm_rate = m.false_alarm_rate;
  row.leakage_probability = m.leakage_probability;
  return row;
}

inline std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out(kSummaryCsvHeader);
  out += '\n';
  for (const SummaryRow& r : rows) {
    out += r.scheme;
    out += ',';
    out += format_double(r.pct_dishonest);
    out += ',';
    out += format_double(r.thresholds.low);
    out += ',';
    out += format_double(r.thresholds.mid);
    out += ',';
    out += format_double(r.thresholds.high);
    out += ',';
    out += std::to_string(r.width_k);
    out += ',';
    out += std::to_string(r.embed_count);
    out += ',';
    out += format_cell(r.detection_rate);
    out += ',';
    out += format_cell(r.false_alarm_rate);
    out += ',';
    out += format_cell(r.leakage_probability);
    out += ',';
    out += format_cell(r.avg_tracing_delay_us);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(cfg.scheme);
  j["workers"] = cfg.n_workers;
  j["pct_dishonest"] = cfg.pct_dishonest;
  j["pct_semihonest"] = cfg.pct_semihonest;
  j["cycles"] = cfg.cycles;
  j["k"] = cfg.width_k;
  j["epsilon"] = cfg.embed_count;
  j["p_leak_dishonest"] = cfg.p_leak_dishonest;
  j["p_leak_semihonest"] = cfg.p_leak_semihonest;
  j["delta_l"] = cfg.thresholds.low;
  j["delta_m"] = cfg.thresholds.mid;
  j["delta_h"] = cfg.thresholds.high;
  j["penalty"] = cfg.penalty_mode == PenaltyMode::literal ? "literal" : "on-leak";
  j["trap_window_cycles"] = cfg.trap_window_cycles;
  j["seed"] = cfg.seed;
  return j;
}

inline ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioConfig base = {}) {
  ScenarioConfig cfg = base;
  if (j.contains("scheme")) {
    std::string s = j.at("scheme").get<std::string>();
    if (s == "uiv-tsp") cfg.scheme = Scheme::uiv_tsp;
    else if (s == "uiv-sp") cfg.scheme = Scheme::uiv_sp;
    else throw std::invalid_argument("unknown scheme: " + s);
  }
  if (j.contains("workers")) cfg.n_workers = j.at("workers").get<std::size_t>();
  if (j.contains("pct_dishonest")) cfg.pct_dishonest = j.at("pct_dishonest").get<double>();
  if (j.contains("pct_semihonest")) cfg.pct_semihonest = j.at("pct_semihonest").get<double>();
  if (j.contains("cycles")) cfg.cycles = j.at("cycles").get<std::size_t>();
  if (j.contains("k")) cfg.width_k = j.at("k").get<int>();
  if (j.contains("epsilon")) cfg.embed_count = j.at("epsilon").get<int>();
  if (j.contains("p_leak_dishonest")) cfg.p_leak_dishonest = j.at("p_leak_dishonest").get<double>();
  if (j.contains("p_leak_semihonest")) cfg.p_leak_semihonest = j.at("p_leak_semihonest").get<double>();
  if (j.contains("delta_l")) cfg.thresholds.low = j.at("delta_l").get<double>();
  if (j.contains("delta_m")) cfg.thresholds.mid = j.at("delta_m").get<double>();
  if (j.contains("delta_h")) cfg.thresholds.high = j.at("delta_h").get<double>();
  if (j.contains("penalty")) {
    std::string p = j.at("penalty").get<std::string>();
    if (p == "literal") cfg.penalty_mode = PenaltyMode::literal;
    else if (p == "on-leak") cfg.penalty_mode = PenaltyMode::on_leak;
    else throw std::invalid_argument("unknown penalty mode: " + p);
  }
  if (j.contains("trap_window_cycles")) cfg.trap_window_cycles = j.at("trap_window_cycles").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

inline std::string run_manifest(const ScenarioConfig& cfg, const RunMetrics& m, const Chain& chain) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["config"] = config_to_json(cfg);
  nlohmann::ordered_json r;
  r["blocks"] = chain.blocks().size();
  r["tip_hash"] = chain.tip_hash().hex();
  r["requests"] = m.total_requests;
  r["grants_real"] = m.total_grants_real;
  r["grants_false"] = m.total_grants_false;
  r["denials"] = m.total_denials;
  r["hash_ops"] = m.ops.hash;
  r["ske_ops"] = m.ops.ske;
  r["pke_ops"] = m.ops.pke;
  r["exp_ops"] = m.ops.exp;
  if (m.detection_rate) r["detection_rate"] = *m.detection_rate;
  if (m.false_alarm_rate) r["false_alarm_rate"] = *m.false_alarm_rate;
  if (m.leakage_probability) r["leakage_probability"] = *m.leakage_probability;
  j["results"] = r;
  return j.dump(2) + "\n";
}

// Per-cell seed for sweeps: derived from the base seed and the cell
// coordinates so cells are independent, order insensitive, and reproducible.
inline std::uint64_t derive_cell_seed(std::uint64_t base_seed, Scheme scheme,
                                      double pct_dishonest, std::uint64_t seed_index) {
  const auto frac_milli =
      static_cast<std::uint64_t>(std::llround(pct_dishonest * 1000.0));
  std::string enc = canonical_encode(
      {be64(base_seed), std::string(to_string(scheme)), be64(frac_milli), be64(seed_index)});
  Digest d = digest(enc, 256);
  return read_be64(d.bytes, 0);
}

}  // namespace uivtsp
