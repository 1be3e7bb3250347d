#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uivtsp/delay.hpp"
#include "uivtsp/ledger.hpp"
#include "uivtsp/report.hpp"
#include "uivtsp/simulator.hpp"
#include "uivtsp/svg.hpp"

namespace uivtsp {

// Exit codes shared by every subcommand: 0 success / ledger valid,
// 1 ledger invalid, 2 usage or operational failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

class CliError : public std::runtime_error {
 public:
  explicit CliError(const std::string& what, int code = kExitUsage)
      : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

enum class SchemeSelection { tsp_only, sp_only, both };

inline SchemeSelection parse_scheme_selection(const std::string& s) {
  if (s == "uiv-tsp") return SchemeSelection::tsp_only;
  if (s == "uiv-sp") return SchemeSelection::sp_only;
  if (s == "both") return SchemeSelection::both;
  throw CliError("unknown scheme '" + s + "' (expected uiv-tsp, uiv-sp, or both)");
}

inline std::vector<Scheme> selected_schemes(SchemeSelection sel) {
  switch (sel) {
    case SchemeSelection::tsp_only: return {Scheme::uiv_tsp};
    case SchemeSelection::sp_only: return {Scheme::uiv_sp};
    case SchemeSelection::both: return {Scheme::uiv_tsp, Scheme::uiv_sp};
  }
  return {};
}

namespace detail {

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("cannot open for writing: " + p.string());
  out << content;
  if (!out) throw CliError("write failed: " + p.string());
}

inline void ensure_fresh_outputs(const std::vector<std::filesystem::path>& targets, bool force) {
  if (force) return;
  for (const auto& p : targets)
    if (std::filesystem::exists(p))
      throw CliError("output file already exists (use --force to overwrite): " + p.string());
}

}  // namespace detail

struct RunOptions {
  ScenarioConfig base;
  SchemeSelection schemes = SchemeSelection::both;
  std::string out_dir = "out";
  bool force = false;
};

// Runs the configured scenario once per selected scheme and writes, per
// scheme, the per-cycle metrics CSV, the full ledger, and a run manifest,
// plus one shared summary CSV and a leaks-per-cycle chart.
inline int cmd_run(const RunOptions& opt, std::ostream& out) {
  const std::vector<Scheme> schemes = selected_schemes(opt.schemes);
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  std::vector<std::filesystem::path> targets = {dir / "summary.csv", dir / "leaks_per_cycle.svg"};
  for (Scheme s : schemes) {
    const std::string tag = to_string(s);
    targets.push_back(dir / ("metrics_" + tag + ".csv"));
    targets.push_back(dir / ("ledger_" + tag + ".jsonl"));
    targets.push_back(dir / ("manifest_" + tag + ".json"));
  }
  detail::ensure_fresh_outputs(targets, opt.force);

  std::vector<SummaryRow> rows;
  std::vector<Series> leak_series;
  for (Scheme s : schemes) {
    ScenarioConfig cfg = opt.base;
    cfg.scheme = s;
    validate(cfg);
    RunResult result = run_scenario(cfg);
    const std::string tag = to_string(s);
    detail::write_text_file(dir / ("metrics_" + tag + ".csv"), cycles_to_csv(result.metrics.cycles));
    result.ledger.save((dir / ("ledger_" + tag + ".jsonl")).string());
    detail::write_text_file(dir / ("manifest_" + tag + ".json"),
                            run_manifest(cfg, result.metrics, result.ledger));
    rows.push_back(summary_row(cfg, result.metrics));

    Series series;
    series.name = tag;
    series.points.reserve(result.metrics.cycles.size());
    for (const CycleMetrics& c : result.metrics.cycles)
      series.points.emplace_back(static_cast<double>(c.cycle),
                                 static_cast<double>(c.leaks_succeeded));
    leak_series.push_back(std::move(series));

    out << tag << ": blocks=" << result.ledger.blocks().size()
        << " tip=" << result.ledger.tip_hash().hex().substr(0, 16)
        << " grants_real=" << result.metrics.total_grants_real
        << " grants_false=" << result.metrics.total_grants_false
        << " denials=" << result.metrics.total_denials;
    if (result.metrics.detection_rate)
      out << " detection=" << format_double(*result.metrics.detection_rate);
    if (result.metrics.false_alarm_rate)
      out << " false_alarm=" << format_double(*result.metrics.false_alarm_rate);
    if (result.metrics.leakage_probability)
      out << " leakage=" << format_double(*result.metrics.leakage_probability);
    out << "\n";
  }
  detail::write_text_file(dir / "summary.csv", summary_to_csv(rows));
  detail::write_text_file(dir / "leaks_per_cycle.svg",
                          render_line_chart("Surviving leaked copies per cycle", "cycle",
                                            "leaks succeeded", leak_series));
  out << "wrote " << targets.size() << " files to " << dir.string() << "\n";
  return kExitOk;
}

struct SweepOptions {
  ScenarioConfig base;
  SchemeSelection schemes = SchemeSelection::both;
  std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t seeds = 10;
  bool with_delay = false;
  std::vector<int> delay_widths = {256, 512, 1024};
  std::vector<int> delay_embeds = {1, 2, 3, 4};
  std::size_t delay_rounds = 1050;
  std::size_t delay_warmup = 50;
  std::string out_dir = "out";
  bool force = false;
};

// Grid sweep over scheme and dishonest-population fraction, several seeds per
// cell. Emits one summary row per individual run plus charts of the per-cell
// means; optionally adds the tracing-delay grid over token width and embed
// count.
inline int cmd_sweep(const SweepOptions& opt, std::ostream& out) {
  if (opt.fractions.empty()) throw CliError("sweep needs at least one dishonest fraction");
  if (opt.seeds < 1) throw CliError("sweep needs at least one seed per cell");
  const std::vector<Scheme> schemes = selected_schemes(opt.schemes);
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  std::vector<std::filesystem::path> targets = {
      dir / "summary.csv", dir / "detection_vs_dishonest.svg",
      dir / "false_alarm_vs_dishonest.svg", dir / "leakage_vs_dishonest.svg"};
  if (opt.with_delay) targets.push_back(dir / "tracing_delay.svg");
  detail::ensure_fresh_outputs(targets, opt.force);

  std::vector<SummaryRow> rows;
  std::vector<Series> det_series, fa_series, leak_series;
  for (Scheme s : schemes) {
    Series det{to_string(s), {}}, fa{to_string(s), {}}, leak{to_string(s), {}};
    for (double frac : opt.fractions) {
      double det_sum = 0, fa_sum = 0, leak_sum = 0;
      std::size_t det_n = 0, fa_n = 0, leak_n = 0;
      for (std::size_t idx = 1; idx <= opt.seeds; ++idx) {
        ScenarioConfig cfg = opt.base;
        cfg.scheme = s;
        cfg.pct_dishonest = frac;
        cfg.seed = derive_cell_seed(opt.base.seed, s, frac, idx);
        validate(cfg);
        RunResult result = run_scenario(cfg);
        rows.push_back(summary_row(cfg, result.metrics));
        if (result.metrics.detection_rate) {
          det_sum += *result.metrics.detection_rate;
          det_n++;
        }
        if (result.metrics.false_alarm_rate) {
          fa_sum += *result.metrics.false_alarm_rate;
          fa_n++;
        }
        if (result.metrics.leakage_probability) {
          leak_sum += *result.metrics.leakage_probability;
          leak_n++;
        }
      }
      if (det_n) det.points.emplace_back(frac, det_sum / static_cast<double>(det_n));
      if (fa_n) fa.points.emplace_back(frac, fa_sum / static_cast<double>(fa_n));
      if (leak_n) leak.points.emplace_back(frac, leak_sum / static_cast<double>(leak_n));
      out << to_string(s) << " pct_dishonest=" << format_double(frac) << ": " << opt.seeds
          << " runs done\n";
    }
    det_series.push_back(std::move(det));
    fa_series.push_back(std::move(fa));
    leak_series.push_back(std::move(leak));
  }

  if (opt.with_delay) {
    std::vector<Series> delay_series;
    for (int k : opt.delay_widths) {
      Series series{"k=" + std::to_string(k), {}};
      for (int eps : opt.delay_embeds) {
        DelayConfig dc;
        dc.width_k = k;
        dc.embed_count = eps;
        dc.rounds = opt.delay_rounds;
        dc.warmup = opt.delay_warmup;
        dc.seed = opt.base.seed;
        DelayResult dr = measure_tracing_delay(dc);
        SummaryRow row;
        row.scheme = to_string(Scheme::uiv_tsp);
        row.pct_dishonest = 0.0;
        row.thresholds = opt.base.thresholds;
        row.width_k = k;
        row.embed_count = eps;
        row.avg_tracing_delay_us = dr.median_us;
        rows.push_back(row);
        series.points.emplace_back(static_cast<double>(eps), dr.median_us);
        out << "delay k=" << k << " epsilon=" << eps << ": median_us=" << format_double(dr.median_us)
            << "\n";
      }
      delay_series.push_back(std::move(series));
    }
    detail::write_text_file(dir / "tracing_delay.svg",
                            render_line_chart("Tracing delay by embed count", "embedded copies",
                                              "median delay (us)", delay_series));
  }

  detail::write_text_file(dir / "summary.csv", summary_to_csv(rows));
  detail::write_text_file(dir / "detection_vs_dishonest.svg",
                          render_line_chart("Detection rate vs dishonest share", "dishonest fraction",
                                            "detection rate", det_series));
  detail::write_text_file(dir / "false_alarm_vs_dishonest.svg",
                          render_line_chart("False alarm rate vs dishonest share",
                                            "dishonest fraction", "false alarm rate", fa_series));
  detail::write_text_file(dir / "leakage_vs_dishonest.svg",
                          render_line_chart("Leakage probability vs dishonest share",
                                            "dishonest fraction", "leakage probability", leak_series));
  out << "wrote " << targets.size() << " files to " << dir.string() << "\n";
  return kExitOk;
}

// Loads a ledger file, replays every head from its leaves, and checks the
// final anchor. Unreadable files are operational errors; files that read but
// fail validation (or do not parse as a ledger) report as invalid.
inline int cmd_ledger_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  if (!std::filesystem::exists(path)) {
    err << "no such file: " << path << "\n";
    return kExitUsage;
  }
  Chain chain(256);
  try {
    chain = Chain::load(path);
  } catch (const LedgerParseError& e) {
    err << "invalid ledger: " << e.what() << "\n";
    return kExitInvalid;
  }
  VerifyResult vr = chain.verify();
  if (!vr.valid) {
    err << "invalid ledger at block " << vr.height << ": " << vr.reason << "\n";
    return kExitInvalid;
  }
  out << "valid: " << chain.blocks().size() << " blocks, width k=" << chain.width_k()
      << ", tip " << chain.tip_hash().hex() << "\n";
  return kExitOk;
}

}  // namespace uivtsp
