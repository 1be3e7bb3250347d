// Command line front end: `run` executes one scenario per selected scheme,
// `sweep` executes the comparison grid, `ledger-verify` validates a stored
// ledger file. All heavy lifting lives in the headers so tests can drive the
// same code paths in process.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uivtsp/uivtsp.hpp"

namespace {

using namespace uivtsp;

Thresholds parse_thresholds_csv(const std::string& csv) {
  std::vector<double> parts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CliError("thresholds must be three numbers 'low,mid,high', got '" + csv + "'");
    }
  }
  if (parts.size() != 3)
    throw CliError("thresholds must be three numbers 'low,mid,high', got '" + csv + "'");
  return Thresholds{parts[0], parts[1], parts[2]};
}

std::vector<double> parse_fraction_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CliError("fractions must be comma separated numbers, got '" + csv + "'");
    }
  }
  return out;
}

PenaltyMode parse_penalty(const std::string& s) {
  if (s == "literal") return PenaltyMode::literal;
  if (s == "on-leak") return PenaltyMode::on_leak;
  throw CliError("unknown penalty mode '" + s + "' (expected literal or on-leak)");
}

// Scenario knobs shared by run and sweep. Resolution order: built-in
// defaults, then the optional JSON config file, then explicit flags.
struct ScenarioFlags {
  std::uint64_t workers = 2000;
  double dishonest = 0.10;
  double semihonest = 0.10;
  std::uint64_t cycles = 200;
  int width_k = 256;
  int embed = 2;
  std::string thresholds = "0.2,0.5,0.8";
  std::string penalty = "on-leak";
  std::uint64_t trap_window = 5;
  std::uint64_t seed = 1;
  std::string config_path;

  CLI::Option* o_workers = nullptr;
  CLI::Option* o_dishonest = nullptr;
  CLI::Option* o_semihonest = nullptr;
  CLI::Option* o_cycles = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_embed = nullptr;
  CLI::Option* o_thresholds = nullptr;
  CLI::Option* o_penalty = nullptr;
  CLI::Option* o_trap = nullptr;
  CLI::Option* o_seed = nullptr;

  void attach(CLI::App* cmd) {
    o_workers = cmd->add_option("--workers", workers, "number of simulated workers");
    o_dishonest = cmd->add_option("--dishonest", dishonest, "dishonest worker fraction [0,1]");
    o_semihonest = cmd->add_option("--semihonest", semihonest, "semi-honest worker fraction [0,1]");
    o_cycles = cmd->add_option("--cycles", cycles, "number of simulated cycles");
    o_k = cmd->add_option("--k", width_k, "token width in bits (256, 512, 1024)");
    o_embed = cmd->add_option("--embed", embed, "tracing copies embedded per document (1-4)");
    o_thresholds = cmd->add_option("--thresholds", thresholds, "trust thresholds 'low,mid,high'");
    o_penalty = cmd->add_option("--penalty", penalty, "penalty mode: literal or on-leak");
    o_trap = cmd->add_option("--trap-window", trap_window, "false-document validity in cycles");
    o_seed = cmd->add_option("--seed", seed, "root random seed");
    cmd->add_option("--config", config_path, "JSON config file; explicit flags override it");
  }

  ScenarioConfig resolve() const {
    ScenarioConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw CliError("cannot open config file: " + config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        throw CliError("config file is not valid JSON: " + std::string(e.what()));
      }
      try {
        cfg = config_from_json(j, cfg);
      } catch (const std::exception& e) {
        throw CliError("bad config value: " + std::string(e.what()));
      }
    }
    if (o_workers->count()) cfg.n_workers = workers;
    if (o_dishonest->count()) cfg.pct_dishonest = dishonest;
    if (o_semihonest->count()) cfg.pct_semihonest = semihonest;
    if (o_cycles->count()) cfg.cycles = cycles;
    if (o_k->count()) cfg.width_k = width_k;
    if (o_embed->count()) cfg.embed_count = embed;
    if (o_thresholds->count()) cfg.thresholds = parse_thresholds_csv(thresholds);
    if (o_penalty->count()) cfg.penalty_mode = parse_penalty(penalty);
    if (o_trap->count()) cfg.trap_window_cycles = trap_window;
    if (o_seed->count()) cfg.seed = seed;
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic access-token and leak-tracing protocol simulator"};
  app.require_subcommand(1);

  // run
  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario per selected scheme");
  ScenarioFlags run_flags;
  run_flags.attach(run_cmd);
  std::string run_scheme = "both";
  std::string run_out = "out";
  bool run_force = false;
  run_cmd->add_option("--scheme", run_scheme, "uiv-tsp, uiv-sp, or both");
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_flag("--force", run_force, "overwrite existing output files");

  // sweep
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the comparison grid");
  ScenarioFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string sweep_scheme = "both";
  std::string sweep_out = "out";
  std::string sweep_fracs = "0.1,0.2,0.3,0.4,0.5";
  std::uint64_t sweep_seeds = 10;
  bool sweep_force = false;
  bool sweep_delay = false;
  std::uint64_t delay_rounds = 1050;
  std::uint64_t delay_warmup = 50;
  sweep_cmd->add_option("--scheme", sweep_scheme, "uiv-tsp, uiv-sp, or both");
  sweep_cmd->add_option("--fracs", sweep_fracs, "dishonest fractions, comma separated");
  sweep_cmd->add_option("--seeds", sweep_seeds, "independent runs per grid cell");
  sweep_cmd->add_flag("--delay", sweep_delay, "also measure the tracing-delay grid");
  sweep_cmd->add_option("--delay-rounds", delay_rounds, "rounds per tracing-delay cell");
  sweep_cmd->add_option("--delay-warmup", delay_warmup, "warmup rounds dropped per cell");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_flag("--force", sweep_force, "overwrite existing output files");

  // ledger-verify
  CLI::App* verify_cmd = app.add_subcommand("ledger-verify", "validate a stored ledger file");
  std::string ledger_path;
  verify_cmd->add_option("path", ledger_path, "ledger .jsonl file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? uivtsp::kExitOk : uivtsp::kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      uivtsp::RunOptions opt;
      opt.base = run_flags.resolve();
      opt.schemes = uivtsp::parse_scheme_selection(run_scheme);
      opt.out_dir = run_out;
      opt.force = run_force;
      return uivtsp::cmd_run(opt, std::cout);
    }
    if (sweep_cmd->parsed()) {
      uivtsp::SweepOptions opt;
      opt.base = sweep_flags.resolve();
      opt.schemes = uivtsp::parse_scheme_selection(sweep_scheme);
      opt.fractions = parse_fraction_list(sweep_fracs);
      opt.seeds = sweep_seeds;
      opt.with_delay = sweep_delay;
      opt.delay_rounds = delay_rounds;
      opt.delay_warmup = delay_warmup;
      opt.out_dir = sweep_out;
      opt.force = sweep_force;
      return uivtsp::cmd_sweep(opt, std::cout);
    }
    if (verify_cmd->parsed())
      return uivtsp::cmd_ledger_verify(ledger_path, std::cout, std::cerr);
  } catch (const uivtsp::CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uivtsp::kExitUsage;
  }
  return uivtsp::kExitUsage;
}
