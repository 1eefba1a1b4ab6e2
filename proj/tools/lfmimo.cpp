// lfmimo: delay-constrained limited-feedback MU-MIMO resource allocation tool.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "lfmimo/error.hpp"

namespace {

using lfmimo::cli::OutputFormat;
using lfmimo::cli::RunConfig;
using lfmimo::cli::Scenario;

enum ExitCode { kOk = 0, kFailure = 1, kInvalid = 2, kInfeasible = 3 };

void report(const std::string& kind, const std::string& message, const std::string& field = {}) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  if (!field.empty()) j["field"] = field;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (!cfg.output.path) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(*cfg.output.path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + *cfg.output.path + "'");
}

int run(const RunConfig& cfg, bool calibrate) {
  std::ostringstream text;
  int code = kOk;
  switch (cfg.scenario) {
    case Scenario::cmin_sweep:
      write_table(run_cmin_sweep(cfg), cfg.output.format, text);
      break;
    case Scenario::allocate: {
      if (calibrate) {
        write_table(calibrate_rho_hat(cfg, lfmimo::cli::default_rho_hat_grid()), cfg.output.format, text);
        break;
      }
      const auto table = run_allocate(cfg);
      write_table(table, cfg.output.format, text);
      if (const auto bad = count_infeasible(table); bad > 0) {
        report("infeasible", std::to_string(bad) + " of " + std::to_string(table.rows.size()) +
                                 " allocation rows are infeasible");
        code = kInfeasible;
      }
      break;
    }
    case Scenario::validate_cdf:
      write_table(run_validate_cdf(cfg), cfg.output.format, text);
      break;
    case Scenario::simulate_queue: {
      const auto result = run_simulate_queue(cfg);
      if (cfg.output.format == OutputFormat::json) {
        text << nlohmann::ordered_json(result).dump(2) << '\n';
      } else {
        write_csv(lfmimo::cli::queue_table(result), text);
      }
      break;
    }
    case Scenario::thresholds:
      write_table(run_thresholds(cfg), cfg.output.format, text);
      break;
  }
  emit(cfg, text.str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-constrained power and feedback allocation for limited-feedback MU-MIMO"};
  app.set_version_flag("--version", "0.1.0");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format;
  bool calibrate = false;
  bool dump_config = false;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master RNG seed");
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--print-config", dump_config, "Print the resolved configuration as canonical JSON and exit");

  app.fallthrough();  // subcommands inherit this, so global flags may follow them
  auto* cmin = app.add_subcommand("cmin", "Minimum serve rate versus arrival rate and delay bound");
  auto* allocate = app.add_subcommand("allocate", "Joint power / feedback-bit allocation over the xi x D_max grid");
  allocate->add_flag("--calibrate-rho-hat", calibrate, "Score rho_hat candidates against the reference allocation");
  auto* validate = app.add_subcommand("validate-cdf", "Kolmogorov-Smirnov check of the SINR model against Monte Carlo");
  auto* queue = app.add_subcommand("simulate-queue", "Slot-level queue simulation with AMC service");
  auto* thresholds = app.add_subcommand("thresholds", "Modulation table with SINR switching thresholds");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report("usage", e.what());
    return kInvalid;
  }

  try {
    RunConfig cfg = config_path.empty() ? lfmimo::cli::default_config() : lfmimo::cli::load_config(config_path);
    if (cmin->parsed()) cfg.scenario = Scenario::cmin_sweep;
    if (allocate->parsed()) cfg.scenario = Scenario::allocate;
    if (validate->parsed()) cfg.scenario = Scenario::validate_cdf;
    if (queue->parsed()) cfg.scenario = Scenario::simulate_queue;
    if (thresholds->parsed()) cfg.scenario = Scenario::thresholds;
    if (seed) cfg.seed = *seed;
    if (!out_path.empty()) cfg.output.path = out_path;
    if (!format.empty()) cfg.output.format = lfmimo::cli::format_from_string(format);

    if (dump_config) {
      std::cout << lfmimo::cli::to_json(cfg).dump(2) << '\n';
      return kOk;
    }
    return run(cfg, calibrate);
  } catch (const lfmimo::ValidationError& e) {
    report("validation", e.what(), e.field());
    return kInvalid;
  } catch (const lfmimo::InfeasibleError& e) {
    report("infeasible", e.what());
    return kInfeasible;
  } catch (const std::exception& e) {
    report("failure", e.what());
    return kFailure;
  }
}
