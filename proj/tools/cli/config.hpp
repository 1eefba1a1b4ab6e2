#pragma once

// Run configuration for the lfmimo tool. The on-disk form is a single JSON
// object; every section is optional and falls back to the reference
// scenario (N_t = 4, W = 1 MHz, sigma^2 = 1, P_obj = 1e-4, N_b = 1080,
// P_0 = 40 dB, B_0 = 10, lambda = 300 packets/s, eps0 = 0.01, D_max = 2 ms).
//
// Power-like quantities accept either a linear key or a "_db" key (never
// both). Serialization always emits the canonical linear form.

#include <cstdint>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfmimo/allocator.hpp"
#include "lfmimo/amc.hpp"
#include "lfmimo/simulator.hpp"
#include "lfmimo/sinr.hpp"
#include "lfmimo/traffic.hpp"

namespace lfmimo::cli {

enum class Scenario { cmin_sweep, allocate, validate_cdf, simulate_queue, thresholds };
enum class OutputFormat { csv, json };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);
std::string_view to_string(OutputFormat f);
OutputFormat format_from_string(std::string_view s);

struct ModulationConfig {
  std::vector<ModulationMode> modes = default_modes();
  double p_obj = 1e-4;
  double symbol_rate = 1e6;  // W, symbols/s

  ModulationTable build() const;
};

struct LinkSection {
  int n_t = 4;
  double sigma2 = 1.0;
  CodebookMode codebook = CodebookMode::automatic;
  int explicit_max_bits = 12;
  std::optional<std::string> codebook_file;
};

struct QueueSection {
  double slot = 1e-3;
  std::uint64_t horizon = 1'000'000;
  int b = 8;
  double gamma = 1000.0;  // linear
  RhoHatEstimator estimator = RhoHatEstimator::slot_nonempty;
  std::optional<std::size_t> forced_mode;
};

struct SweepSection {
  std::vector<double> lambda{1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500, 5000};
  std::vector<double> d_max{0.002, 0.004, 0.008};
  std::vector<double> xi{80, 120, 160, 200, 240};
  std::vector<Regime> regime{Regime::general};
};

struct ValidatePoint {
  Regime regime = Regime::general;
  int b = 8;
  double gamma = 10.0;            // linear; +inf is written as "inf"
  std::optional<double> model_b;  // bits assumed by the analytic cdf, defaults to b
  std::optional<double> threshold;  // overrides validate.threshold
  std::optional<std::string> sample_dump;
};

struct ValidateSection {
  std::size_t trials = 100000;
  double threshold = 0.05;
  std::vector<ValidatePoint> points;
};

struct OutputSection {
  std::optional<std::string> path;
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  Scenario scenario = Scenario::allocate;
  std::uint64_t seed = 1;
  TrafficSpec traffic;
  ModulationConfig modulation;
  LinkSection link;
  CostModel cost;
  ResourceBounds bounds;
  QueueSection queue;
  SweepSection sweep;
  ValidateSection validate;
  OutputSection output;

  /// Checks every section's invariants; throws ValidationError with a
  /// dotted field path.
  void check() const;

  AllocationContext allocation_context() const;
  QueueSimConfig queue_config() const;
};

RunConfig default_config();
std::vector<ValidatePoint> default_validate_points();

/// Parses a JSON document; unknown keys are rejected. Does not call check().
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Modulation table file: {"p_obj": ..., "symbol_rate": ..., "modes": [...]}.
ModulationConfig load_modulation_file(const std::string& path);

}  // namespace lfmimo::cli
