#pragma once

// Scenario runners behind the lfmimo subcommands. Each returns an in-memory
// table; the writers turn it into CSV or JSON text.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace lfmimo::cli {

/// Column-ordered result table. Cells are JSON scalars; null marks a value
/// that does not exist for the row (e.g. B of an infeasible allocation).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  /// Index of `column`; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
  const nlohmann::json& at(std::size_t row, const std::string& name) const;
};

/// Comma-separated, header row, LF endings. Numbers use up to 10
/// significant digits, null cells are empty.
void write_csv(const Table& table, std::ostream& out);
/// Array of objects with keys in column order.
void write_json(const Table& table, std::ostream& out);
void write_table(const Table& table, OutputFormat format, std::ostream& out);

inline constexpr const char* kStatusOk = "ok";
inline constexpr const char* kStatusInfeasible = "infeasible";

/// (lambda, d_max, c_min_exact, c_min_theorem1), sorted by (lambda, d_max).
Table run_cmin_sweep(const RunConfig& cfg);

/// (xi, d_max, method, B, P_dB, cost, achieved_violation, status) over the
/// sweep grid. Regime "general" yields proposed and exhaustive rows,
/// "interference_limited" j2 rows and "noise_limited" j3 rows. Infeasible
/// points keep their row with status "infeasible" and null results.
Table run_allocate(const RunConfig& cfg);

/// (regime, b, gamma, model_b, trials, ks_distance, threshold, pass) per
/// configured validation point.
Table run_validate_cdf(const RunConfig& cfg);

/// (n, modulation, a_n, g_n, gamma_pn_db, omega_linear, omega_db).
Table run_thresholds(const RunConfig& cfg);

/// {"dropped_fraction", "rho_hat_est", "mode_histogram"}.
nlohmann::json run_simulate_queue(const RunConfig& cfg);
/// The same result flattened to one row with a column per mode bin.
Table queue_table(const nlohmann::json& result);

/// Reference resource-allocation outcome used to score rho_hat candidates.
struct AllocationTarget {
  double xi;
  double d_max;
  int b;
  double p_db;
};
std::vector<AllocationTarget> reference_allocation_targets();

/// Scores every rho_hat in `grid` by sum |B - B_ref| + |P_dB - P_ref|
/// (100 per infeasible point) using the proposed allocator on cfg with the
/// targets' xi and d_max. Columns: (rho_hat, score, feasible_points,
/// trends_hold). Rows follow the grid order.
Table calibrate_rho_hat(const RunConfig& cfg, const std::vector<double>& grid,
                        const std::vector<AllocationTarget>& targets = reference_allocation_targets());
/// Row of the lowest score; with `require_trends` only rows whose
/// trends_hold is true compete. nullopt when no row qualifies.
std::optional<std::size_t> best_calibration(const Table& calibration, bool require_trends);
/// Default candidate grid for calibrate_rho_hat.
std::vector<double> default_rho_hat_grid();

/// Counts rows of a run_allocate table whose status is "infeasible".
std::size_t count_infeasible(const Table& allocation);

}  // namespace lfmimo::cli
