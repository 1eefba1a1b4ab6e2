#pragma once

// Adaptive modulation: exponential packet-error-rate fit per constellation,
// SINR switching thresholds for a target PER, and mode -> serve rate.

#include <span>
#include <string>
#include <vector>

namespace lfmimo {

struct ModulationMode {
  int index = 0;            // 1-based position in the table
  int bits_per_symbol = 0;
  double a = 0.0;           // PER scale a_n
  double g = 0.0;           // PER slope g_n, per linear SINR unit
  double gamma_p = 0.0;     // cutoff SINR, linear
  std::string name;

  static ModulationMode from_db(int index, int bits_per_symbol, double a, double g,
                                double gamma_p_db, std::string name = {});
  double gamma_p_db() const;
};

/// Built-in PER fit for N_b = 1080 bit packets (BPSK .. 128QAM).
std::vector<ModulationMode> default_modes();

/// Immutable table of modes with their switching thresholds. Level 0 is
/// "no transmission"; levels 1..modes().size() map to the modes, so there
/// are modes().size() + 1 serve levels and modes().size() + 2 thresholds
/// (Omega_0 = 0, ..., Omega_N = +inf).
class ModulationTable {
public:
  ModulationTable() = default;

  const std::vector<ModulationMode>& modes() const { return modes_; }
  double p_obj() const { return p_obj_; }
  double symbol_rate() const { return symbol_rate_; }
  std::span<const double> thresholds() const { return thresholds_; }
  double threshold(std::size_t n) const { return thresholds_.at(n); }
  std::size_t level_count() const { return modes_.size() + 1; }

private:
  friend ModulationTable build_thresholds(std::vector<ModulationMode>, double, double);

  std::vector<ModulationMode> modes_;
  double p_obj_ = 0.0;
  double symbol_rate_ = 0.0;
  std::vector<double> thresholds_;
};

/// Omega_n = ln(a_n / p_obj) / g_n. Throws ValidationError for empty tables,
/// p_obj outside (0, min a_n), thresholds that are not strictly increasing,
/// or a threshold that falls below its mode's cutoff SINR.
ModulationTable build_thresholds(std::vector<ModulationMode> modes, double p_obj,
                                 double symbol_rate = 1e6);

/// The built-in modes with p_obj = 1e-4 and W = 1 MHz.
ModulationTable default_table();

/// PER of `mode` at linear SINR rho: 1 below the cutoff, a e^{-g rho} above.
double per(const ModulationMode& mode, double rho);

/// Unique n with Omega_n <= rho < Omega_{n+1}.
std::size_t select_mode(const ModulationTable& table, double rho);

/// bits_per_symbol(n) * W in bits/s; level 0 serves nothing.
double serve_rate(const ModulationTable& table, std::size_t n);

}  // namespace lfmimo
