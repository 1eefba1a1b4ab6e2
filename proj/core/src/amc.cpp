#include "lfmimo/amc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lfmimo/error.hpp"
#include "lfmimo/units.hpp"

namespace lfmimo {

ModulationMode ModulationMode::from_db(int index, int bits_per_symbol, double a, double g,
                                       double gamma_p_db, std::string name) {
  return {index, bits_per_symbol, a, g, db_to_linear(gamma_p_db), std::move(name)};
}

double ModulationMode::gamma_p_db() const { return linear_to_db(gamma_p); }

std::vector<ModulationMode> default_modes() {
  return {
      ModulationMode::from_db(1, 1, 67.7328, 0.9819, 6.3281, "BPSK"),
      ModulationMode::from_db(2, 2, 73.8279, 0.4945, 9.3945, "QPSK"),
      ModulationMode::from_db(3, 3, 58.7332, 0.1641, 13.9470, "8QAM"),
      ModulationMode::from_db(4, 4, 55.9137, 0.0989, 16.0938, "16QAM"),
      ModulationMode::from_db(5, 5, 50.0552, 0.0381, 20.1103, "32QAM"),
      ModulationMode::from_db(6, 6, 42.5594, 0.0235, 22.0340, "64QAM"),
      ModulationMode::from_db(7, 7, 40.2559, 0.0094, 25.9677, "128QAM"),
  };
}

ModulationTable build_thresholds(std::vector<ModulationMode> modes, double p_obj,
                                 double symbol_rate) {
  if (modes.empty()) throw ValidationError("modulation.modes", "table is empty");
  if (!(symbol_rate > 0.0)) throw ValidationError("modulation.symbol_rate", "must be > 0");
  if (!(p_obj > 0.0)) throw ValidationError("modulation.p_obj", "must be > 0");

  ModulationTable table;
  table.thresholds_.reserve(modes.size() + 2);
  table.thresholds_.push_back(0.0);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    const std::string where = "modulation.modes[" + std::to_string(i) + "]";
    if (!(m.a > 0.0 && m.g > 0.0 && m.gamma_p > 0.0)) {
      throw ValidationError(where, "a_n, g_n and gamma_pn must be positive");
    }
    if (m.bits_per_symbol <= 0) throw ValidationError(where, "bits_per_symbol must be positive");
    if (i > 0 && m.bits_per_symbol <= modes[i - 1].bits_per_symbol) {
      throw ValidationError(where, "bits_per_symbol must increase with the mode index");
    }
    if (p_obj >= m.a) throw ValidationError("modulation.p_obj", "must be below a_n of every mode");
    const double omega = std::log(m.a / p_obj) / m.g;
    if (omega <= table.thresholds_.back()) {
      throw ValidationError(where, "switching thresholds are not strictly increasing");
    }
    if (omega < m.gamma_p) {
      throw ValidationError(where, "threshold falls below the cutoff SINR");
    }
    table.thresholds_.push_back(omega);
  }
  table.thresholds_.push_back(std::numeric_limits<double>::infinity());
  table.modes_ = std::move(modes);
  table.p_obj_ = p_obj;
  table.symbol_rate_ = symbol_rate;
  return table;
}

ModulationTable default_table() { return build_thresholds(default_modes(), 1e-4, 1e6); }

double per(const ModulationMode& mode, double rho) {
  if (rho < mode.gamma_p) return 1.0;
  return std::clamp(mode.a * std::exp(-mode.g * rho), 0.0, 1.0);
}

std::size_t select_mode(const ModulationTable& table, double rho) {
  const auto th = table.thresholds();
  // First threshold strictly above rho, minus one, gives the left-closed bin.
  const auto it = std::upper_bound(th.begin(), th.end(), rho);
  const auto n = static_cast<std::size_t>(it - th.begin());
  return n == 0 ? 0 : std::min(n - 1, table.level_count() - 1);
}

double serve_rate(const ModulationTable& table, std::size_t n) {
  if (n >= table.level_count()) throw std::out_of_range("serve_rate: mode index out of range");
  if (n == 0) return 0.0;
  return table.modes()[n - 1].bits_per_symbol * table.symbol_rate();
}

}  // namespace lfmimo
