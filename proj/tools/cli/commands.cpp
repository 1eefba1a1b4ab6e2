#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "lfmimo/error.hpp"
#include "lfmimo/units.hpp"

namespace lfmimo::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

json finite_or_inf(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return {};
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return fmt::format("{}", v.get<std::uint64_t>());
  if (v.is_number_integer()) return fmt::format("{}", v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    return fmt::format("{:.10g}", d);
  }
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

json allocation_row(double xi, double d_max, Method method, const AllocationResult* r) {
  if (r == nullptr) {
    return json::array({xi, d_max, std::string(to_string(method)), nullptr, nullptr, nullptr, nullptr,
                        kStatusInfeasible});
  }
  return json::array({xi, d_max, std::string(to_string(method)), r->b, round_db(linear_to_db(r->p)), r->cost,
                      r->achieved_violation, kStatusOk});
}

std::vector<Method> methods_for(Regime regime) {
  switch (regime) {
    case Regime::general: return {Method::proposed, Method::exhaustive};
    case Regime::interference_limited: return {Method::j2};
    case Regime::noise_limited: return {Method::j3};
  }
  return {};
}

AllocationResult run_method(const JointAllocator& alloc, Method m) {
  switch (m) {
    case Method::proposed: return alloc.allocate_proposed();
    case Method::exhaustive: return alloc.allocate_exhaustive();
    case Method::j2: return alloc.allocate_interference_limited();
    case Method::j3: return alloc.allocate_noise_limited();
  }
  throw std::logic_error("unknown method");
}

// Sample dumps go next to the output file and never elsewhere.
std::filesystem::path dump_path(const RunConfig& cfg, const std::string& name, const std::string& field) {
  if (!cfg.output.path) throw ValidationError(field, "sample dumps need output.path");
  const std::filesystem::path p(name);
  if (p.empty() || p.has_parent_path() || p.is_absolute() || name == "." || name == "..") {
    throw ValidationError(field, "must be a plain file name");
  }
  return std::filesystem::path(*cfg.output.path).parent_path() / p;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

const json& Table::at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << csv_cell(table.columns[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

void write_json(const Table& table, std::ostream& out) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = row.at(i);
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

void write_table(const Table& table, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) {
    write_csv(table, out);
  } else {
    write_json(table, out);
  }
}

Table run_cmin_sweep(const RunConfig& cfg) {
  cfg.check();
  Table t{{"lambda", "d_max", "c_min_exact", "c_min_theorem1"}, {}};
  for (double lambda : sorted(cfg.sweep.lambda)) {
    for (double d : sorted(cfg.sweep.d_max)) {
      TrafficSpec spec = cfg.traffic;
      spec.lambda = lambda;
      spec.d_max = d;
      t.rows.push_back(json::array({lambda, d, min_serve_rate(spec), theorem1_approx(spec)}));
    }
  }
  return t;
}

Table run_allocate(const RunConfig& cfg) {
  cfg.check();
  Table t{{"xi", "d_max", "method", "B", "P_dB", "cost", "achieved_violation", "status"}, {}};
  std::vector<Regime> regimes = cfg.sweep.regime;
  std::sort(regimes.begin(), regimes.end());
  regimes.erase(std::unique(regimes.begin(), regimes.end()), regimes.end());

  const AllocationContext base = cfg.allocation_context();
  for (double xi : sorted(cfg.sweep.xi)) {
    for (double d : sorted(cfg.sweep.d_max)) {
      AllocationContext ctx = base;
      ctx.cost = CostModel::from_xi(xi, cfg.cost.phi);
      ctx.traffic.d_max = d;
      for (Regime regime : regimes) {
        ctx.regime = regime;
        const JointAllocator alloc(ctx);
        for (Method m : methods_for(regime)) {
          try {
            const auto r = run_method(alloc, m);
            t.rows.push_back(allocation_row(xi, d, m, &r));
          } catch (const InfeasibleError&) {
            t.rows.push_back(allocation_row(xi, d, m, nullptr));
          }
        }
      }
    }
  }
  return t;
}

std::size_t count_infeasible(const Table& allocation) {
  const std::size_t col = allocation.column("status");
  return static_cast<std::size_t>(std::count_if(allocation.rows.begin(), allocation.rows.end(), [&](const auto& row) {
    return row.at(col) == kStatusInfeasible;
  }));
}

Table run_validate_cdf(const RunConfig& cfg) {
  cfg.check();
  Table t{{"regime", "b", "gamma", "model_b", "trials", "ks_distance", "threshold", "pass"}, {}};
  std::optional<Codebook> fixed;
  if (cfg.link.codebook_file) fixed = Codebook::load(*cfg.link.codebook_file);

  for (std::size_t i = 0; i < cfg.validate.points.size(); ++i) {
    const auto& pt = cfg.validate.points[i];
    LinkConfig link;
    link.n_t = cfg.link.n_t;
    link.b = pt.b;
    link.gamma = pt.gamma;
    link.trials = cfg.validate.trials;
    link.seed = cfg.seed;
    link.codebook = cfg.link.codebook;
    link.explicit_max_bits = cfg.link.explicit_max_bits;
    link.fixed_codebook = fixed;

    const double model_b = pt.model_b.value_or(static_cast<double>(pt.b));
    const auto params = SinrModelParams::from_gamma(cfg.link.n_t, model_b, pt.gamma);
    const auto sample = empirical_sinr(link);
    if (pt.sample_dump) {
      const auto path = dump_path(cfg, *pt.sample_dump, "validate.points[" + std::to_string(i) + "].sample_dump");
      std::ofstream dump(path, std::ios::binary);
      for (double v : sample.values) dump << fmt::format("{:.17g}\n", v);
      if (!dump) throw std::runtime_error("cannot write " + path.string());
    }
    const double ks = ks_distance(sample.values, [&](double x) { return cdf(params, x, pt.regime); });
    const double threshold = pt.threshold.value_or(cfg.validate.threshold);
    t.rows.push_back(json::array({std::string(to_string(pt.regime)), pt.b, finite_or_inf(pt.gamma), model_b,
                                  cfg.validate.trials, ks, threshold, ks <= threshold}));
  }
  return t;
}

Table run_thresholds(const RunConfig& cfg) {
  const ModulationTable table = cfg.modulation.build();
  Table t{{"n", "modulation", "a_n", "g_n", "gamma_pn_db", "omega_linear", "omega_db"}, {}};
  const auto& modes = table.modes();
  for (std::size_t n = 1; n <= modes.size(); ++n) {
    const auto& m = modes[n - 1];
    const double omega = table.threshold(n);
    t.rows.push_back(json::array({n, m.name, m.a, m.g, m.gamma_p_db(), omega, linear_to_db(omega)}));
  }
  return t;
}

json run_simulate_queue(const RunConfig& cfg) {
  cfg.check();
  const auto stats = simulate_queue(cfg.queue_config());
  ordered_json out = ordered_json::object();
  out["dropped_fraction"] = stats.dropped_fraction;
  out["rho_hat_est"] = stats.rho_hat_est;
  out["mode_histogram"] = stats.mode_histogram;
  return json(out);
}

Table queue_table(const json& result) {
  Table t{{"dropped_fraction", "rho_hat_est"}, {}};
  json row = json::array({result.at("dropped_fraction"), result.at("rho_hat_est")});
  const auto& hist = result.at("mode_histogram");
  for (std::size_t n = 0; n < hist.size(); ++n) {
    t.columns.push_back("mode_" + std::to_string(n));
    row.push_back(hist[n]);
  }
  t.rows.push_back(std::move(row));
  return t;
}

std::vector<AllocationTarget> reference_allocation_targets() {
  const double xi[] = {80, 120, 160, 200, 240};
  const int b[] = {10, 8, 7, 6, 5};
  const double p2[] = {38.0, 38.6, 38.9, 39.3, 39.8};
  const double p8[] = {37.7, 38.2, 38.6, 39.0, 39.4};
  std::vector<AllocationTarget> out;
  for (int i = 0; i < 5; ++i) out.push_back({xi[i], 0.002, b[i], p2[i]});
  for (int i = 0; i < 5; ++i) out.push_back({xi[i], 0.008, b[i], p8[i]});
  return out;
}

std::optional<std::size_t> best_calibration(const Table& calibration, bool require_trends) {
  const std::size_t score = calibration.column("score");
  const std::size_t trends = calibration.column("trends_hold");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < calibration.rows.size(); ++i) {
    const auto& row = calibration.rows[i];
    if (require_trends && !row.at(trends).get<bool>()) continue;
    if (!best || row.at(score).get<double>() < calibration.rows[*best].at(score).get<double>()) best = i;
  }
  return best;
}

std::vector<double> default_rho_hat_grid() {
  std::vector<double> grid;
  // Below eps0 = 0.01 the target is met at any power; above ~0.0106 the 2 ms points are infeasible.
  for (int k = 1; k <= 120; ++k) grid.push_back(0.0100 + 5e-6 * k);
  return grid;
}

Table calibrate_rho_hat(const RunConfig& cfg, const std::vector<double>& grid,
                        const std::vector<AllocationTarget>& targets) {
  cfg.check();
  constexpr double kInfeasiblePenalty = 100.0;
  Table t{{"rho_hat", "score", "feasible_points", "trends_hold"}, {}};
  const AllocationContext base = cfg.allocation_context();

  for (double rho : grid) {
    double score = 0.0;
    int feasible = 0;
    // (d_max, xi) -> result, for the trend checks.
    std::vector<std::tuple<double, double, std::optional<AllocationResult>>> results;
    for (const auto& tg : targets) {
      AllocationContext ctx = base;
      ctx.traffic.rho_hat = rho;
      ctx.traffic.d_max = tg.d_max;
      ctx.cost = CostModel::from_xi(tg.xi, cfg.cost.phi);
      std::optional<AllocationResult> r;
      try {
        r = JointAllocator(ctx).allocate_proposed();
      } catch (const InfeasibleError&) {
      }
      if (r) {
        ++feasible;
        score += std::abs(r->b - tg.b) + std::abs(round_db(linear_to_db(r->p)) - tg.p_db);
      } else {
        score += kInfeasiblePenalty;
      }
      results.emplace_back(tg.d_max, tg.xi, r);
    }

    bool trends = feasible == static_cast<int>(targets.size());
    std::sort(results.begin(), results.end(),
              [](const auto& a, const auto& b) { return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b)); });
    for (std::size_t i = 0; trends && i + 1 < results.size(); ++i) {
      const auto& [d0, x0, r0] = results[i];
      const auto& [d1, x1, r1] = results[i + 1];
      if (d0 != d1) continue;
      if (r1->b > r0->b || r1->p < r0->p) trends = false;
    }
    for (std::size_t i = 0; trends && i < results.size(); ++i) {
      for (std::size_t j = 0; trends && j < results.size(); ++j) {
        const auto& [di, xi_i, ri] = results[i];
        const auto& [dj, xi_j, rj] = results[j];
        if (xi_i == xi_j && di < dj && !(rj->p < ri->p)) trends = false;
      }
    }
    t.rows.push_back(json::array({rho, score, feasible, trends}));
  }
  return t;
}

}  // namespace lfmimo::cli
