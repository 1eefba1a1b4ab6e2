#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <type_traits>

#include "lfmimo/error.hpp"
#include "lfmimo/units.hpp"

namespace lfmimo::cli {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~Section() = default;

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return to_number(raw(key), field(key));
  }

  template <typename Int>
  Int integer(const std::string& key, Int fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) return v.get<Int>();
      if (v.get<std::int64_t>() < 0) throw ValidationError(field(key), "must be >= 0");
    }
    return v.get<Int>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }

  /// Linear value from `key` or dB value from `key_db`; rejects both.
  double power(const std::string& key, double fallback) {
    const std::string key_db = key + "_db";
    if (has(key) && has(key_db)) {
      throw ValidationError(field(key), "give either '" + key + "' or '" + key_db + "', not both");
    }
    if (has(key_db)) return db_to_linear(to_number(raw(key_db), field(key_db)));
    return number(key, fallback);
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) throw ValidationError(field(key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(to_number(v[i], field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ValidationError(field(it.key()), "unknown key");
    }
  }

  static double to_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
    }
    throw ValidationError(where, "expected a number");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json number_to_json(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

ModulationMode parse_mode(const json& j, const std::string& where) {
  Section s(j, where);
  ModulationMode m;
  m.index = s.integer<int>("index", 0);
  m.bits_per_symbol = s.integer<int>("bits_per_symbol", 0);
  m.a = s.number("a_n", 0.0);
  m.g = s.number("g_n", 0.0);
  if (!s.has("gamma_pn_db")) throw ValidationError(s.field("gamma_pn_db"), "missing");
  m.gamma_p = db_to_linear(s.number("gamma_pn_db", 0.0));
  m.name = s.string("name", "");
  s.reject_unknown();
  return m;
}

json mode_to_json(const ModulationMode& m) {
  json j = {{"index", m.index},
            {"bits_per_symbol", m.bits_per_symbol},
            {"a_n", m.a},
            {"g_n", m.g},
            {"gamma_pn_db", m.gamma_p_db()}};
  if (!m.name.empty()) j["name"] = m.name;
  return j;
}

ModulationConfig parse_modulation(Section& s, const std::string& where) {
  ModulationConfig out;
  if (s.has("table_file")) {
    if (s.has("modes")) throw ValidationError(s.field("table_file"), "conflicts with inline modes");
    out = load_modulation_file(s.string("table_file", ""));
  }
  out.p_obj = s.number("p_obj", out.p_obj);
  out.symbol_rate = s.number("symbol_rate", out.symbol_rate);
  if (s.has("modes")) {
    const json& arr = s.raw("modes");
    if (!arr.is_array()) throw ValidationError(where + ".modes", "expected an array");
    out.modes.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.modes.push_back(parse_mode(arr[i], where + ".modes[" + std::to_string(i) + "]"));
    }
  }
  return out;
}

CodebookMode codebook_from_string(const std::string& s, const std::string& where) {
  if (s == "auto") return CodebookMode::automatic;
  if (s == "explicit") return CodebookMode::explicit_rvq;
  if (s == "sampled") return CodebookMode::sampled_rvq;
  throw ValidationError(where, "expected one of auto, explicit, sampled");
}

std::string to_string(CodebookMode m) {
  switch (m) {
    case CodebookMode::automatic: return "auto";
    case CodebookMode::explicit_rvq: return "explicit";
    case CodebookMode::sampled_rvq: return "sampled";
  }
  return "auto";
}

RhoHatEstimator estimator_from_string(const std::string& s, const std::string& where) {
  if (s == "slot_nonempty") return RhoHatEstimator::slot_nonempty;
  if (s == "arrival_sees_backlog") return RhoHatEstimator::arrival_sees_backlog;
  throw ValidationError(where, "expected slot_nonempty or arrival_sees_backlog");
}

std::string to_string(RhoHatEstimator e) {
  return e == RhoHatEstimator::slot_nonempty ? "slot_nonempty" : "arrival_sees_backlog";
}

Regime parse_regime(const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError(where, "expected a regime name");
  try {
    return regime_from_string(v.get<std::string>());
  } catch (const ValidationError&) {
    throw ValidationError(where, "expected general, interference_limited or noise_limited");
  }
}

template <typename Fn>
void with_section(Section& parent, const std::string& key, Fn&& fn) {
  if (!parent.has(key)) return;
  Section s(parent.raw(key), parent.field(key));
  fn(s);
  s.reject_unknown();
}

void check_axis(const std::vector<double>& axis, const std::string& field) {
  if (axis.empty()) throw ValidationError(field, "sweep axis must be nonempty");
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::cmin_sweep: return "cmin_sweep";
    case Scenario::allocate: return "allocate";
    case Scenario::validate_cdf: return "validate_cdf";
    case Scenario::simulate_queue: return "simulate_queue";
    case Scenario::thresholds: return "thresholds";
  }
  return "allocate";
}

Scenario scenario_from_string(std::string_view s) {
  if (s == "cmin_sweep") return Scenario::cmin_sweep;
  if (s == "allocate") return Scenario::allocate;
  if (s == "validate_cdf") return Scenario::validate_cdf;
  if (s == "simulate_queue") return Scenario::simulate_queue;
  if (s == "thresholds") return Scenario::thresholds;
  throw ValidationError("scenario", "unknown scenario '" + std::string(s) + "'");
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

OutputFormat format_from_string(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ValidationError("output.format", "expected csv or json");
}

ModulationTable ModulationConfig::build() const { return build_thresholds(modes, p_obj, symbol_rate); }

std::vector<ValidatePoint> default_validate_points() {
  const double inf = std::numeric_limits<double>::infinity();
  return {
      {Regime::general, 4, 10.0, {}, {}, {}},
      {Regime::general, 4, 100.0, {}, {}, {}},
      {Regime::general, 8, 10.0, {}, {}, {}},
      {Regime::general, 8, 100.0, {}, {}, {}},
      {Regime::interference_limited, 4, inf, {}, {}, {}},
      {Regime::interference_limited, 8, inf, {}, {}, {}},
      {Regime::noise_limited, 16, 1.0, {}, 0.03, {}},
  };
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.validate.points = default_validate_points();
  return cfg;
}

ModulationConfig load_modulation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("modulation.table_file", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("modulation.table_file", e.what());
  }
  Section s(j, "modulation.table_file");
  if (s.has("table_file")) throw ValidationError("modulation.table_file", "files cannot nest");
  auto out = parse_modulation(s, "modulation.table_file");
  s.reject_unknown();
  return out;
}

RunConfig parse_config(const json& j) {
  RunConfig cfg = default_config();
  Section root(j, "");

  if (root.has("scenario")) cfg.scenario = scenario_from_string(root.string("scenario", ""));
  cfg.seed = root.integer<std::uint64_t>("seed", cfg.seed);

  with_section(root, "traffic", [&](Section& s) {
    cfg.traffic.lambda = s.number("lambda", cfg.traffic.lambda);
    cfg.traffic.packet_bits = s.integer<std::int64_t>("packet_bits", cfg.traffic.packet_bits);
    cfg.traffic.d_max = s.number("d_max", cfg.traffic.d_max);
    cfg.traffic.epsilon0 = s.number("epsilon0", cfg.traffic.epsilon0);
    cfg.traffic.rho_hat = s.number("rho_hat", cfg.traffic.rho_hat);
  });

  with_section(root, "modulation", [&](Section& s) { cfg.modulation = parse_modulation(s, "modulation"); });

  with_section(root, "link", [&](Section& s) {
    cfg.link.n_t = s.integer<int>("n_t", cfg.link.n_t);
    cfg.link.sigma2 = s.number("sigma2", cfg.link.sigma2);
    if (s.has("codebook")) cfg.link.codebook = codebook_from_string(s.string("codebook", ""), s.field("codebook"));
    cfg.link.explicit_max_bits = s.integer<int>("explicit_max_bits", cfg.link.explicit_max_bits);
    if (s.has("codebook_file")) cfg.link.codebook_file = s.string("codebook_file", "");
  });

  with_section(root, "cost", [&](Section& s) {
    cfg.cost.phi = s.number("phi", cfg.cost.phi);
    cfg.cost.psi = s.number("psi", cfg.cost.psi);
  });

  with_section(root, "bounds", [&](Section& s) {
    cfg.bounds.p_max = s.power("p_max", cfg.bounds.p_max);
    cfg.bounds.b_max = s.integer<int>("b_max", cfg.bounds.b_max);
    cfg.bounds.p_min = s.power("p_min", cfg.bounds.p_min);
  });

  with_section(root, "queue", [&](Section& s) {
    cfg.queue.slot = s.number("slot", cfg.queue.slot);
    cfg.queue.horizon = s.integer<std::uint64_t>("horizon", cfg.queue.horizon);
    cfg.queue.b = s.integer<int>("b", cfg.queue.b);
    cfg.queue.gamma = s.power("gamma", cfg.queue.gamma);
    if (s.has("estimator")) {
      cfg.queue.estimator = estimator_from_string(s.string("estimator", ""), s.field("estimator"));
    }
    if (s.has("forced_mode")) cfg.queue.forced_mode = s.integer<std::size_t>("forced_mode", 0);
  });

  with_section(root, "sweep", [&](Section& s) {
    cfg.sweep.lambda = s.numbers("lambda", cfg.sweep.lambda);
    cfg.sweep.d_max = s.numbers("d_max", cfg.sweep.d_max);
    cfg.sweep.xi = s.numbers("xi", cfg.sweep.xi);
    if (s.has("regime")) {
      const json& arr = s.raw("regime");
      if (!arr.is_array()) throw ValidationError("sweep.regime", "expected an array");
      cfg.sweep.regime.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        cfg.sweep.regime.push_back(parse_regime(arr[i], "sweep.regime[" + std::to_string(i) + "]"));
      }
    }
  });

  with_section(root, "validate", [&](Section& s) {
    cfg.validate.trials = s.integer<std::size_t>("trials", cfg.validate.trials);
    cfg.validate.threshold = s.number("threshold", cfg.validate.threshold);
    if (s.has("points")) {
      const json& arr = s.raw("points");
      if (!arr.is_array()) throw ValidationError("validate.points", "expected an array");
      cfg.validate.points.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "validate.points[" + std::to_string(i) + "]";
        Section p(arr[i], where);
        ValidatePoint pt;
        if (p.has("regime")) pt.regime = parse_regime(p.raw("regime"), p.field("regime"));
        pt.b = p.integer<int>("b", pt.b);
        pt.gamma = p.power("gamma", pt.gamma);
        if (p.has("model_b")) pt.model_b = p.number("model_b", 0.0);
        if (p.has("threshold")) pt.threshold = p.number("threshold", 0.0);
        if (p.has("sample_dump")) pt.sample_dump = p.string("sample_dump", "");
        p.reject_unknown();
        cfg.validate.points.push_back(pt);
      }
    }
  });

  with_section(root, "output", [&](Section& s) {
    if (s.has("path")) cfg.output.path = s.string("path", "");
    if (s.has("format")) cfg.output.format = format_from_string(s.string("format", ""));
  });

  root.reject_unknown();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["scenario"] = to_string(cfg.scenario);
  j["seed"] = cfg.seed;
  j["traffic"] = {{"lambda", cfg.traffic.lambda},
                  {"packet_bits", cfg.traffic.packet_bits},
                  {"d_max", cfg.traffic.d_max},
                  {"epsilon0", cfg.traffic.epsilon0},
                  {"rho_hat", cfg.traffic.rho_hat}};
  json modes = json::array();
  for (const auto& m : cfg.modulation.modes) modes.push_back(mode_to_json(m));
  j["modulation"] = {{"p_obj", cfg.modulation.p_obj},
                     {"symbol_rate", cfg.modulation.symbol_rate},
                     {"modes", modes}};
  j["link"] = {{"n_t", cfg.link.n_t},
               {"sigma2", cfg.link.sigma2},
               {"codebook", to_string(cfg.link.codebook)},
               {"explicit_max_bits", cfg.link.explicit_max_bits}};
  if (cfg.link.codebook_file) j["link"]["codebook_file"] = *cfg.link.codebook_file;
  j["cost"] = {{"phi", cfg.cost.phi}, {"psi", cfg.cost.psi}};
  j["bounds"] = {{"p_max", cfg.bounds.p_max}, {"b_max", cfg.bounds.b_max}, {"p_min", cfg.bounds.p_min}};
  j["queue"] = {{"slot", cfg.queue.slot},
                {"horizon", cfg.queue.horizon},
                {"b", cfg.queue.b},
                {"gamma", number_to_json(cfg.queue.gamma)},
                {"estimator", to_string(cfg.queue.estimator)}};
  if (cfg.queue.forced_mode) j["queue"]["forced_mode"] = *cfg.queue.forced_mode;
  json regimes = json::array();
  for (auto r : cfg.sweep.regime) regimes.push_back(to_string(r));
  j["sweep"] = {{"lambda", cfg.sweep.lambda},
                {"d_max", cfg.sweep.d_max},
                {"xi", cfg.sweep.xi},
                {"regime", regimes}};
  json points = json::array();
  for (const auto& p : cfg.validate.points) {
    json pj = {{"regime", to_string(p.regime)}, {"b", p.b}, {"gamma", number_to_json(p.gamma)}};
    if (p.model_b) pj["model_b"] = *p.model_b;
    if (p.threshold) pj["threshold"] = *p.threshold;
    if (p.sample_dump) pj["sample_dump"] = *p.sample_dump;
    points.push_back(pj);
  }
  j["validate"] = {{"trials", cfg.validate.trials}, {"threshold", cfg.validate.threshold}, {"points", points}};
  j["output"] = {{"format", to_string(cfg.output.format)}};
  if (cfg.output.path) j["output"]["path"] = *cfg.output.path;
  return j;
}

void RunConfig::check() const {
  try {
    traffic.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("traffic." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  (void)modulation.build();
  if (link.n_t < 2) throw ValidationError("link.n_t", "must be >= 2");
  if (!(link.sigma2 >= 0.0) || !std::isfinite(link.sigma2)) {
    throw ValidationError("link.sigma2", "must be finite and >= 0");
  }
  cost.validate();
  bounds.validate();
  if (!(queue.slot > 0.0)) throw ValidationError("queue.slot", "must be > 0");
  if (queue.horizon < 1) throw ValidationError("queue.horizon", "must be >= 1");
  if (queue.b < 0 || queue.b > 62) throw ValidationError("queue.b", "must lie in [0, 62]");
  if (!(queue.gamma > 0.0)) throw ValidationError("queue.gamma", "must be > 0");
  check_axis(sweep.lambda, "sweep.lambda");
  check_axis(sweep.d_max, "sweep.d_max");
  check_axis(sweep.xi, "sweep.xi");
  if (sweep.regime.empty()) throw ValidationError("sweep.regime", "sweep axis must be nonempty");
  for (std::size_t i = 0; i < sweep.lambda.size(); ++i) {
    if (!(sweep.lambda[i] > 0.0)) throw ValidationError("sweep.lambda[" + std::to_string(i) + "]", "must be > 0");
  }
  for (std::size_t i = 0; i < sweep.d_max.size(); ++i) {
    if (!(sweep.d_max[i] > 0.0)) throw ValidationError("sweep.d_max[" + std::to_string(i) + "]", "must be > 0");
  }
  for (std::size_t i = 0; i < sweep.xi.size(); ++i) {
    if (!(sweep.xi[i] > 0.0)) throw ValidationError("sweep.xi[" + std::to_string(i) + "]", "must be > 0");
  }
  if (validate.trials < 1) throw ValidationError("validate.trials", "must be >= 1");
  if (!(validate.threshold > 0.0 && validate.threshold < 1.0)) {
    throw ValidationError("validate.threshold", "must lie in (0, 1)");
  }
  for (std::size_t i = 0; i < validate.points.size(); ++i) {
    const auto& p = validate.points[i];
    const std::string where = "validate.points[" + std::to_string(i) + "]";
    if (p.b < 0 || p.b > 62) throw ValidationError(where + ".b", "must lie in [0, 62]");
    if (!(p.gamma > 0.0)) throw ValidationError(where + ".gamma", "must be > 0");
    if (p.model_b && !(*p.model_b >= 0.0)) throw ValidationError(where + ".model_b", "must be >= 0");
    if (p.threshold && !(*p.threshold > 0.0 && *p.threshold < 1.0)) {
      throw ValidationError(where + ".threshold", "must lie in (0, 1)");
    }
  }
}

AllocationContext RunConfig::allocation_context() const {
  AllocationContext ctx;
  ctx.n_t = link.n_t;
  ctx.sigma2 = link.sigma2;
  ctx.table = modulation.build();
  ctx.traffic = traffic;
  ctx.cost = cost;
  ctx.bounds = bounds;
  return ctx;
}

QueueSimConfig RunConfig::queue_config() const {
  QueueSimConfig q;
  q.slot = queue.slot;
  q.horizon = queue.horizon;
  q.traffic = traffic;
  q.table = modulation.build();
  q.estimator = queue.estimator;
  q.forced_mode = queue.forced_mode;
  q.link.n_t = link.n_t;
  q.link.b = queue.b;
  q.link.gamma = queue.gamma;
  q.link.seed = seed;
  q.link.codebook = link.codebook;
  q.link.explicit_max_bits = link.explicit_max_bits;
  if (link.codebook_file) q.link.fixed_codebook = Codebook::load(*link.codebook_file);
  return q;
}

}  // namespace lfmimo::cli
