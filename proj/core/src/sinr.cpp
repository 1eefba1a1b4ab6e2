#include "lfmimo/sinr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lfmimo/error.hpp"

namespace lfmimo {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::general: return "general";
    case Regime::interference_limited: return "interference_limited";
    case Regime::noise_limited: return "noise_limited";
  }
  return "general";
}

Regime regime_from_string(std::string_view s) {
  if (s == "general") return Regime::general;
  if (s == "interference_limited") return Regime::interference_limited;
  if (s == "noise_limited") return Regime::noise_limited;
  throw ValidationError("regime", "unknown regime '" + std::string(s) + "'");
}

SinrModelParams SinrModelParams::from_gamma(int n_t, double b, double gamma) {
  return {n_t, b, gamma * n_t, 1.0};
}

double SinrModelParams::theta() const { return std::exp2(-b / (n_t - 1)); }

void SinrModelParams::validate() const {
  if (n_t < 2) throw ValidationError("n_t", "must be >= 2");
  if (!(b >= 0.0)) throw ValidationError("b", "must be >= 0");
  if (!(p > 0.0)) throw ValidationError("p", "must be > 0");
  if (!(sigma2 >= 0.0)) throw ValidationError("sigma2", "must be >= 0");
}

namespace {

// exp(-x/gamma); with gamma = inf (sigma2 = 0) the noise term vanishes.
double noise_survival(const SinrModelParams& params, double x) {
  const double gamma = params.gamma();
  if (std::isinf(gamma)) return 1.0;
  return std::exp(-x / gamma);
}

double interference_survival(const SinrModelParams& params, double x) {
  return std::pow(1.0 + params.theta() * x, -(params.n_t - 1));
}

}  // namespace

double survival(const SinrModelParams& params, double x, Regime regime) {
  if (std::isinf(x)) return 0.0;
  switch (regime) {
    case Regime::general:
      return noise_survival(params, x) * interference_survival(params, x);
    case Regime::interference_limited:
      return interference_survival(params, x);
    case Regime::noise_limited:
      return noise_survival(params, x);
  }
  return 0.0;
}

double cdf(const SinrModelParams& params, double x, Regime regime) {
  return 1.0 - survival(params, x, regime);
}

double cdf_limited_feedback(const SinrModelParams& params, double x) {
  return cdf(params, x, Regime::general);
}

double cdf_interference_limited(const SinrModelParams& params, double x) {
  return cdf(params, x, Regime::interference_limited);
}

double cdf_noise_limited(const SinrModelParams& params, double x) {
  return cdf(params, x, Regime::noise_limited);
}

std::vector<double> level_violations(const ModulationTable& table, const TrafficSpec& spec) {
  std::vector<double> pd(table.level_count());
  for (std::size_t n = 0; n < pd.size(); ++n) {
    pd[n] = violation_probability(spec, serve_rate(table, n));
  }
  return pd;
}

double avg_violation(const SinrModelParams& params, const ModulationTable& table,
                     std::span<const double> level_violation, Regime regime) {
  if (level_violation.size() != table.level_count()) {
    throw std::invalid_argument("avg_violation: one violation value per serve level expected");
  }
  const auto th = table.thresholds();
  double total = 0.0;
  double upper = survival(params, th[0], regime);
  for (std::size_t n = 0; n < level_violation.size(); ++n) {
    const double lower = survival(params, th[n + 1], regime);
    total += level_violation[n] * (upper - lower);
    upper = lower;
  }
  return total;
}

double avg_violation(const SinrModelParams& params, const ModulationTable& table,
                     const TrafficSpec& spec, Regime regime) {
  return avg_violation(params, table, level_violations(table, spec), regime);
}

}  // namespace lfmimo
