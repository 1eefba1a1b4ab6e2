#include "lfmimo/traffic.hpp"

#include <cmath>
#include <stdexcept>

#include "lfmimo/error.hpp"
#include "lfmimo/numeric.hpp"

namespace lfmimo {
namespace {

constexpr double kSeriesCutoff = 1e-6;
// exp() overflows double just above 709.78.
constexpr double kMaxExponent = 709.0;
constexpr double kExponentRelTol = 1e-10;
constexpr double kRateRelTol = 1e-8;

// (e^x - 1) / x, continuous at 0.
double expm1_over_x(double x) {
  if (x < kSeriesCutoff) return 1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0;
  return std::expm1(x) / x;
}

}  // namespace

void TrafficSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda", "must be > 0");
  if (packet_bits <= 0) throw ValidationError("packet_bits", "must be a positive integer");
  if (!(d_max > 0.0) || !std::isfinite(d_max)) throw ValidationError("d_max", "must be > 0");
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw ValidationError("epsilon0", "must lie in (0, 1)");
  if (!(rho_hat > 0.0 && rho_hat <= 1.0)) throw ValidationError("rho_hat", "must lie in (0, 1]");
  if (!(epsilon0 < rho_hat)) {
    throw ValidationError("epsilon0", "must be below rho_hat, otherwise zero rate already meets it");
  }
}

double effective_bandwidth(const TrafficSpec& spec, double s) {
  if (!(s > 0.0)) throw std::domain_error("effective_bandwidth: s must be > 0");
  const double nb = static_cast<double>(spec.packet_bits);
  const double x = s * nb;
  if (x > kMaxExponent) throw std::domain_error("effective_bandwidth: s * N_b overflows exp()");
  return spec.lambda * nb * expm1_over_x(x);
}

QosExponentResult qos_exponent(const TrafficSpec& spec, double c) {
  if (c < 0.0) throw std::domain_error("qos_exponent: serve rate must be >= 0");
  const double load = spec.mean_load();
  if (!(c > load)) return {0.0, false};

  // Work in x = s N_b where alpha = load * (e^x - 1) / x.
  const double ratio = c / load;
  double x_hi = 1.0;
  while (expm1_over_x(x_hi) < ratio) {
    x_hi *= 2.0;
    if (x_hi > kMaxExponent) {
      x_hi = kMaxExponent;
      if (expm1_over_x(x_hi) < ratio) {
        throw std::domain_error("qos_exponent: serve rate beyond representable range");
      }
      break;
    }
  }
  const auto br = numeric::bisect([&](double x) { return expm1_over_x(x) >= ratio; }, 0.0, x_hi,
                                  kExponentRelTol * 1e-3);
  const double x = 0.5 * (br.lo + br.hi);
  return {x / static_cast<double>(spec.packet_bits), true};
}

double violation_probability(const TrafficSpec& spec, double c) {
  const auto q = qos_exponent(spec, c);
  if (!q.stable) return spec.rho_hat;
  return std::min(spec.rho_hat, spec.rho_hat * std::exp(-q.s_star * c * spec.d_max));
}

double min_serve_rate(const TrafficSpec& spec) {
  spec.validate();
  const double load = spec.mean_load();
  const auto meets = [&](double c) { return violation_probability(spec, c) <= spec.epsilon0; };

  double hi = 2.0 * load;
  for (int i = 0; !meets(hi); ++i) {
    if (i >= numeric::kDefaultMaxIterations) {
      throw ConvergenceError("min_serve_rate: could not bracket the target rate");
    }
    hi *= 2.0;
  }
  const auto br = numeric::bisect(meets, load, hi, kRateRelTol * 1e-2);
  return br.hi;
}

double theorem1_approx(const TrafficSpec& spec) {
  const double nb = static_cast<double>(spec.packet_bits);
  return nb * spec.lambda -
         nb * (std::log(spec.epsilon0) - std::log(spec.rho_hat)) / (2.0 * spec.d_max);
}

}  // namespace lfmimo
