#pragma once

// Effective-bandwidth model of a Poisson source with fixed-size packets and
// the large-deviation estimate of its delay-violation probability.
//
// Rates are bits/second throughout; the space variable s is per bit.

#include <cstdint>

namespace lfmimo {

struct TrafficSpec {
  double lambda = 300.0;          // packets/s
  std::int64_t packet_bits = 1080;
  double d_max = 0.002;           // s
  double epsilon0 = 0.01;         // target violation probability
  double rho_hat = 1.0;           // probability the buffer is nonempty

  /// Mean offered load lambda * N_b in bits/s.
  double mean_load() const { return lambda * static_cast<double>(packet_bits); }

  /// Throws ValidationError (field paths relative to "traffic").
  void validate() const;
};

struct QosExponentResult {
  double s_star = 0.0;  // 1/bits
  bool stable = false;  // c > lambda * N_b
};

/// alpha(s) = (lambda / s) (exp(s N_b) - 1). Throws std::domain_error for
/// s <= 0 or when s N_b overflows the exponent range.
double effective_bandwidth(const TrafficSpec& spec, double s);

/// Largest s >= 0 with alpha(s) <= c. Zero (and unstable) for c <= lambda N_b.
QosExponentResult qos_exponent(const TrafficSpec& spec, double c);

/// rho_hat * exp(-delta(c) c D_max), equal to rho_hat on the unstable region.
double violation_probability(const TrafficSpec& spec, double c);

/// Serve rate at which the violation probability equals epsilon0.
double min_serve_rate(const TrafficSpec& spec);

/// Closed-form high-load approximation
/// N_b lambda - N_b (ln epsilon0 - ln rho_hat) / (2 D_max).
double theorem1_approx(const TrafficSpec& spec);

}  // namespace lfmimo
