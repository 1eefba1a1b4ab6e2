#pragma once

// Analytic SINR distribution of a zero-forcing MU-MIMO downlink with B-bit
// limited feedback, and the average delay-violation probability it induces
// through adaptive modulation.

#include <span>
#include <string_view>
#include <vector>

#include "lfmimo/amc.hpp"
#include "lfmimo/traffic.hpp"

namespace lfmimo {

enum class Regime { general, interference_limited, noise_limited };

std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

struct SinrModelParams {
  int n_t = 4;          // antennas == users
  double b = 0.0;       // feedback bits per user (real in the relaxed problem)
  double p = 1.0;       // total transmit power, linear
  double sigma2 = 1.0;  // noise variance

  /// Builds params whose average SNR P / (N_t sigma^2) equals `gamma`
  /// (sigma^2 = 1). `gamma` may be +inf for a noiseless link.
  static SinrModelParams from_gamma(int n_t, double b, double gamma);

  double gamma() const { return p / (n_t * sigma2); }
  /// Quantization factor 2^{-B/(N_t-1)}.
  double theta() const;
  void validate() const;
};

/// F(x) = 1 - exp(-x/gamma) / (1 + theta x)^{N_t-1}.
double cdf_limited_feedback(const SinrModelParams& params, double x);
/// F(x) = 1 - (1 + theta x)^{-(N_t-1)}; the gamma -> inf limit.
double cdf_interference_limited(const SinrModelParams& params, double x);
/// F(x) = 1 - exp(-x/gamma); the B -> inf limit.
double cdf_noise_limited(const SinrModelParams& params, double x);

double cdf(const SinrModelParams& params, double x, Regime regime);
/// 1 - cdf, evaluated without cancellation. Zero at x = +inf.
double survival(const SinrModelParams& params, double x, Regime regime);

/// P_d(C_n) for every serve level of `table`.
std::vector<double> level_violations(const ModulationTable& table, const TrafficSpec& spec);

/// Average violation probability sum_n P_d(C_n) [F(Omega_{n+1}) - F(Omega_n)]
/// with precomputed per-level violations.
double avg_violation(const SinrModelParams& params, const ModulationTable& table,
                     std::span<const double> level_violation, Regime regime);

double avg_violation(const SinrModelParams& params, const ModulationTable& table,
                     const TrafficSpec& spec, Regime regime = Regime::general);

}  // namespace lfmimo
