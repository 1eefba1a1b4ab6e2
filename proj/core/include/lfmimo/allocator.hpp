#pragma once

// Cost-minimal joint transmit-power / feedback-bit allocation under an
// average delay-violation constraint:
//
//   min  phi P + psi N_t B
//   s.t. avg_violation(P, B) <= epsilon0,  P <= P_0,  B <= B_0,  B integer.
//
// The violation probability is monotone in P at fixed B, so for each B the
// cheapest feasible power is the root of avg_violation(P, B) = epsilon0.
// That collapses the relaxed problem to a line search along P(B).

#include <optional>
#include <string_view>
#include <vector>

#include "lfmimo/amc.hpp"
#include "lfmimo/sinr.hpp"
#include "lfmimo/traffic.hpp"

namespace lfmimo {

struct CostModel {
  double phi = 1.0;   // per watt
  double psi = 80.0;  // per feedback bit

  /// Relative cost factor psi / phi.
  double xi() const { return psi / phi; }
  static CostModel from_xi(double xi, double phi = 1.0) { return {phi, xi * phi}; }
  void validate() const;
};

struct ResourceBounds {
  double p_max = 1e4;  // P_0, watts (40 dB)
  int b_max = 10;      // B_0, bits
  double p_min = 1.0;  // sustaining power used by the interference-limited allocator
  void validate() const;
};

enum class Method { proposed, exhaustive, j2, j3 };
std::string_view to_string(Method m);

struct AllocationResult {
  double p = 0.0;
  int b = 0;
  double cost = 0.0;
  double achieved_violation = 0.0;
  Method method = Method::proposed;
};

struct RelaxedSolution {
  double p = 0.0;
  double b = 0.0;
  double cost = 0.0;
};

struct AllocationContext {
  int n_t = 4;
  double sigma2 = 1.0;
  ModulationTable table = default_table();
  TrafficSpec traffic;
  CostModel cost;
  ResourceBounds bounds;
  Regime regime = Regime::general;

  void validate() const;
};

class JointAllocator {
public:
  /// Validates `ctx` and caches the per-level violation probabilities.
  explicit JointAllocator(AllocationContext ctx);

  const AllocationContext& context() const { return ctx_; }
  std::span<const double> level_violation() const { return level_violation_; }

  double violation(double p, double b) const;
  double violation(double p, double b, Regime regime) const;
  double cost(double p, double b) const;

  /// Cheapest power meeting epsilon0 at feedback `b`, or nullopt when even
  /// p_max falls short.
  std::optional<double> power_for_feedback(double b) const;

  /// Relaxed (real-valued B) minimum of h(b) = phi P(b) + psi N_t b.
  RelaxedSolution solve_relaxed() const;

  AllocationResult allocate_proposed() const;
  AllocationResult allocate_exhaustive() const;
  AllocationResult allocate_interference_limited() const;
  AllocationResult allocate_noise_limited() const;

private:
  std::optional<double> power_for(double b, Regime regime) const;
  AllocationResult make_result(double p, int b, Method method, Regime regime) const;

  AllocationContext ctx_;
  std::vector<double> level_violation_;
};

}  // namespace lfmimo
