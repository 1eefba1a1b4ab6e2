#include "lfmimo/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lfmimo/error.hpp"
#include "lfmimo/numeric.hpp"

namespace lfmimo {
namespace {

constexpr double kPowerRelTol = 1e-8;
// Lowest power probed, relative to p_max.
constexpr double kPowerFloorRatio = 1e-15;
constexpr double kScanStep = 0.25;
constexpr double kRelaxedTol = 1e-4;
constexpr double kFeedbackTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void CostModel::validate() const {
  if (!(phi > 0.0)) throw ValidationError("cost.phi", "must be > 0");
  if (!(psi > 0.0)) throw ValidationError("cost.psi", "must be > 0");
}

void ResourceBounds::validate() const {
  if (!(p_min >= 0.0)) throw ValidationError("bounds.p_min", "must be >= 0");
  if (!(p_max > p_min) || !std::isfinite(p_max)) {
    throw ValidationError("bounds.p_max", "must be finite and exceed p_min");
  }
  if (b_max < 0) throw ValidationError("bounds.b_max", "must be >= 0");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::exhaustive: return "exhaustive";
    case Method::j2: return "j2";
    case Method::j3: return "j3";
  }
  return "proposed";
}

void AllocationContext::validate() const {
  if (n_t < 2) throw ValidationError("link.n_t", "must be >= 2");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("link.sigma2", "must be finite and >= 0");
  }
  try {
    traffic.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("traffic." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  cost.validate();
  bounds.validate();
  if (table.level_count() < 2) throw ValidationError("modulation", "table not built");
}

JointAllocator::JointAllocator(AllocationContext ctx) : ctx_(std::move(ctx)) {
  ctx_.validate();
  level_violation_ = level_violations(ctx_.table, ctx_.traffic);
}

double JointAllocator::violation(double p, double b, Regime regime) const {
  const SinrModelParams params{ctx_.n_t, b, p, ctx_.sigma2};
  return avg_violation(params, ctx_.table, level_violation_, regime);
}

double JointAllocator::violation(double p, double b) const { return violation(p, b, ctx_.regime); }

double JointAllocator::cost(double p, double b) const {
  return ctx_.cost.phi * p + ctx_.cost.psi * ctx_.n_t * b;
}

std::optional<double> JointAllocator::power_for(double b, Regime regime) const {
  const double eps = ctx_.traffic.epsilon0;
  const double p_max = ctx_.bounds.p_max;
  const auto meets = [&](double p) { return violation(p, b, regime) <= eps; };
  if (!meets(p_max)) return std::nullopt;
  const double p_floor = p_max * kPowerFloorRatio;
  // Flat in P (noiseless link or interference-limited model): any power works.
  if (meets(p_floor)) return p_floor;
  return numeric::bisect_log(meets, p_floor, p_max, kPowerRelTol * 1e-2).hi;
}

std::optional<double> JointAllocator::power_for_feedback(double b) const {
  return power_for(b, ctx_.regime);
}

RelaxedSolution JointAllocator::solve_relaxed() const {
  const double b_max = ctx_.bounds.b_max;
  const auto h = [&](double b) {
    const auto p = power_for_feedback(b);
    return p ? cost(*p, b) : kInf;
  };
  if (!power_for_feedback(b_max)) {
    throw InfeasibleError("violation target unreachable at (p_max, b_max)");
  }

  // Coarse scan brackets the global minimum; golden section refines it.
  const int steps = static_cast<int>(std::ceil(b_max / kScanStep));
  std::vector<double> grid;
  grid.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) grid.push_back(std::min(i * kScanStep, b_max));
  std::size_t best = 0;
  double best_h = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = h(grid[i]);
    if (v < best_h) {
      best_h = v;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];

  double b_dag = grid[best];
  double h_dag = best_h;
  if (hi > lo) {
    const auto m = numeric::golden_section(h, lo, hi, kRelaxedTol);
    // Endpoints are checked too, so corner optima (b = 0 or b_max) come out exact.
    for (const auto& [x, v] : {std::pair{lo, h(lo)}, std::pair{m.x, m.value}, std::pair{hi, h(hi)}}) {
      if (v < h_dag || (v == h_dag && x < b_dag)) {
        b_dag = x;
        h_dag = v;
      }
    }
  }
  const double p_dag = *power_for_feedback(b_dag);
  return {p_dag, b_dag, h_dag};
}

AllocationResult JointAllocator::make_result(double p, int b, Method method, Regime regime) const {
  return {p, b, cost(p, b), violation(p, b, regime), method};
}

AllocationResult JointAllocator::allocate_proposed() const {
  const auto relaxed = solve_relaxed();
  const double b_floor = std::floor(relaxed.b);
  if (relaxed.b == b_floor) {
    const int b = static_cast<int>(b_floor);
    return make_result(*power_for_feedback(b), b, Method::proposed, ctx_.regime);
  }
  const int b_f = static_cast<int>(b_floor);
  const int b_c = b_f + 1;
  const auto p_f = power_for_feedback(b_f);
  const auto p_c = power_for_feedback(b_c);
  if (!p_f && !p_c) throw InfeasibleError("neither rounded feedback size is feasible");
  if (!p_f) return make_result(*p_c, b_c, Method::proposed, ctx_.regime);
  if (!p_c) return make_result(*p_f, b_f, Method::proposed, ctx_.regime);
  if (cost(*p_c, b_c) < cost(*p_f, b_f)) {
    return make_result(*p_c, b_c, Method::proposed, ctx_.regime);
  }
  return make_result(*p_f, b_f, Method::proposed, ctx_.regime);
}

AllocationResult JointAllocator::allocate_exhaustive() const {
  std::optional<AllocationResult> best;
  for (int b = 0; b <= ctx_.bounds.b_max; ++b) {
    const auto p = power_for_feedback(b);
    if (!p) continue;
    if (!best || cost(*p, b) < best->cost) {
      best = make_result(*p, b, Method::exhaustive, ctx_.regime);
    }
  }
  if (!best) throw InfeasibleError("no feedback size in [0, b_max] meets the violation target");
  return *best;
}

AllocationResult JointAllocator::allocate_interference_limited() const {
  const double eps = ctx_.traffic.epsilon0;
  const double p = ctx_.bounds.p_min;
  const auto meets = [&](double b) {
    return violation(1.0, b, Regime::interference_limited) <= eps;
  };
  const int b_max = ctx_.bounds.b_max;
  if (!meets(b_max)) throw InfeasibleError("interference-limited target unreachable at b_max");
  double b_dag = 0.0;
  if (!meets(0.0)) b_dag = numeric::bisect(meets, 0.0, b_max, 0.0, kFeedbackTol).hi;
  int b = static_cast<int>(std::ceil(b_dag));
  // The bracket end may overshoot an exactly-integral root by one ulp.
  if (b > 0 && meets(b - 1)) --b;
  return make_result(p, b, Method::j2, Regime::interference_limited);
}

AllocationResult JointAllocator::allocate_noise_limited() const {
  const auto p = power_for(0.0, Regime::noise_limited);
  if (!p) throw InfeasibleError("noise-limited target unreachable at p_max");
  return make_result(*p, 0, Method::j3, Regime::noise_limited);
}

}  // namespace lfmimo
