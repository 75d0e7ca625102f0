#pragma once

#include <cstdint>

#include "dist.hpp"

namespace optscale::planner {

enum class AggregationMode { mean, last, min };

// Knobs of the stopping rule: the score a valid solution must reach (s_min),
// the required confidence that the best of N samples reaches it (alpha), and
// the sampling budget.
struct StoppingPolicy {
  double s_min = 0.95;
  double alpha = 0.9;
  std::uint32_t n_max = 64;
  std::uint32_t n_init = 0;  // 0 = default ceil(n_max / 3)
  std::uint32_t batch_size = 1;
  AggregationMode aggregation = AggregationMode::mean;

  std::uint32_t effective_n_init() const {
    return n_init > 0 ? n_init : (n_max + 2) / 3;
  }
};

void validate(const StoppingPolicy& policy);

struct Plan {
  std::uint32_t n_star = 1;
  double cdf_at_threshold = 0.0;  // F_S(s_min) after log-domain clamping
  double exceedance_now = 1.0;    // P(max of current-count draws >= s_min)
  bool clamped = false;
  // Ceiling of the log ratio before the [1, n_max] bound; kept as a double
  // because degenerate thresholds push it far beyond any integer budget.
  double n_star_unclamped = 1.0;
};

// P(max of n i.i.d. draws >= s) = 1 - F_S(s)^n.
double exceedance(double s, const dist::TruncNormParams& p, std::uint32_t n);

// Density of the maximum of n draws: n * F_S(s)^(n-1) * f_S(s).
double max_pdf(double s, const dist::TruncNormParams& p, std::uint32_t n);

// Minimal N with 1 - F_S(s_min)^N >= alpha, computed in closed form as
// ceil(log(1-alpha) / log F) with F clamped into [1e-12, 1-1e-12], then
// bounded into [1, n_max]. current_n sets the count used for exceedance_now;
// 0 means "use n_star". Exact ceiling on the floating ratio; ratios within
// 1e-9 of an integer may round up, which only over-samples.
Plan optimal_n(const dist::TruncNormParams& p, const StoppingPolicy& policy,
               std::uint32_t current_n = 0);

}  // namespace optscale::planner
