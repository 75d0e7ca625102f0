#include "planner.hpp"

#include <algorithm>
#include <cmath>

namespace optscale::planner {

namespace {
constexpr double kLogClamp = 1e-12;
}

void validate(const StoppingPolicy& policy) {
  if (!(policy.s_min > 0.0 && policy.s_min < 1.0)) {
    fail(ErrorKind::param, "s_min must lie in (0,1)");
  }
  if (!(policy.alpha > 0.0 && policy.alpha < 1.0)) {
    fail(ErrorKind::param, "alpha must lie in (0,1)");
  }
  if (policy.n_max < 1) fail(ErrorKind::param, "n_max must be >= 1");
  if (policy.effective_n_init() > policy.n_max) {
    fail(ErrorKind::param, "n_init must be <= n_max");
  }
  if (policy.batch_size < 1) fail(ErrorKind::param, "batch_size must be >= 1");
}

double exceedance(double s, const dist::TruncNormParams& p, std::uint32_t n) {
  if (n < 1) fail(ErrorKind::domain, "exceedance: n must be >= 1");
  const double f = dist::truncnorm_cdf(s, p);
  return 1.0 - std::pow(f, static_cast<double>(n));
}

double max_pdf(double s, const dist::TruncNormParams& p, std::uint32_t n) {
  if (n < 1) fail(ErrorKind::domain, "max_pdf: n must be >= 1");
  const double f = dist::truncnorm_cdf(s, p);
  return static_cast<double>(n) * std::pow(f, static_cast<double>(n - 1)) *
         dist::truncnorm_pdf(s, p);
}

Plan optimal_n(const dist::TruncNormParams& p, const StoppingPolicy& policy,
               std::uint32_t current_n) {
  validate(policy);
  const double f_raw = dist::truncnorm_cdf(policy.s_min, p);
  const double f = std::clamp(f_raw, kLogClamp, 1.0 - kLogClamp);

  const double ratio = std::log(1.0 - policy.alpha) / std::log(f);
  const double raw = std::ceil(ratio);

  Plan plan;
  plan.cdf_at_threshold = f;
  plan.n_star_unclamped = raw;
  double bounded = std::max(raw, 1.0);
  bounded = std::min(bounded, static_cast<double>(policy.n_max));
  plan.n_star = static_cast<std::uint32_t>(bounded);
  plan.clamped = bounded != raw;
  const std::uint32_t n_now = current_n > 0 ? current_n : plan.n_star;
  plan.exceedance_now = 1.0 - std::pow(f, static_cast<double>(n_now));
  return plan;
}

}  // namespace optscale::planner
