#include "dist.hpp"

#include <cmath>
#include <limits>

namespace optscale::dist {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
}  // namespace

void validate(const TruncNormParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma)) {
    fail(ErrorKind::param, "truncated-normal parameters must be finite");
  }
  if (p.sigma < kSigmaFloor || p.sigma > kSigmaCeil) {
    fail(ErrorKind::param, "sigma outside [" + std::to_string(kSigmaFloor) +
                               ", " + std::to_string(kSigmaCeil) + "]");
  }
  if (p.mu < kMuLo || p.mu > kMuHi) {
    fail(ErrorKind::param, "mu outside [" + std::to_string(kMuLo) + ", " +
                               std::to_string(kMuHi) + "]");
  }
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) {
    fail(ErrorKind::domain, "std_normal_cdf: non-finite input");
  }
  if (x > 38.0) return 1.0;
  if (x < -38.0) return 0.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normalizer(const TruncNormParams& p) {
  validate(p);
  const double z =
      std_normal_cdf((1.0 - p.mu) / p.sigma) - std_normal_cdf(-p.mu / p.sigma);
  if (!(z > kNormalizerMin)) {
    fail(ErrorKind::degenerate,
         "truncated-normal normalizer underflow (mu far outside support)");
  }
  return z;
}

double truncnorm_pdf(double s, const TruncNormParams& p) {
  const double z = normalizer(p);
  if (s < 0.0 || s > 1.0) return 0.0;
  return std_normal_pdf((s - p.mu) / p.sigma) / (p.sigma * z);
}

double truncnorm_cdf(double s, const TruncNormParams& p) {
  const double z = normalizer(p);
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double lo = std_normal_cdf(-p.mu / p.sigma);
  const double v = (std_normal_cdf((s - p.mu) / p.sigma) - lo) / z;
  return std::min(1.0, std::max(0.0, v));
}

double truncnorm_quantile(double u, const TruncNormParams& p) {
  normalizer(p);  // parameter + degeneracy check up front
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (truncnorm_cdf(mid, p) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> truncnorm_sample(const TruncNormParams& p, Rng& rng,
                                     std::size_t n) {
  if (n < 1) fail(ErrorKind::domain, "truncnorm_sample: n must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(truncnorm_quantile(rng.next_double(), p));
  }
  return out;
}

double log_likelihood(const std::vector<double>& data,
                      const TruncNormParams& p) {
  const double z = normalizer(p);
  const double log_norm = std::log(p.sigma * z);
  double total = 0.0;
  for (double s : data) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorKind::data, "log_likelihood: score outside [0,1]");
    }
    const double x = (s - p.mu) / p.sigma;
    const double log_pdf = -0.5 * x * x + std::log(kInvSqrt2Pi) - log_norm;
    if (!std::isfinite(log_pdf)) {
      return -std::numeric_limits<double>::infinity();
    }
    total += log_pdf;
  }
  return total;
}

}  // namespace optscale::dist
