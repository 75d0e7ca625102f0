#pragma once

#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace optscale::dist {

// Parameter box for the score distribution. Scores live in [0,1]; a location
// slightly outside the support is legitimate under truncation, unbounded
// values are not identifiable.
inline constexpr double kSigmaFloor = 1e-3;
inline constexpr double kSigmaCeil = 1.0;
inline constexpr double kMuLo = -0.5;
inline constexpr double kMuHi = 1.5;

// Normalizers below this are declared degenerate rather than renormalized.
inline constexpr double kNormalizerMin = 1e-300;

// Location/scale of a normal truncated to [0,1].
struct TruncNormParams {
  double mu = 0.5;
  double sigma = 0.2;
};

// Throws Error(param) when mu or sigma is outside the box.
void validate(const TruncNormParams& p);

// Standard normal CDF, abs error <= 1e-10 over |x| <= 8; exact {0,1} beyond
// |x| > 38. Throws Error(domain) on non-finite input.
double std_normal_cdf(double x);

double std_normal_pdf(double x);

// Normalizer Z = Phi((1-mu)/sigma) - Phi((0-mu)/sigma).
// Throws Error(degenerate) when Z underflows below kNormalizerMin.
double normalizer(const TruncNormParams& p);

// Density on [0,1]; zero outside the support.
double truncnorm_pdf(double s, const TruncNormParams& p);

// CDF: 0 for s <= 0, 1 for s >= 1, monotone nondecreasing.
double truncnorm_cdf(double s, const TruncNormParams& p);

// Quantile by bisection on truncnorm_cdf; interval width tolerance 1e-12.
double truncnorm_quantile(double u, const TruncNormParams& p);

// n i.i.d. draws via inverse-CDF bisection; deterministic given the stream.
std::vector<double> truncnorm_sample(const TruncNormParams& p, Rng& rng,
                                     std::size_t n);

// Sum of log densities. Empty data returns 0; a zero density anywhere yields
// -infinity. Throws Error(data) when a score is outside [0,1].
double log_likelihood(const std::vector<double>& data,
                      const TruncNormParams& p);

}  // namespace optscale::dist
