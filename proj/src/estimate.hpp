#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dist.hpp"

namespace optscale::estimate {

// Gaussian prior beliefs over (mu, sigma): centers and widths.
struct PriorBelief {
  double mu_bar = 0.5;
  double sigma_mu = 0.1;
  double sigma_bar = 0.2;
  double sigma_sigma = 0.05;
};

// Default prior widths when a calibration source omits them.
inline constexpr double kDefaultSigmaMu = 0.1;
inline constexpr double kDefaultSigmaSigma = 0.05;

void validate(const PriorBelief& prior);

struct FitResult {
  dist::TruncNormParams params;
  double objective = 0.0;  // final log-likelihood or log-posterior
  std::uint32_t iterations = 0;
  bool converged = false;
};

// Single distinct observations widen sigma up to this value so the first
// plan is not driven by a spuriously tight fit.
inline constexpr double kSigmaMinInit = 0.05;

// mu0 = arithmetic mean, sigma0 = population standard deviation, floored at
// kSigmaFloor and raised to kSigmaMinInit when the data has fewer than two
// distinct values. Throws Error(data) on empty data.
dist::TruncNormParams moment_init(const std::vector<double>& data);

// Maximum-likelihood fit over the bounded parameter box: 32x32 coarse grid
// seeded with init, then derivative-free simplex refinement. Deterministic.
FitResult mle_fit(const std::vector<double>& data,
                  const dist::TruncNormParams& init);

// Maximum-a-posteriori fit: the MLE objective plus Gaussian log-prior terms
// -(mu-mu_bar)^2/(2 sigma_mu^2) and -(sigma-sigma_bar)^2/(2 sigma_sigma^2).
// Empty data returns the prior mode exactly. init defaults to the prior mode.
FitResult map_fit(const std::vector<double>& data, const PriorBelief& prior,
                  std::optional<dist::TruncNormParams> init = std::nullopt);

}  // namespace optscale::estimate
