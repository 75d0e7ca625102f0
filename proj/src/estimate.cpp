#include "estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace optscale::estimate {

namespace {

constexpr int kGridSide = 32;
constexpr std::uint32_t kMaxIterations = 200;
constexpr double kImprovementTol = 1e-8;

using Objective = std::function<double(double mu, double sigma)>;

double clamp_mu(double mu) { return std::clamp(mu, dist::kMuLo, dist::kMuHi); }
double clamp_sigma(double sigma) {
  return std::clamp(sigma, dist::kSigmaFloor, dist::kSigmaCeil);
}

struct Point {
  double mu, sigma, value;
};

double safe_eval(const Objective& f, double mu, double sigma) {
  try {
    return f(mu, sigma);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::degenerate) {
      return -std::numeric_limits<double>::infinity();
    }
    throw;
  }
}

// Maximize f over the parameter box: coarse grid seeded with init, then a
// clamped Nelder-Mead simplex from the best grid point.
FitResult maximize(const Objective& f, const dist::TruncNormParams& init) {
  auto eval = [&](double mu, double sigma) -> Point {
    mu = clamp_mu(mu);
    sigma = clamp_sigma(sigma);
    return {mu, sigma, safe_eval(f, mu, sigma)};
  };

  Point best = eval(init.mu, init.sigma);
  for (int i = 0; i < kGridSide; ++i) {
    const double mu = dist::kMuLo + (dist::kMuHi - dist::kMuLo) *
                                        (i + 0.5) / kGridSide;
    for (int j = 0; j < kGridSide; ++j) {
      const double sigma =
          dist::kSigmaFloor +
          (dist::kSigmaCeil - dist::kSigmaFloor) * (j + 0.5) / kGridSide;
      const Point cand = eval(mu, sigma);
      if (cand.value > best.value) best = cand;
    }
  }

  std::array<Point, 3> simplex = {
      best,
      eval(best.mu + 0.05, best.sigma),
      eval(best.mu, best.sigma + 0.05),
  };

  FitResult result;
  bool converged = false;
  std::uint32_t iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Point& a, const Point& b) { return a.value > b.value; });
    if (std::isfinite(simplex[0].value) &&
        simplex[0].value - simplex[2].value < kImprovementTol) {
      converged = true;
      break;
    }

    const double cx = 0.5 * (simplex[0].mu + simplex[1].mu);
    const double cy = 0.5 * (simplex[0].sigma + simplex[1].sigma);
    const Point& worst = simplex[2];

    Point refl = eval(cx + (cx - worst.mu), cy + (cy - worst.sigma));
    if (refl.value > simplex[0].value) {
      Point expd = eval(cx + 2.0 * (cx - worst.mu), cy + 2.0 * (cy - worst.sigma));
      simplex[2] = expd.value > refl.value ? expd : refl;
    } else if (refl.value > simplex[1].value) {
      simplex[2] = refl;
    } else {
      Point contr = eval(cx + 0.5 * (worst.mu - cx), cy + 0.5 * (worst.sigma - cy));
      if (contr.value > worst.value) {
        simplex[2] = contr;
      } else {
        // shrink toward the best vertex
        for (int k = 1; k < 3; ++k) {
          simplex[k] = eval(0.5 * (simplex[0].mu + simplex[k].mu),
                            0.5 * (simplex[0].sigma + simplex[k].sigma));
        }
      }
    }
  }

  for (const Point& pt : simplex) {
    if (pt.value > best.value) best = pt;
  }
  result.params = {best.mu, best.sigma};
  result.objective = best.value;
  result.iterations = iter;
  result.converged = converged;
  return result;
}

}  // namespace

void validate(const PriorBelief& prior) {
  if (!(prior.sigma_mu > 0.0) || !(prior.sigma_sigma > 0.0)) {
    fail(ErrorKind::param, "prior widths must be positive");
  }
  if (prior.sigma_bar < dist::kSigmaFloor || prior.sigma_bar > dist::kSigmaCeil) {
    fail(ErrorKind::param, "prior sigma center outside the sigma box");
  }
  if (!std::isfinite(prior.mu_bar)) {
    fail(ErrorKind::param, "prior mu center must be finite");
  }
}

dist::TruncNormParams moment_init(const std::vector<double>& data) {
  if (data.empty()) fail(ErrorKind::data, "moment_init: empty data");
  double mean = 0.0;
  for (double s : data) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorKind::data, "moment_init: score outside [0,1]");
    }
    mean += s;
  }
  mean /= static_cast<double>(data.size());

  double var = 0.0;
  bool all_equal = true;
  for (double s : data) {
    var += (s - mean) * (s - mean);
    all_equal = all_equal && s == data.front();
  }
  var /= static_cast<double>(data.size());

  double sigma = std::max(std::sqrt(var), dist::kSigmaFloor);
  if (all_equal) sigma = std::max(sigma, kSigmaMinInit);
  return {clamp_mu(mean), clamp_sigma(sigma)};
}

FitResult mle_fit(const std::vector<double>& data,
                  const dist::TruncNormParams& init) {
  if (data.empty()) fail(ErrorKind::data, "mle_fit: empty data");
  for (double s : data) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorKind::data, "mle_fit: score outside [0,1]");
    }
  }
  return maximize(
      [&](double mu, double sigma) {
        return dist::log_likelihood(data, {mu, sigma});
      },
      init);
}

FitResult map_fit(const std::vector<double>& data, const PriorBelief& prior,
                  std::optional<dist::TruncNormParams> init) {
  validate(prior);
  for (double s : data) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorKind::data, "map_fit: score outside [0,1]");
    }
  }

  auto objective = [&](double mu, double sigma) {
    const double prior_mu = -(mu - prior.mu_bar) * (mu - prior.mu_bar) /
                            (2.0 * prior.sigma_mu * prior.sigma_mu);
    const double prior_sigma =
        -(sigma - prior.sigma_bar) * (sigma - prior.sigma_bar) /
        (2.0 * prior.sigma_sigma * prior.sigma_sigma);
    return dist::log_likelihood(data, {mu, sigma}) + prior_mu + prior_sigma;
  };

  if (data.empty()) {
    // Posterior mode is the prior mode with no observations.
    FitResult result;
    result.params = {clamp_mu(prior.mu_bar), clamp_sigma(prior.sigma_bar)};
    result.objective = safe_eval(objective, result.params.mu,
                                 result.params.sigma);
    result.converged = true;
    return result;
  }

  const dist::TruncNormParams start =
      init.value_or(dist::TruncNormParams{clamp_mu(prior.mu_bar),
                                          clamp_sigma(prior.sigma_bar)});
  return maximize(objective, start);
}

}  // namespace optscale::estimate
