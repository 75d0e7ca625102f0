// Test-only numerical oracles, independent of the library implementation:
// a series/continued-fraction normal CDF, adaptive Simpson quadrature, a
// one-sample KS statistic, and a chi-square tail probability.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kSqrtPi = 1.7724538509055160272981674833411452;

// erf via Taylor series for |x| < 2 (terms stay small, no cancellation).
inline double erf_series(double x) {
  const long double x2 = static_cast<long double>(x) * x;
  long double term = static_cast<long double>(x);
  long double sum = term;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::abs(static_cast<double>(add)) < 1e-20) break;
  }
  return static_cast<double>(sum * 2.0L / kSqrtPi);
}

// erfc via the Lentz continued fraction for x >= 2.
inline double erfc_cf(double x) {
  const double tiny = 1e-300;
  double b = x;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int n = 1; n < 300; ++n) {
    const double a = n / 2.0;
    b = x;
    d = 1.0 / (b + a * d);
    c = b + a / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) / kSqrtPi * h;
}

inline double erf_oracle(double x) {
  if (x < 0) return -erf_oracle(-x);
  if (x < 2.0) return erf_series(x);
  return 1.0 - erfc_cf(x);
}

inline double erfc_oracle(double x) {
  if (x < -2.0) return 2.0 - erfc_cf(-x);
  if (x < 2.0) return 1.0 - erf_series(x);
  return erfc_cf(x);
}

inline double phi_oracle(double x) {
  return 0.5 * erfc_oracle(-x * 0.7071067811865475244008443621048490);
}

inline double normal_pdf_oracle(double x) {
  return 0.3989422804014326779399460599343819 * std::exp(-0.5 * x * x);
}

// Truncated-normal density on [0,1] assembled only from oracle pieces.
inline double truncnorm_pdf_oracle(double s, double mu, double sigma) {
  if (s < 0.0 || s > 1.0) return 0.0;
  const double z = phi_oracle((1.0 - mu) / sigma) - phi_oracle(-mu / sigma);
  return normal_pdf_oracle((s - mu) / sigma) / (sigma * z);
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb),
                              tol, 48);
}

// Truncated-normal CDF by quadrature of the oracle density.
inline double truncnorm_cdf_oracle(double s, double mu, double sigma) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return integrate(
      [&](double x) { return truncnorm_pdf_oracle(x, mu, sigma); }, 0.0, s,
      1e-13);
}

// One-sample KS distance between data and a CDF.
inline double ks_distance(std::vector<double> data,
                          const std::function<double(double)>& cdf) {
  std::sort(data.begin(), data.end());
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = cdf(data[i]);
    d = std::max(d, std::abs((i + 1) / n - f));
    d = std::max(d, std::abs(f - i / n));
  }
  return d;
}

// Regularized incomplete gamma functions (series / continued fraction),
// used for chi-square tail probabilities.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // continued fraction for Q, then P = 1 - Q
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

// P(ChiSquare(k) > x)
inline double chi2_sf(double k, double x) { return 1.0 - gamma_p(k / 2.0, x / 2.0); }

}  // namespace oracle
