#pragma once

// Special functions for the Student t and standard normal distributions,
// and a bisection inverter for monotone maps. Everything here is a pure
// function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <string>

#include "lfdrshrink/error.hpp"

namespace lfdrshrink {

// A probability in [0, 1]. Converts implicitly to double so it can be used
// directly in arithmetic.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("probability outside [0, 1]: " + std::to_string(value));
    }
  }

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

// Degrees of freedom of a Student t distribution; strictly positive.
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(double value) : value_(value) {
    if (!(value > 0.0) || std::isnan(value)) {
      throw DomainError("degrees of freedom must be positive: " + std::to_string(value));
    }
  }

  constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(DegreesOfFreedom, DegreesOfFreedom) = default;

 private:
  double value_;
};

namespace detail {

inline constexpr int kMaxBetaIterations = 300;

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double ln_gamma_lanczos(double x) {
  // Valid for x >= 0.5.
  const double z = x - 1.0;
  double series = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    series += kLanczosCoefficients[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxBetaIterations; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge in " +
                     std::to_string(kMaxBetaIterations) + " iterations");
}

}  // namespace detail

/// Natural log of the gamma function for x > 0.
inline double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma requires x > 0");
  if (std::isinf(x)) return x;
  if (x < 0.5) return detail::ln_gamma_lanczos(x + 1.0) - std::log(x);
  return detail::ln_gamma_lanczos(x);
}

namespace detail {

inline double stirling_correction(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

}  // namespace detail

inline double ln_beta(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  if (big < 100.0) return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
  // ln Gamma(big) - ln Gamma(big + small) from the Stirling series, which
  // avoids cancelling two large log-gamma values.
  const double sum = big + small;
  const double ratio = -(big - 0.5) * std::log1p(small / big) - small * std::log(sum) + small +
                       detail::stirling_correction(big) - detail::stirling_correction(sum);
  return ln_gamma(small) + ratio;
}

/// Regularized incomplete beta I_x(a, b), taking y = 1 - x separately so
/// callers that know 1 - x more precisely than x can pass it through.
inline double regularized_incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta requires a > 0 and b > 0");
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
    throw DomainError("incomplete beta requires 0 <= x <= 1");
  }
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(y) - ln_beta(a, b);
  if (x > (a + 1.0) / (a + b + 2.0)) {
    const double tail = std::exp(log_front) * detail::beta_continued_fraction(b, a, y) / b;
    return 1.0 - tail;
  }
  return std::exp(log_front) * detail::beta_continued_fraction(a, b, x) / a;
}

inline double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley refinement step against erfc.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile requires 0 < p < 1");
  if (p == 0.5) return 0.0;

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  // Work in the lower half, where normal_cdf is accurate in relative terms.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  double x;
  if (q < p_low) {
    const double r = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else {
    const double r0 = q - 0.5;
    const double r = r0 * r0;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * r0 /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = normal_cdf(x) - q;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return upper ? -x : x;
}

inline double student_t_pdf(double t, DegreesOfFreedom df) {
  const double nu = df.value();
  const double log_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) -
                          0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

/// P(T <= t) for a central Student t with df degrees of freedom, via
/// P(T <= -|t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2.
inline double student_t_cdf(double t, DegreesOfFreedom df) {
  if (std::isnan(t)) throw DomainError("student_t_cdf: t is NaN");
  if (t == 0.0) return 0.5;
  const double nu = df.value();
  const double t2 = t * t;
  double tail;
  if (!std::isfinite(t2)) {
    tail = 0.0;
  } else {
    const double x = nu / (nu + t2);
    const double y = t2 / (nu + t2);
    tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x, y);
  }
  return t < 0.0 ? tail : 1.0 - tail;
}

/// Inverse of student_t_cdf. Exact closed forms for df = 1 and df = 2;
/// otherwise a bracketed Newton iteration on log F in the lower tail.
inline double student_t_quantile(double p, DegreesOfFreedom df) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile requires 0 < p < 1");
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  const double nu = df.value();

  double t;
  if (nu == 1.0) {
    t = -1.0 / std::tan(std::numbers::pi * q);
  } else if (nu == 2.0) {
    t = (2.0 * q - 1.0) / std::sqrt(2.0 * q * (1.0 - q));
  } else {
    // Cornish-Fisher start.
    const double z = normal_quantile(q);
    const double z2 = z * z;
    const double g1 = (z2 + 1.0) * z / 4.0;
    const double g2 = ((5.0 * z2 + 16.0) * z2 + 3.0) * z / 96.0;
    const double g3 = (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) * z / 384.0;
    t = z + g1 / nu + g2 / (nu * nu) + g3 / (nu * nu * nu);
    if (!(t < 0.0) || !std::isfinite(t)) t = z;

    const double log_q = std::log(q);
    double lo;
    double hi;
    double cdf = student_t_cdf(t, df);
    if (cdf > q) {
      hi = t;
      lo = t;
      do {
        lo = 2.0 * lo - 1.0;
      } while (student_t_cdf(lo, df) > q);
    } else {
      lo = t;
      hi = 0.0;
    }
    for (int iter = 0; iter < 200; ++iter) {
      cdf = student_t_cdf(t, df);
      if (cdf == q) break;
      if (cdf < q) {
        lo = t;
      } else {
        hi = t;
      }
      double next = t;
      if (cdf > 0.0) next = t - (std::log(cdf) - log_q) * cdf / student_t_pdf(t, df);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::fabs(next - t);
      t = next;
      if (step <= 1e-15 * std::max(1.0, std::fabs(t)) || hi - lo <= 1e-15 * std::fabs(t)) break;
    }
  }
  return upper ? -t : t;
}

/// Bisection inverse of a nondecreasing map. Stops when |f(x) - target| <= tol
/// or the bracket is no wider than tol.
template <std::invocable<double> F>
double invert_monotone(F&& f, double target, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw DomainError("invert_monotone requires tol > 0");
  if (!(lo <= hi)) throw BracketError("invert_monotone requires lo <= hi");
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo <= target && target <= f_hi)) {
    throw BracketError("invert_monotone: bracket does not straddle the target");
  }
  if (f_lo == target) return lo;
  if (f_hi == target) return hi;
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double value = f(mid);
    if (std::fabs(value - target) <= tol) return mid;
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace lfdrshrink
