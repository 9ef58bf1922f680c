#pragma once

// Fixed-parameter confidence posterior for a normal mean estimated from n
// paired differences. The significance function is the Student t pivot
//   F_x(theta) = T_{n-1}((theta - mean) / se).

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lfdrshrink/error.hpp"
#include "lfdrshrink/numerics.hpp"

namespace lfdrshrink {

struct PairedSample {
  std::string feature_id;
  std::vector<double> diffs;
};

struct TSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
  double se = 0.0;
  double t = 0.0;
  DegreesOfFreedom df{1.0};
};

/// One-sample summary with sample sd (divisor n - 1).
inline TSummary summarize(std::span<const double> diffs) {
  const std::size_t n = diffs.size();
  if (n < 2) throw DataError("at least two observations are required, got " + std::to_string(n));
  double sum = 0.0;
  for (double v : diffs) {
    if (!std::isfinite(v)) throw DataError("non-finite observation");
    sum += v;
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : diffs) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DataError("degenerate sample: standard deviation is zero");
  const double se = sd / std::sqrt(static_cast<double>(n));
  return TSummary{mean, sd, n, se, mean / se, DegreesOfFreedom(static_cast<double>(n - 1))};
}

inline TSummary summarize(const PairedSample& sample) {
  try {
    return summarize(std::span<const double>(sample.diffs));
  } catch (const DataError& e) {
    throw DataError("feature '" + sample.feature_id + "': " + e.what());
  }
}

struct ConditionalPosterior {
  double center = 0.0;
  double scale = 1.0;
  DegreesOfFreedom df{1.0};

  static ConditionalPosterior from_summary(const TSummary& s) { return {s.mean, s.se, s.df}; }
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

inline double conditional_cdf(const ConditionalPosterior& cp, double theta) {
  return student_t_cdf((theta - cp.center) / cp.scale, cp.df);
}

inline double conditional_quantile(const ConditionalPosterior& cp, double p) {
  return cp.center + cp.scale * student_t_quantile(p, cp.df);
}

/// [F^-1(alpha1), F^-1(1 - alpha2)], of confidence level 1 - alpha1 - alpha2.
inline Interval conditional_interval(const ConditionalPosterior& cp, double alpha1, double alpha2) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0) || !(alpha2 > 0.0 && alpha2 < 1.0)) {
    throw DomainError("interval tail probabilities must lie in (0, 1)");
  }
  if (!(alpha1 + alpha2 < 1.0)) throw DomainError("alpha1 + alpha2 must be below 1");
  return {conditional_quantile(cp, alpha1), conditional_quantile(cp, 1.0 - alpha2)};
}

}  // namespace lfdrshrink
