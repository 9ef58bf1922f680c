#pragma once

// Marginal confidence posterior: a point mass of weight lfdr at the null
// value theta0 mixed with the conditional confidence posterior,
//
//   P = lfdr * delta_{theta0} + (1 - lfdr) * P^x.
//
// Quantiles of P shrink toward theta0. Intervals built from them are nested
// inside the conditional intervals at the same tail probabilities.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "lfdrshrink/confidence_posterior.hpp"
#include "lfdrshrink/error.hpp"
#include "lfdrshrink/numerics.hpp"

namespace lfdrshrink {

struct MarginalPosterior {
  Probability lfdr;
  double theta0 = 0.0;
  ConditionalPosterior conditional;
};

struct ShrunkenInterval {
  Probability level;
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;

  double width() const noexcept { return upper - lower; }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

struct ObservedConfidenceLevels {
  double below = 0.0;    // P(theta < theta0)
  double at_null = 0.0;  // P(theta = theta0) = lfdr
  double above = 0.0;    // P(theta > theta0)
};

/// Right-continuous CDF: lfdr * 1[theta >= theta0] + (1 - lfdr) * F_x(theta).
inline double marginal_cdf(const MarginalPosterior& mp, double theta) {
  const double atom = theta >= mp.theta0 ? mp.lfdr.value() : 0.0;
  return atom + (1.0 - mp.lfdr) * conditional_cdf(mp.conditional, theta);
}

/// Left limit P(theta' < theta).
inline double marginal_cdf_left(const MarginalPosterior& mp, double theta) {
  const double atom = theta > mp.theta0 ? mp.lfdr.value() : 0.0;
  return atom + (1.0 - mp.lfdr) * conditional_cdf(mp.conditional, theta);
}

/// Generalized inverse inf{theta : marginal_cdf(theta) >= alpha}, evaluated
/// by the three-branch shrunken quantile formula.
inline double marginal_quantile(const MarginalPosterior& mp, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("marginal_quantile requires 0 < alpha < 1");
  const double lfdr = mp.lfdr;
  if (lfdr == 0.0) return conditional_quantile(mp.conditional, alpha);
  if (lfdr == 1.0) return mp.theta0;

  const double continuous = 1.0 - lfdr;
  const double below = alpha / continuous;
  if (below < 1.0) {
    const double q = conditional_quantile(mp.conditional, below);
    if (q < mp.theta0) return q;
  }
  const double above = 1.0 - (1.0 - alpha) / continuous;
  if (above > 0.0) {
    const double q = conditional_quantile(mp.conditional, above);
    if (q > mp.theta0) return q;
  }
  return mp.theta0;
}

inline ShrunkenInterval shrunken_interval(const MarginalPosterior& mp, double alpha1, double alpha2) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0) || !(alpha2 > 0.0 && alpha2 < 1.0)) {
    throw DomainError("interval tail probabilities must lie in (0, 1)");
  }
  if (!(alpha1 + alpha2 < 1.0)) throw DomainError("alpha1 + alpha2 must be below 1");
  ShrunkenInterval out;
  out.level = Probability(1.0 - alpha1 - alpha2);
  out.lower = marginal_quantile(mp, alpha1);
  out.upper = marginal_quantile(mp, 1.0 - alpha2);
  out.degenerate = out.lower == mp.theta0 && out.upper == mp.theta0;
  return out;
}

inline double posterior_median(const MarginalPosterior& mp) { return marginal_quantile(mp, 0.5); }

inline ObservedConfidenceLevels observed_confidence_levels(const MarginalPosterior& mp) {
  const double lfdr = mp.lfdr;
  const double f0 = conditional_cdf(mp.conditional, mp.theta0);
  ObservedConfidenceLevels out;
  out.below = (1.0 - lfdr) * f0;
  out.at_null = lfdr;
  out.above = (1.0 - lfdr) * (1.0 - f0);
  return out;
}

/// lfdr * theta0 + (1 - lfdr) * center. Undefined for df <= 1.
inline double posterior_mean(const MarginalPosterior& mp) {
  if (!(mp.conditional.df.value() > 1.0)) {
    throw UndefinedMeanError("posterior mean does not exist for df <= 1");
  }
  return mp.lfdr * mp.theta0 + (1.0 - mp.lfdr) * mp.conditional.center;
}

/// 1-based ranks: descending |median - theta0|, ties by ascending lfdr, then
/// by input position.
inline std::vector<std::size_t> rank_by_shrunken_estimate(std::span<const double> medians,
                                                          std::span<const double> lfdrs,
                                                          double theta0) {
  if (medians.size() != lfdrs.size()) throw DomainError("rank: size mismatch");
  std::vector<std::size_t> order(medians.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = std::fabs(medians[a] - theta0);
    const double db = std::fabs(medians[b] - theta0);
    if (da != db) return da > db;
    return lfdrs[a] < lfdrs[b];
  });
  std::vector<std::size_t> ranks(medians.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

}  // namespace lfdrshrink
