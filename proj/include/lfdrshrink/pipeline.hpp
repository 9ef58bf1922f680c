#pragma once

// End-to-end per-feature estimation shared by the simulation harness and the
// analyze command: t summaries -> probit z-scores -> mixture fit -> lfdr ->
// marginal posterior estimates.

#include <optional>
#include <span>
#include <vector>

#include "lfdrshrink/confidence_posterior.hpp"
#include "lfdrshrink/lfdr.hpp"
#include "lfdrshrink/marginal_posterior.hpp"

namespace lfdrshrink {

struct PipelineOptions {
  double theta0 = 0.0;
  double level = 0.95;
  LindseyOptions lindsey;
  // When set, every feature uses this lfdr and no mixture is fitted.
  std::optional<double> fixed_lfdr;
};

struct FeatureEstimate {
  TSummary summary;
  double t_null = 0.0;  // (mean - theta0) / se
  double z = 0.0;
  double lfdr = 0.0;
  bool lfdr_extrapolated = false;
  double median_conditional = 0.0;
  double median_marginal = 0.0;
  Interval conditional_ci;
  ShrunkenInterval marginal_ci;
  ObservedConfidenceLevels levels;
};

struct PipelineResult {
  std::optional<MixtureFit> fit;
  std::vector<FeatureEstimate> features;
};

inline void validate_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
}

inline FeatureEstimate estimate_feature(const TSummary& summary, double z, double lfdr,
                                        const PipelineOptions& opts) {
  const double alpha = 0.5 * (1.0 - opts.level);
  FeatureEstimate fe;
  fe.summary = summary;
  fe.t_null = (summary.mean - opts.theta0) / summary.se;
  fe.z = z;
  fe.lfdr = lfdr;
  const MarginalPosterior mp{Probability(lfdr), opts.theta0,
                             ConditionalPosterior::from_summary(summary)};
  fe.median_conditional = mp.conditional.center;
  fe.median_marginal = posterior_median(mp);
  fe.conditional_ci = conditional_interval(mp.conditional, alpha, alpha);
  fe.marginal_ci = shrunken_interval(mp, alpha, alpha);
  fe.levels = observed_confidence_levels(mp);
  return fe;
}

inline PipelineResult run_pipeline(std::span<const TSummary> summaries, const PipelineOptions& opts) {
  validate_level(opts.level);
  std::vector<double> zs(summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const TSummary& s = summaries[i];
    zs[i] = probit_transform((s.mean - opts.theta0) / s.se, s.df);
  }

  PipelineResult out;
  std::vector<double> lfdrs(summaries.size());
  std::vector<bool> flags(summaries.size(), false);
  if (opts.fixed_lfdr) {
    const Probability fixed(*opts.fixed_lfdr);
    std::fill(lfdrs.begin(), lfdrs.end(), fixed.value());
  } else {
    out.fit = fit_mixture(zs, opts.lindsey);
    LfdrEstimate est = estimate_lfdr(*out.fit, zs);
    lfdrs = std::move(est.values);
    flags = std::move(est.extrapolated);
  }

  out.features.reserve(summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    out.features.push_back(estimate_feature(summaries[i], zs[i], lfdrs[i], opts));
    out.features.back().lfdr_extrapolated = flags[i];
  }
  return out;
}

}  // namespace lfdrshrink
