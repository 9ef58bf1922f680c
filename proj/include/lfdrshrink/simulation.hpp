#pragma once

// Monte-Carlo coverage study. Each experiment draws m true means from
// {0, -effect, +effect} with probabilities {pi0, (1-pi0)/2, (1-pi0)/2},
// simulates n normal observations per feature, runs the full estimation
// pipeline, and records coverage, widths and median errors.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfdrshrink/error.hpp"
#include "lfdrshrink/parallel.hpp"
#include "lfdrshrink/pipeline.hpp"
#include "lfdrshrink/random.hpp"

namespace lfdrshrink {

enum class TrackMode { first_feature, all_features };

inline const char* to_string(TrackMode mode) {
  return mode == TrackMode::first_feature ? "first_feature" : "all_features";
}

struct SimConfig {
  std::size_t m = 10000;
  std::size_t n = 2;
  double pi0 = 0.9;
  double effect = 2.0;
  double sigma_null = 1.0;
  double sigma_alt = 1.5;
  std::size_t n_experiments = 2000;
  std::uint64_t seed = 1;
  double level = 0.95;
  TrackMode track = TrackMode::first_feature;
  LindseyOptions lindsey;
  std::optional<double> fixed_lfdr;
  unsigned threads = 0;  // 0: default_thread_count()

  void validate() const {
    if (m == 0) throw DomainError("m must be positive");
    if (n < 2) throw DomainError("n must be at least 2");
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw DomainError("pi0 must lie in [0, 1]");
    if (!(effect > 0.0)) throw DomainError("effect must be positive");
    if (!(sigma_null > 0.0) || !(sigma_alt > 0.0)) throw DomainError("sigmas must be positive");
    if (n_experiments == 0) throw DomainError("experiments must be positive");
    validate_level(level);
    if (fixed_lfdr) Probability check(*fixed_lfdr);
  }
};

struct ExperimentTruth {
  std::vector<double> thetas;
  std::vector<bool> a_indicators;  // true iff theta != 0
};

struct ExperimentData {
  ExperimentTruth truth;
  std::size_t n = 0;
  std::vector<double> values;  // row-major m x n

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * n, n);
  }
};

struct FeatureRecord {
  double theta = 0.0;
  double lfdr = 0.0;
  double median_conditional = 0.0;
  double median_marginal = 0.0;
  Interval conditional_ci;
  ShrunkenInterval marginal_ci;
  bool covered_conditional = false;
  bool covered_marginal = false;
  bool nested = true;
};

struct ExperimentResult {
  std::vector<FeatureRecord> features;
  double pi0_hat = 1.0;
};

struct CoverageReport {
  double marginal_coverage = 0.0;
  double conditional_coverage = 0.0;
  double mean_width_marginal = 0.0;
  double mean_width_conditional = 0.0;
  double mean_abs_error_marginal = 0.0;
  double mean_abs_error_conditional = 0.0;
  double mean_pi0_hat = 0.0;
  std::vector<double> median_errors_marginal;
  std::vector<double> median_errors_conditional;
  std::vector<double> widths_marginal;
  std::vector<double> widths_conditional;
  std::size_t n_tracked = 0;
  std::size_t n_features_total = 0;
  std::size_t nesting_violations = 0;
};

/// Draws truth first (m uniforms), then the m x n observations row by row.
inline ExperimentData generate_experiment(const SimConfig& cfg, RandomStream& stream) {
  ExperimentData out;
  out.n = cfg.n;
  out.truth.thetas.resize(cfg.m);
  out.truth.a_indicators.resize(cfg.m);
  const double minus_cut = cfg.pi0 + 0.5 * (1.0 - cfg.pi0);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const double u = stream.uniform();
    double theta = 0.0;
    if (u >= cfg.pi0) theta = u < minus_cut ? -cfg.effect : cfg.effect;
    out.truth.thetas[i] = theta;
    out.truth.a_indicators[i] = theta != 0.0;
  }
  out.values.resize(cfg.m * cfg.n);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const double theta = out.truth.thetas[i];
    const double sigma = theta == 0.0 ? cfg.sigma_null : cfg.sigma_alt;
    for (std::size_t j = 0; j < cfg.n; ++j) out.values[i * cfg.n + j] = theta + sigma * stream.normal();
  }
  return out;
}

inline ExperimentData generate_experiment(const SimConfig& cfg, std::uint64_t experiment_index) {
  RandomStream stream(cfg.seed, experiment_index);
  return generate_experiment(cfg, stream);
}

inline PipelineOptions pipeline_options(const SimConfig& cfg) {
  PipelineOptions opts;
  opts.theta0 = 0.0;
  opts.level = cfg.level;
  opts.lindsey = cfg.lindsey;
  opts.fixed_lfdr = cfg.fixed_lfdr;
  return opts;
}

inline ExperimentResult analyze_experiment(const ExperimentData& data, const SimConfig& cfg,
                                           std::uint64_t experiment_index = 0) {
  const std::size_t m = data.truth.thetas.size();
  std::vector<TSummary> summaries;
  summaries.reserve(m);
  PipelineResult pr;
  try {
    for (std::size_t i = 0; i < m; ++i) summaries.push_back(summarize(data.row(i)));
    pr = run_pipeline(summaries, pipeline_options(cfg));
  } catch (const FitError& e) {
    throw FitError("experiment " + std::to_string(experiment_index) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("experiment " + std::to_string(experiment_index) + ": " + e.what());
  }

  ExperimentResult out;
  out.pi0_hat = pr.fit ? pr.fit->pi0_hat.value() : 1.0 - *cfg.fixed_lfdr;
  out.features.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const FeatureEstimate& fe = pr.features[i];
    FeatureRecord r;
    r.theta = data.truth.thetas[i];
    r.lfdr = fe.lfdr;
    r.median_conditional = fe.median_conditional;
    r.median_marginal = fe.median_marginal;
    r.conditional_ci = fe.conditional_ci;
    r.marginal_ci = fe.marginal_ci;
    r.covered_conditional = fe.conditional_ci.contains(r.theta);
    r.covered_marginal = fe.marginal_ci.contains(r.theta);
    r.nested = fe.conditional_ci.lower <= fe.marginal_ci.lower &&
               fe.marginal_ci.upper <= fe.conditional_ci.upper;
    out.features.push_back(r);
  }
  return out;
}

/// Runs all experiments (in parallel) and reduces in experiment order, so the
/// report is bit-identical for a given configuration regardless of threads.
inline CoverageReport run_study(const SimConfig& cfg) {
  cfg.validate();
  struct Partial {
    std::vector<FeatureRecord> tracked;
    std::size_t violations = 0;
    double pi0_hat = 0.0;
  };
  std::vector<Partial> partials(cfg.n_experiments);
  const unsigned threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
  parallel_for(cfg.n_experiments, threads, [&](std::size_t k) {
    const ExperimentData data = generate_experiment(cfg, static_cast<std::uint64_t>(k));
    ExperimentResult res = analyze_experiment(data, cfg, k);
    Partial& p = partials[k];
    p.pi0_hat = res.pi0_hat;
    for (const FeatureRecord& r : res.features) p.violations += r.nested ? 0 : 1;
    if (cfg.track == TrackMode::first_feature) {
      p.tracked.push_back(res.features.front());
    } else {
      p.tracked = std::move(res.features);
    }
  });

  CoverageReport rep;
  std::size_t covered_m = 0;
  std::size_t covered_c = 0;
  double width_m = 0.0;
  double width_c = 0.0;
  double err_m = 0.0;
  double err_c = 0.0;
  double pi0_sum = 0.0;
  for (const Partial& p : partials) {
    pi0_sum += p.pi0_hat;
    rep.nesting_violations += p.violations;
    for (const FeatureRecord& r : p.tracked) {
      covered_m += r.covered_marginal ? 1 : 0;
      covered_c += r.covered_conditional ? 1 : 0;
      width_m += r.marginal_ci.width();
      width_c += r.conditional_ci.width();
      const double em = r.median_marginal - r.theta;
      const double ec = r.median_conditional - r.theta;
      err_m += std::fabs(em);
      err_c += std::fabs(ec);
      rep.median_errors_marginal.push_back(em);
      rep.median_errors_conditional.push_back(ec);
      rep.widths_marginal.push_back(r.marginal_ci.width());
      rep.widths_conditional.push_back(r.conditional_ci.width());
    }
  }
  rep.n_tracked = rep.median_errors_marginal.size();
  rep.n_features_total = cfg.m * cfg.n_experiments;
  const double nt = static_cast<double>(rep.n_tracked);
  rep.marginal_coverage = static_cast<double>(covered_m) / nt;
  rep.conditional_coverage = static_cast<double>(covered_c) / nt;
  rep.mean_width_marginal = width_m / nt;
  rep.mean_width_conditional = width_c / nt;
  rep.mean_abs_error_marginal = err_m / nt;
  rep.mean_abs_error_conditional = err_c / nt;
  rep.mean_pi0_hat = pi0_sum / static_cast<double>(cfg.n_experiments);
  return rep;
}

}  // namespace lfdrshrink
