#pragma once

// Local false discovery rates under a theoretical N(0, 1) null on the probit
// scale. The marginal density f of the z-scores is estimated by Lindsey's
// method: bin the z-scores, then fit log expected counts as a polynomial in
// the bin midpoint by Poisson regression (IRLS).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lfdrshrink/error.hpp"
#include "lfdrshrink/numerics.hpp"

namespace lfdrshrink {

struct ZVector {
  std::vector<double> zs;
  DegreesOfFreedom df{1.0};
};

struct LindseyOptions {
  int bins = 120;
  int degree = 7;
  double tolerance = 1e-8;
  int max_iterations = 50;
  std::size_t min_features = 100;
  double range_padding = 0.1;
};

struct MixtureFit {
  Probability pi0_hat{1.0};
  // Coefficients of the log-density polynomial in u = (z - basis_center) / basis_halfwidth,
  // lowest order first.
  std::vector<double> basis_coefficients;
  double basis_center = 0.0;
  double basis_halfwidth = 1.0;
  double log_normalizer = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::size_t> bin_counts;
  double z_lo = 0.0;
  double z_hi = 0.0;
  int iterations = 0;
  double deviance = 0.0;

  double log_density(double z) const {
    const double u = (z - basis_center) / basis_halfwidth;
    double acc = 0.0;
    for (auto it = basis_coefficients.rbegin(); it != basis_coefficients.rend(); ++it) {
      acc = acc * u + *it;
    }
    return acc - log_normalizer;
  }

  double density(double z) const { return std::exp(log_density(z)); }

  bool in_range(double z) const noexcept { return z >= z_lo && z <= z_hi; }

  std::vector<double> bin_midpoints() const {
    std::vector<double> mids(bin_counts.size());
    for (std::size_t j = 0; j < mids.size(); ++j) mids[j] = 0.5 * (bin_edges[j] + bin_edges[j + 1]);
    return mids;
  }
};

struct LfdrValue {
  Probability value;
  bool extrapolated = false;
};

struct LfdrEstimate {
  std::vector<double> values;
  std::vector<bool> extrapolated;
};

/// z = Phi^-1(T_df(t)), with the inner probability clamped to [1e-15, 1 - 1e-15].
inline double probit_transform(double t_stat, DegreesOfFreedom df) {
  constexpr double clamp = 1e-15;
  const double p = std::clamp(student_t_cdf(t_stat, df), clamp, 1.0 - clamp);
  return normal_quantile(p);
}

/// min(1, f(0) / phi(0)).
inline Probability pi0_estimate(const MixtureFit& fit) {
  return Probability(std::min(1.0, fit.density(0.0) / normal_pdf(0.0)));
}

inline MixtureFit fit_mixture(std::span<const double> zs, const LindseyOptions& opts = {}) {
  if (zs.size() < opts.min_features) {
    throw DataError("mixture fit needs at least " + std::to_string(opts.min_features) +
                    " features, got " + std::to_string(zs.size()));
  }
  if (opts.bins < opts.degree + 1 || opts.degree < 0) {
    throw DomainError("mixture fit needs bins > degree >= 0");
  }
  for (double z : zs) {
    if (!std::isfinite(z)) throw DataError("non-finite z-score");
  }

  MixtureFit fit;
  const auto [min_it, max_it] = std::minmax_element(zs.begin(), zs.end());
  fit.z_lo = *min_it - opts.range_padding;
  fit.z_hi = *max_it + opts.range_padding;
  const auto bins = static_cast<std::size_t>(opts.bins);
  const double width = (fit.z_hi - fit.z_lo) / static_cast<double>(bins);

  fit.bin_edges.resize(bins + 1);
  for (std::size_t j = 0; j <= bins; ++j) fit.bin_edges[j] = fit.z_lo + width * static_cast<double>(j);
  fit.bin_edges.back() = fit.z_hi;
  fit.bin_counts.assign(bins, 0);
  for (double z : zs) {
    auto j = static_cast<std::size_t>((z - fit.z_lo) / width);
    fit.bin_counts[std::min(j, bins - 1)] += 1;
  }

  fit.basis_center = 0.5 * (fit.z_lo + fit.z_hi);
  fit.basis_halfwidth = 0.5 * (fit.z_hi - fit.z_lo);
  const auto terms = static_cast<Eigen::Index>(opts.degree + 1);
  const auto rows = static_cast<Eigen::Index>(bins);
  Eigen::MatrixXd design(rows, terms);
  Eigen::VectorXd counts(rows);
  for (Eigen::Index j = 0; j < rows; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double mid = 0.5 * (fit.bin_edges[uj] + fit.bin_edges[uj + 1]);
    const double u = (mid - fit.basis_center) / fit.basis_halfwidth;
    double power = 1.0;
    for (Eigen::Index k = 0; k < terms; ++k) {
      design(j, k) = power;
      power *= u;
    }
    counts(j) = static_cast<double>(fit.bin_counts[uj]);
  }

  auto deviance = [&](const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index j = 0; j < rows; ++j) {
      const double y = counts(j);
      dev += (y > 0.0 ? y * std::log(y / mu(j)) : 0.0) - (y - mu(j));
    }
    return 2.0 * dev;
  };

  Eigen::VectorXd mu = counts.array() + 0.5;
  Eigen::VectorXd eta = mu.array().log();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(terms);
  double dev_old = deviance(mu);
  bool converged = false;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    const Eigen::VectorXd working = eta.array() + (counts - mu).array() / mu.array();
    const Eigen::MatrixXd weighted = design.array().colwise() * mu.array();
    const Eigen::MatrixXd gram = design.transpose() * weighted;
    const Eigen::VectorXd rhs = weighted.transpose() * working;
    beta = gram.ldlt().solve(rhs);
    eta = design * beta;
    mu = eta.array().exp();
    if (!beta.allFinite() || !mu.allFinite()) {
      throw FitError("Poisson regression diverged at iteration " + std::to_string(iter));
    }
    const double dev = deviance(mu);
    fit.iterations = iter;
    fit.deviance = dev;
    if (std::fabs(dev - dev_old) / (std::fabs(dev) + 0.1) < opts.tolerance) {
      converged = true;
      break;
    }
    dev_old = dev;
  }
  if (!converged) {
    throw FitError("Poisson regression did not converge in " +
                   std::to_string(opts.max_iterations) + " iterations");
  }

  fit.basis_coefficients.assign(beta.data(), beta.data() + beta.size());
  // Midpoint-rule normalization so the fitted density integrates to one over the grid.
  fit.log_normalizer = std::log(mu.sum() * width);
  fit.pi0_hat = pi0_estimate(fit);
  return fit;
}

inline MixtureFit fit_mixture(const ZVector& zv, const LindseyOptions& opts = {}) {
  return fit_mixture(std::span<const double>(zv.zs), opts);
}

/// min(1, pi0 * phi(z) / f(z)). Outside the fitted range the log-polynomial
/// is extrapolated and the result flagged.
inline LfdrValue lfdr_at(const MixtureFit& fit, double z) {
  const double log_ratio =
      std::log(fit.pi0_hat.value()) + std::log(normal_pdf(z)) - fit.log_density(z);
  double value = std::exp(log_ratio);
  if (std::isnan(value)) value = 1.0;
  return {Probability(std::clamp(value, 0.0, 1.0)), !fit.in_range(z)};
}

inline LfdrEstimate estimate_lfdr(const MixtureFit& fit, std::span<const double> zs) {
  LfdrEstimate out;
  out.values.reserve(zs.size());
  out.extrapolated.reserve(zs.size());
  for (double z : zs) {
    const LfdrValue v = lfdr_at(fit, z);
    out.values.push_back(v.value);
    out.extrapolated.push_back(v.extrapolated);
  }
  return out;
}

}  // namespace lfdrshrink
