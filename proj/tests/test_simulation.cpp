#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "lfdrshrink/simulation.hpp"

using namespace lfdrshrink;
using Catch::Approx;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.m = 1000;
  cfg.n = 2;
  cfg.pi0 = 0.9;
  cfg.n_experiments = 20;
  cfg.seed = 11;
  cfg.track = TrackMode::all_features;
  return cfg;
}

}  // namespace

TEST_CASE("RandomStream substreams are reproducible and distinct", "[simulation][random]") {
  RandomStream a(5, 3);
  RandomStream b(5, 3);
  RandomStream c(5, 4);
  RandomStream d(6, 3);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    firsts.insert(va);
  }
  CHECK(firsts.size() == 100);
  RandomStream a2(5, 3);
  CHECK(a2.next_u64() != c.next_u64());
  RandomStream a3(5, 3);
  CHECK(a3.next_u64() != d.next_u64());

  RandomStream u(1, 1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 100000.0 == Approx(0.5).margin(0.005));
}

TEST_CASE("generate_experiment with pi0 = 1 is all null", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.pi0 = 1.0;
  cfg.sigma_null = 0.7;
  const ExperimentData data = generate_experiment(cfg, 0);
  REQUIRE(data.truth.thetas.size() == cfg.m);
  REQUIRE(data.values.size() == cfg.m * cfg.n);
  double grand = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < cfg.m; ++i) {
    CHECK(data.truth.thetas[i] == 0.0);
    CHECK_FALSE(data.truth.a_indicators[i]);
    for (double v : data.row(i)) {
      grand += v;
      sq += v * v;
    }
  }
  const double count = static_cast<double>(cfg.m * cfg.n);
  CHECK(grand / count == Approx(0.0).margin(4.0 * 0.7 / std::sqrt(count)));
  CHECK(std::sqrt(sq / count) == Approx(0.7).epsilon(0.05));
}

TEST_CASE("generate_experiment trinomial truth", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.m = 10000;
  int within = 0;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const ExperimentData data = generate_experiment(cfg, k);
    std::size_t nulls = 0;
    std::size_t minus = 0;
    std::size_t plus = 0;
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const double th = data.truth.thetas[i];
      CHECK((th == 0.0 || th == -2.0 || th == 2.0));
      CHECK(data.truth.a_indicators[i] == (th != 0.0));
      nulls += th == 0.0;
      minus += th == -2.0;
      plus += th == 2.0;
    }
    within += std::fabs(static_cast<double>(nulls) / cfg.m - 0.9) <= 0.01 ? 1 : 0;
    CHECK(std::fabs(static_cast<double>(minus) - static_cast<double>(plus)) < 6.0 * std::sqrt(500.0));
  }
  // P(|fraction - 0.9| > 0.01) is about 8.5e-4 per experiment at m = 1e4.
  CHECK(within >= 29);
}

TEST_CASE("generate_experiment uses the right sigma per feature", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.m = 20000;
  cfg.n = 4;
  const ExperimentData data = generate_experiment(cfg, 2);
  double ss_null = 0.0;
  double ss_alt = 0.0;
  std::size_t n_null = 0;
  std::size_t n_alt = 0;
  for (std::size_t i = 0; i < cfg.m; ++i) {
    for (double v : data.row(i)) {
      const double r = v - data.truth.thetas[i];
      if (data.truth.a_indicators[i]) {
        ss_alt += r * r;
        ++n_alt;
      } else {
        ss_null += r * r;
        ++n_null;
      }
    }
  }
  CHECK(std::sqrt(ss_null / n_null) == Approx(1.0).epsilon(0.02));
  CHECK(std::sqrt(ss_alt / n_alt) == Approx(1.5).epsilon(0.05));
}

TEST_CASE("generation depends only on seed and experiment index", "[simulation]") {
  const SimConfig cfg = small_config();
  const ExperimentData a = generate_experiment(cfg, 7);
  const ExperimentData b = generate_experiment(cfg, 7);
  const ExperimentData c = generate_experiment(cfg, 8);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);

  // The same seed at a different pi0 reuses the same uniform stream.
  SimConfig other = cfg;
  other.pi0 = 0.99;
  const ExperimentData d = generate_experiment(other, 7);
  std::size_t same_nulls = 0;
  for (std::size_t i = 0; i < cfg.m; ++i) same_nulls += (a.truth.thetas[i] == 0.0 && d.truth.thetas[i] == 0.0);
  std::size_t a_nulls = 0;
  for (double th : a.truth.thetas) a_nulls += th == 0.0;
  CHECK(same_nulls == a_nulls);
}

TEST_CASE("analyze_experiment records", "[simulation]") {
  SimConfig cfg = small_config();
  const ExperimentData data = generate_experiment(cfg, 0);
  const ExperimentResult res = analyze_experiment(data, cfg, 0);
  REQUIRE(res.features.size() == cfg.m);
  for (const FeatureRecord& r : res.features) {
    CHECK(r.lfdr >= 0.0);
    CHECK(r.lfdr <= 1.0);
    CHECK(r.covered_marginal == r.marginal_ci.contains(r.theta));
    CHECK(r.covered_conditional == r.conditional_ci.contains(r.theta));
    if (r.conditional_ci.contains(0.0)) CHECK(r.nested);
    if (r.lfdr == 0.0) {
      CHECK(r.marginal_ci.lower == r.conditional_ci.lower);
      CHECK(r.marginal_ci.upper == r.conditional_ci.upper);
    }
  }
}

TEST_CASE("analyze_experiment attaches the experiment index to failures", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.m = 50;  // below the mixture-fit minimum
  const ExperimentData data = generate_experiment(cfg, 3);
  CHECK_THROWS_WITH(analyze_experiment(data, cfg, 3), Catch::Matchers::ContainsSubstring("experiment 3"));
  cfg.lindsey.max_iterations = 1;
  cfg.m = 500;
  CHECK_THROWS_AS(analyze_experiment(generate_experiment(cfg, 4), cfg, 4), FitError);
}

TEST_CASE("all-null study covers at the nominal level", "[simulation][statistical]") {
  SimConfig cfg = small_config();
  cfg.pi0 = 1.0;
  cfg.n = 3;
  cfg.n_experiments = 10;
  const CoverageReport rep = run_study(cfg);
  const double se = std::sqrt(0.95 * 0.05 / static_cast<double>(rep.n_tracked));
  CHECK(std::fabs(rep.conditional_coverage - 0.95) <= 4.0 * se);
  CHECK(rep.marginal_coverage >= rep.conditional_coverage);
}

TEST_CASE("forcing lfdr to zero makes both intervals identical", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.fixed_lfdr = 0.0;
  const CoverageReport rep = run_study(cfg);
  CHECK(rep.marginal_coverage == rep.conditional_coverage);
  CHECK(rep.mean_width_marginal == rep.mean_width_conditional);
  CHECK(rep.median_errors_marginal == rep.median_errors_conditional);
}

TEST_CASE("run_study is deterministic and thread-count independent", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.threads = 1;
  const CoverageReport a = run_study(cfg);
  cfg.threads = 3;
  const CoverageReport b = run_study(cfg);
  CHECK(a.marginal_coverage == b.marginal_coverage);
  CHECK(a.conditional_coverage == b.conditional_coverage);
  CHECK(a.mean_width_marginal == b.mean_width_marginal);
  CHECK(a.mean_width_conditional == b.mean_width_conditional);
  CHECK(a.median_errors_marginal == b.median_errors_marginal);
  CHECK(a.mean_pi0_hat == b.mean_pi0_hat);
}

TEST_CASE("first_feature tracking keeps one record per experiment", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.track = TrackMode::first_feature;
  const CoverageReport rep = run_study(cfg);
  CHECK(rep.n_tracked == cfg.n_experiments);
  CHECK(rep.median_errors_conditional.size() == cfg.n_experiments);
  CHECK(rep.n_features_total == cfg.m * cfg.n_experiments);
}

TEST_CASE("study-level ordering at both null proportions", "[simulation][statistical]") {
  SimConfig cfg = small_config();
  cfg.m = 2000;
  cfg.n_experiments = 40;
  double marginal_at_09 = 0.0;
  for (double pi0 : {0.9, 0.99}) {
    cfg.pi0 = pi0;
    const CoverageReport rep = run_study(cfg);
    INFO("pi0 = " << pi0);
    CHECK(rep.marginal_coverage >= rep.conditional_coverage);
    CHECK(rep.mean_width_marginal <= rep.mean_width_conditional);
    const double se = std::sqrt(0.95 * 0.05 / static_cast<double>(rep.n_tracked));
    CHECK(std::fabs(rep.conditional_coverage - 0.95) <= 3.0 * se);
    if (pi0 == 0.9) {
      marginal_at_09 = rep.marginal_coverage;
    } else {
      CHECK(rep.marginal_coverage >= marginal_at_09);
    }
  }
}

TEST_CASE("SimConfig validation", "[simulation]") {
  SimConfig cfg = small_config();
  cfg.n = 1;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.pi0 = 1.2;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.level = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.effect = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.n_experiments = 0;
  CHECK_THROWS_AS(run_study(cfg), DomainError);
}
