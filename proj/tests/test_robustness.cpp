#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "auctionlab/bid_distribution.hpp"
#include "auctionlab/robustness.hpp"

using namespace auctionlab;
using Catch::Approx;

namespace {

const ValueDistribution u01 = ValueDistribution::uniform(0.0, 1.0);

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ErmExperimentConfig base_config() {
  ErmExperimentConfig cfg{u01, 0.5, [](std::int64_t n) { return std::pow(double(n), -1.0 / 3.0); },
                          10000, 0.05, 50, 2024};
  return cfg;
}

}  // namespace

TEST_CASE("dkw deviation bound") {
  CHECK(dkw_bound(10000, 0.05) == Approx(0.01 * std::sqrt(std::log(40.0) / 2.0)).margin(1e-15));
  CHECK_THROWS_AS(dkw_bound(0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(dkw_bound(10, 1.5), std::invalid_argument);
}

TEST_CASE("erm experiment under the theoretical budget") {
  auto cfg = base_config();
  cfg.replications = 200;
  const auto results = erm_experiment(cfg);
  REQUIRE(results.size() == 200);

  int violations = 0, infeasible = 0;
  for (const auto& r : results) {
    if (r.violated) ++violations;
    if (!r.epsilon_feasible) ++infeasible;
    CHECK(r.bound == Approx(2.0 * 0.5 * r.c_n / r.epsilon).margin(1e-12));  // gamma_F = 1
    CHECK(r.x_hat >= 0.0);
    CHECK(r.x_hat <= 1.0);
    // feasibility flag is exactly the stated precondition
    CHECK(r.epsilon_feasible == (r.epsilon > r.x_max * r.c_n / u01.cdf(0.5)));
  }
  // failure budget delta + delta_1 = 0.05 + (empirical share of infeasible draws)
  CHECK(violations <= 0.10 * 200);
}

TEST_CASE("large epsilon pins the sample reserve value near zero") {
  auto cfg = base_config();
  cfg.epsilon_schedule = [](std::int64_t) { return 0.2; };
  cfg.replications = 50;
  const auto results = erm_experiment(cfg);
  for (const auto& r : results) REQUIRE(r.x_hat < 0.01);
}

TEST_CASE("degenerate single-sample experiment") {
  auto cfg = base_config();
  cfg.n = 1;
  cfg.epsilon_schedule = [](std::int64_t) { return 0.2; };
  cfg.replications = 5;
  const auto results = erm_experiment(cfg);
  for (const auto& r : results) {
    CHECK(r.x_hat <= 1.0);
    CHECK(r.bound > 0.0);  // may exceed the support: vacuous but well defined
  }
}

TEST_CASE("median sample reserve value shrinks with epsilon") {
  auto cfg = base_config();
  cfg.replications = 50;
  cfg.epsilon_schedule = [](std::int64_t) { return 0.01; };
  std::vector<double> small_eps, big_eps;
  for (const auto& r : erm_experiment(cfg)) small_eps.push_back(r.x_hat);
  cfg.epsilon_schedule = [](std::int64_t) { return 0.1; };
  for (const auto& r : erm_experiment(cfg)) big_eps.push_back(r.x_hat);
  CHECK(median_of(small_eps) >= median_of(big_eps));
}

TEST_CASE("median sample reserve value shrinks with the sample size") {
  auto cfg = base_config();
  cfg.replications = 60;
  std::vector<double> medians;
  for (std::int64_t n : {1000, 10000, 100000}) {
    cfg.n = n;
    std::vector<double> xs;
    for (const auto& r : erm_experiment(cfg)) xs.push_back(r.x_hat);
    medians.push_back(median_of(xs));
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("erm experiment input validation") {
  auto cfg = base_config();
  cfg.n = 0;
  CHECK_THROWS_AS(erm_experiment(cfg), std::invalid_argument);
  cfg = base_config();
  cfg.delta = 0.0;
  CHECK_THROWS_AS(erm_experiment(cfg), std::invalid_argument);
  cfg = base_config();
  cfg.epsilon_schedule = [](std::int64_t) { return 0.0; };
  CHECK_THROWS_AS(erm_experiment(cfg), std::invalid_argument);
}

TEST_CASE("perceived virtual value gap") {
  const auto wider = ValueDistribution::uniform(0.0, 1.1);

  SECTION("identical laws perceive no gap") {
    for (double x : {0.1, 0.4, 0.8})
      CHECK(perceived_virtual_value_gap(u01, u01, BidStrategy::truthful(), x) ==
            Approx(0.0).margin(1e-12));
  }

  SECTION("cross-check against the direct perceived virtual value") {
    const auto s = BidStrategy::linear(0.8);
    for (double x : {0.3, 0.5, 0.7}) {
      const double gap = perceived_virtual_value_gap(u01, wider, s, x);
      // direct evaluation: psi_{B,G}(beta(x)) = beta - beta' (1-G)/g
      const double direct =
          s.bid(x) - s.derivative(x) * (1.0 - wider.cdf(x)) / wider.pdf(x);
      const double under_f = h_beta(u01, s, x);
      CHECK(under_f - gap == Approx(direct).margin(1e-10));
    }
  }

  SECTION("thresholded strategy below r with the true law perceives exactly eps") {
    auto s = make_thresholded(u01, {0.5, 1e-3});
    for (double x : {0.1, 0.3, 0.45}) {
      const double gap = perceived_virtual_value_gap(u01, u01, s, x);
      CHECK(h_beta(u01, s, x) - gap == Approx(1e-3).margin(1e-12));
    }
  }

  SECTION("tail singularity propagates") {
    CHECK_THROWS_AS(perceived_virtual_value_gap(u01, u01, BidStrategy::truthful(), 1.0),
                    std::domain_error);
  }
}
