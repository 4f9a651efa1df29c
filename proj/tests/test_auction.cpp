#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "auctionlab/auction.hpp"
#include "auctionlab/competition.hpp"
#include "auctionlab/seller.hpp"

using namespace auctionlab;
using Catch::Approx;

namespace {

const ValueDistribution u01 = ValueDistribution::uniform(0.0, 1.0);

AuctionConfig two_uniform(Mechanism mech, const BidStrategy& first) {
  AuctionConfig cfg;
  cfg.mechanism = mech;
  cfg.bidders.push_back({u01, first});
  cfg.bidders.push_back({u01, BidStrategy::truthful()});
  return cfg;
}

}  // namespace

TEST_CASE("expected utility by quadrature, uniform examples") {
  const auto G = max_of_truthful(u01, 1);

  // Two truthful uniform bidders, reserve value 0.5: U = 1/12.
  CHECK(expected_utility_quadrature(u01, BidStrategy::truthful(), G, 0.5) ==
        Approx(1.0 / 12.0).margin(1e-9));

  // Thresholding at the monopoly price unlocks the low-value region:
  // U = 0.25 (ln 2 - 1/2) + 1/12 = 0.13162...
  auto thresh = make_thresholded(u01, {0.5, 0.0});
  CHECK(expected_utility_quadrature(u01, thresh, G, 0.0) ==
        Approx(0.25 * (std::log(2.0) - 0.5) + 1.0 / 12.0).margin(1e-9));
  CHECK(expected_utility_quadrature(u01, thresh, G, 0.0) == Approx(0.1316).margin(5e-4));

  // Optimal threshold from the known transcendental relation 1-r = e^{-2r}.
  double lo = 0.5, hi = 0.99;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (1.0 - m - std::exp(-2.0 * m) > 0.0 ? lo : hi) = m;
  }
  const double r_star = 0.5 * (lo + hi);
  auto best = make_thresholded(u01, {r_star, 0.0});
  CHECK(expected_utility_quadrature(u01, best, G, 0.0) == Approx(0.1468).margin(5e-4));
}

TEST_CASE("expected payment by quadrature") {
  const auto G = max_of_truthful(u01, 1);

  // int_{1/2}^{1} (2x-1) x dx = 5/24.
  CHECK(expected_payment_quadrature(u01, BidStrategy::truthful(), G, 0.5) ==
        Approx(5.0 / 24.0).margin(1e-9));

  // Thresholding leaves the seller's take unchanged once she moves the
  // reserve to the minimum bid.
  auto thresh = make_thresholded(u01, {0.5, 0.0});
  CHECK(expected_payment_quadrature(u01, thresh, G, 0.25) == Approx(5.0 / 24.0).margin(1e-8));

  CHECK(expected_payment_quadrature(u01, BidStrategy::truthful(), G, 1.5) ==
        Approx(0.0).margin(1e-12));
}

TEST_CASE("payment equality of thresholding holds for eps = 0") {
  for (const auto& d : {u01, ValueDistribution::lognormal(0.25, 1.0)}) {
    const auto G = max_of_truthful(d, 1);
    const double m = monopoly_price(d);
    auto thresh = make_thresholded(d, {m, 0.0});
    const auto res_truth = exact_reserve(bid_distribution(d, BidStrategy::truthful()));
    const auto res_thresh = exact_reserve(bid_distribution(d, thresh));
    const double pay_truth =
        expected_payment_quadrature(d, BidStrategy::truthful(), G, res_truth.reserve_price);
    const double pay_thresh = expected_payment_quadrature(d, thresh, G, res_thresh.reserve_price);
    CHECK(pay_thresh == Approx(pay_truth).margin(1e-8 * std::max(1.0, pay_truth)));
    // and the utility does not drop
    const double u_truth =
        expected_utility_quadrature(d, BidStrategy::truthful(), G, res_truth.reserve_value);
    const double u_thresh = expected_utility_quadrature(d, thresh, G, res_thresh.reserve_value);
    CHECK(u_thresh >= u_truth - 1e-10);
  }
}

TEST_CASE("monte carlo matches quadrature for the lazy auction") {
  const auto G = max_of_truthful(u01, 1);
  const std::int64_t n = 400000;

  SECTION("two truthful bidders") {
    auto cfg = two_uniform(Mechanism::lazy_sp, BidStrategy::truthful());
    const auto stats = mc_simulate(cfg, n, 42);
    CHECK(stats.reserve_prices[0] == Approx(0.5).margin(1e-8));
    const double uq = expected_utility_quadrature(u01, BidStrategy::truthful(), G, 0.5);
    CHECK(std::abs(stats.utility[0] - uq) <= 3.0 * stats.utility_stderr[0]);
    CHECK(std::abs(stats.utility[1] - uq) <= 3.0 * stats.utility_stderr[1]);
    // welfare identity: welfare = revenue + sum of utilities (exact per round)
    CHECK(stats.welfare ==
          Approx(stats.seller_revenue + stats.utility[0] + stats.utility[1]).margin(1e-12));
    CHECK(stats.allocation_probability >= 0.0);
    CHECK(stats.allocation_probability <= 1.0);
  }

  SECTION("one thresholded bidder") {
    auto cfg = two_uniform(Mechanism::lazy_sp, make_thresholded(u01, {0.5, 0.0}));
    const auto stats = mc_simulate(cfg, n, 43);
    CHECK(stats.reserve_prices[0] == Approx(0.25).margin(1e-9));
    auto thresh = make_thresholded(u01, {0.5, 0.0});
    const double uq0 = expected_utility_quadrature(u01, thresh, G, 0.0);
    const auto G_thresh = max_of_strategies({{u01, thresh}});
    const double uq1 = expected_utility_quadrature(u01, BidStrategy::truthful(), G_thresh, 0.5);
    CHECK(std::abs(stats.utility[0] - uq0) <= 3.0 * stats.utility_stderr[0]);
    CHECK(std::abs(stats.utility[1] - uq1) <= 3.0 * stats.utility_stderr[1]);
    // quadrature welfare from the accounting identity
    const double pay0 = expected_payment_quadrature(u01, thresh, G, 0.25);
    const double pay1 = expected_payment_quadrature(u01, BidStrategy::truthful(), G_thresh, 0.5);
    const double welfare_q = uq0 + uq1 + pay0 + pay1;
    CHECK(std::abs(stats.welfare - welfare_q) <= 3.0 * stats.welfare_stderr);
    CHECK(welfare_q == Approx(0.632).margin(1e-3));
  }
}

TEST_CASE("lazy revenue invariance under one bidder thresholding") {
  const std::int64_t n = 600000;
  const auto truthful_stats =
      mc_simulate(two_uniform(Mechanism::lazy_sp, BidStrategy::truthful()), n, 7);
  const auto thresh_stats =
      mc_simulate(two_uniform(Mechanism::lazy_sp, make_thresholded(u01, {0.5, 0.0})), n, 7);
  const double tol = 3.0 * std::hypot(truthful_stats.seller_revenue_stderr,
                                      thresh_stats.seller_revenue_stderr);
  CHECK(std::abs(truthful_stats.seller_revenue - thresh_stats.seller_revenue) <= tol);
  // the truthful opponent's utility is unchanged as well
  const double tol_u =
      3.0 * std::hypot(truthful_stats.utility_stderr[1], thresh_stats.utility_stderr[1]);
  CHECK(std::abs(truthful_stats.utility[1] - thresh_stats.utility[1]) <= tol_u);
}

TEST_CASE("myerson auction with one thresholded bidder") {
  const std::int64_t n = 600000;
  auto cfg = two_uniform(Mechanism::myerson, make_thresholded(u01, {0.5, 0.0}));
  const auto stats = mc_simulate(cfg, n, 11);

  // 7/48 for the strategic bidder.
  CHECK(std::abs(stats.utility[0] - 7.0 / 48.0) <= 3.0 * stats.utility_stderr[0]);
  CHECK(stats.utility[0] == Approx(7.0 / 48.0).margin(1e-3));

  // Total revenue is invariant under thresholding.
  const auto truthful_stats =
      mc_simulate(two_uniform(Mechanism::myerson, BidStrategy::truthful()), n, 12);
  CHECK(truthful_stats.seller_revenue ==
        Approx(5.0 / 12.0).margin(3.0 * truthful_stats.seller_revenue_stderr));
  const double tol =
      3.0 * std::hypot(truthful_stats.seller_revenue_stderr, stats.seller_revenue_stderr);
  CHECK(std::abs(stats.seller_revenue - truthful_stats.seller_revenue) <= tol);
}

TEST_CASE("closed-form myerson uplift") {
  CHECK(myerson_uplift_closed_form(u01, 2) == Approx(1.0 / 16.0).margin(1e-9));
  CHECK(myerson_uplift_closed_form(u01, 3) == Approx(1.0 / 32.0).margin(1e-9));
  // psi >= 0 everywhere: nothing below the monopoly price to unlock.
  CHECK(myerson_uplift_closed_form(ValueDistribution::uniform(1.0, 2.0), 2) ==
        Approx(0.0).margin(1e-9));
}

TEST_CASE("uplift ordering across mechanisms") {
  const std::int64_t n = 600000;
  auto thresh = make_thresholded(u01, {0.5, 0.0});

  const auto lazy_truth =
      mc_simulate(two_uniform(Mechanism::lazy_sp, BidStrategy::truthful()), n, 21);
  const auto lazy_thresh = mc_simulate(two_uniform(Mechanism::lazy_sp, thresh), n, 22);
  const auto eager_truth =
      mc_simulate(two_uniform(Mechanism::eager_sp, BidStrategy::truthful()), n, 23);
  const auto eager_thresh = mc_simulate(two_uniform(Mechanism::eager_sp, thresh), n, 24);

  const double uplift_lazy = lazy_thresh.utility[0] - lazy_truth.utility[0];
  const double uplift_eager = eager_thresh.utility[0] - eager_truth.utility[0];
  const double uplift_myerson = myerson_uplift_closed_form(u01, 2);

  const double noise =
      3.0 * std::hypot(std::hypot(lazy_truth.utility_stderr[0], lazy_thresh.utility_stderr[0]),
                       std::hypot(eager_truth.utility_stderr[0], eager_thresh.utility_stderr[0]));
  CHECK(uplift_myerson >= uplift_lazy + noise);
  CHECK(uplift_eager >= uplift_lazy + noise);
}

TEST_CASE("simulation determinism") {
  auto cfg = two_uniform(Mechanism::lazy_sp, make_thresholded(u01, {0.5, 0.0}));
  const auto a = mc_simulate(cfg, 50000, 99, 1);
  const auto b = mc_simulate(cfg, 50000, 99, 4);
  // bit-identical across worker counts
  CHECK(a.utility[0] == b.utility[0]);
  CHECK(a.utility[1] == b.utility[1]);
  CHECK(a.seller_revenue == b.seller_revenue);
  CHECK(a.welfare == b.welfare);
  const auto c = mc_simulate(cfg, 50000, 100, 2);
  CHECK(a.utility[0] != c.utility[0]);  // different seed, different stream
}

TEST_CASE("reserve policies") {
  SECTION("fixed reserves must match the bidder count") {
    auto cfg = two_uniform(Mechanism::lazy_sp, BidStrategy::truthful());
    cfg.reserve_policy = ReservePolicy::fixed({0.5});
    CHECK_THROWS_AS(mc_simulate(cfg, 10, 1), std::invalid_argument);
  }

  SECTION("no reserve at all = fixed zeros") {
    auto cfg = two_uniform(Mechanism::lazy_sp, BidStrategy::truthful());
    cfg.reserve_policy = ReservePolicy::fixed({0.0, 0.0});
    const auto stats = mc_simulate(cfg, 400000, 5);
    // E[second of two uniforms] = 1/3, utility 1/6 each.
    CHECK(std::abs(stats.seller_revenue - 1.0 / 3.0) <= 3.0 * stats.seller_revenue_stderr);
    CHECK(std::abs(stats.utility[0] - 1.0 / 6.0) <= 3.0 * stats.utility_stderr[0]);
    CHECK(stats.allocation_probability == Approx(1.0));
  }

  SECTION("sample-based reserves land near the exact ones") {
    auto cfg = two_uniform(Mechanism::lazy_sp, BidStrategy::truthful());
    cfg.reserve_policy = ReservePolicy::erm(200000, 77);
    const auto stats = mc_simulate(cfg, 10, 1);
    CHECK(stats.reserve_prices[0] == Approx(0.5).margin(0.02));
    CHECK(stats.reserve_prices[1] == Approx(0.5).margin(0.02));
  }

  SECTION("round count must be positive") {
    auto cfg = two_uniform(Mechanism::lazy_sp, BidStrategy::truthful());
    CHECK_THROWS_AS(mc_simulate(cfg, 0, 1), std::invalid_argument);
  }
}
