#pragma once

// Mechanism evaluation: exact quadrature of bidder utility and payment via
// the integrated Myerson lemma, and Monte Carlo simulation of lazy second
// price, eager second price and Myerson auctions.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "auctionlab/competition.hpp"
#include "auctionlab/quadrature.hpp"
#include "auctionlab/rng.hpp"
#include "auctionlab/seller.hpp"
#include "auctionlab/strategy.hpp"

namespace auctionlab {

enum class Mechanism { lazy_sp, eager_sp, myerson };

struct Bidder {
  ValueDistribution dist;
  BidStrategy strategy;
};

enum class ReservePolicyKind { exact_monopoly_per_bidder, erm_per_bidder, fixed };

struct ReservePolicy {
  ReservePolicyKind kind = ReservePolicyKind::exact_monopoly_per_bidder;
  long erm_samples = 0;
  std::uint64_t erm_seed = 0;
  std::vector<double> fixed_reserves;

  static ReservePolicy exact() { return {}; }
  static ReservePolicy erm(long n_samples, std::uint64_t seed) {
    ReservePolicy p;
    p.kind = ReservePolicyKind::erm_per_bidder;
    p.erm_samples = n_samples;
    p.erm_seed = seed;
    return p;
  }
  static ReservePolicy fixed(std::vector<double> reserves) {
    ReservePolicy p;
    p.kind = ReservePolicyKind::fixed;
    p.fixed_reserves = std::move(reserves);
    return p;
  }
};

struct AuctionConfig {
  Mechanism mechanism = Mechanism::lazy_sp;
  std::vector<Bidder> bidders;
  ReservePolicy reserve_policy;
  bool seller_welfare_benevolent = true;
};

struct OutcomeStats {
  std::vector<double> utility;
  std::vector<double> utility_stderr;
  double seller_revenue = 0.0, seller_revenue_stderr = 0.0;
  double welfare = 0.0, welfare_stderr = 0.0;
  double allocation_probability = 0.0, allocation_probability_stderr = 0.0;
  std::vector<double> reserve_prices;
};

// Expected utility of one bidder against the competition law G with
// reserve value x_beta:
//   U = E[(X - h(X)) G(beta(X)) 1(X >= x_beta)].
// The integral runs in u = F(x) space; with analytic h the integrand is
// bounded even for thresholded strategies near the support top.
inline double expected_utility_quadrature(const ValueDistribution& d, const BidStrategy& s,
                                          const CompetitionDistribution& G, double x_beta,
                                          const QuadratureOptions& opt = {}) {
  const double lo = d.support_lo(), hi = d.support_hi();
  if (x_beta < lo || x_beta > hi)
    throw std::domain_error("expected_utility_quadrature: reserve value outside support");
  std::vector<double> cuts;
  for (double k : s.kinks()) cuts.push_back(d.cdf(k));
  for (double b : G.breakpoints()) cuts.push_back(d.cdf(invert_bid(s, lo, hi, b)));
  auto integrand = [&](double u) {
    const double x = d.quantile(u);
    return (x - h_beta(d, s, x)) * G.cdf(s.bid(x));
  };
  return integrate_adaptive(integrand, d.cdf(x_beta), 1.0, opt, cuts);
}

// Expected payment E[ psi_B(B) G(B) 1(B >= r) ] written in value space.
inline double expected_payment_quadrature(const ValueDistribution& d, const BidStrategy& s,
                                          const CompetitionDistribution& G, double reserve_price,
                                          const QuadratureOptions& opt = {}) {
  return expected_payment_at_reserve(d, s, G, reserve_price, opt);
}

// Extra Myerson-auction utility unlocked by thresholding at the monopoly
// price (symmetric setting, one strategic bidder, eps -> 0):
//   F(m)^{K-1} * E[X 1(X <= m)],  m = psi^{-1}(0).
inline double myerson_uplift_closed_form(const ValueDistribution& d, int K) {
  if (K < 1) throw std::invalid_argument("myerson_uplift_closed_form: K must be >= 1");
  const double lo = d.support_lo(), hi = d.support_hi();
  // Regularity check: psi nondecreasing on an interior grid.
  double prev = -HUGE_VAL;
  for (int i = 1; i < 512; ++i) {
    const double x = d.quantile(i / 512.0);
    const double psi = virtual_value(d, x);
    if (psi < prev - 1e-9 * std::max(1.0, std::abs(prev)))
      throw std::domain_error("myerson_uplift_closed_form: non-regular distribution");
    prev = psi;
  }
  const double m = monopoly_price(d);
  const double um = d.cdf(m);
  auto integrand = [&](double u) { return d.quantile(u); };
  const double mass_below = integrate_adaptive(integrand, d.cdf(lo), um);
  (void)hi;
  return std::pow(d.cdf(m), K - 1) * mass_below;
}

namespace detail {

// Price paid by the Myerson winner: the smallest bid whose virtualized
// value still clears `level`. h is nondecreasing for the supported
// strategies, so the positive branch inverts by bisection; the flat h = eps
// region of a thresholded strategy inverts to its minimum bid.
inline double myerson_price(const ValueDistribution& d, const BidStrategy& s, double level) {
  const double lo = d.support_lo(), hi = d.support_hi();
  if (h_beta(d, s, lo, Side::right) >= level) return s.bid(lo);
  double a = lo, b = hi;
  const double tol = 1e-10 * std::max(1.0, hi - lo);
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    (h_beta(d, s, m) >= level ? b : a) = m;
  }
  return s.bid(b);
}

struct ChunkAccum {
  std::vector<double> util, util_sq;
  double revenue = 0.0, revenue_sq = 0.0;
  double welfare = 0.0, welfare_sq = 0.0;
  double sales = 0.0;
};

}  // namespace detail

// Reserve prices fixed in stage 1 of the two-stage game, before any
// simulated rounds are played.
inline std::vector<double> resolve_reserves(const AuctionConfig& cfg, std::uint64_t seed) {
  const std::size_t K = cfg.bidders.size();
  std::vector<double> reserves(K, 0.0);
  switch (cfg.reserve_policy.kind) {
    case ReservePolicyKind::fixed:
      if (cfg.reserve_policy.fixed_reserves.size() != K)
        throw std::invalid_argument("fixed reserves must match bidder count");
      return cfg.reserve_policy.fixed_reserves;
    case ReservePolicyKind::exact_monopoly_per_bidder:
      for (std::size_t i = 0; i < K; ++i)
        reserves[i] =
            exact_reserve(BidDistribution(cfg.bidders[i].dist, cfg.bidders[i].strategy))
                .reserve_price;
      return reserves;
    case ReservePolicyKind::erm_per_bidder: {
      if (cfg.reserve_policy.erm_samples < 1)
        throw std::invalid_argument("erm reserve policy: n_samples must be >= 1");
      for (std::size_t i = 0; i < K; ++i) {
        const std::uint64_t key =
            derive_key(derive_key(cfg.reserve_policy.erm_seed ? cfg.reserve_policy.erm_seed : seed,
                                  0x45524du /*stage-1 tag*/),
                       i);
        std::vector<double> bids(static_cast<std::size_t>(cfg.reserve_policy.erm_samples));
        for (std::size_t j = 0; j < bids.size(); ++j)
          bids[j] = cfg.bidders[i].strategy.bid(cfg.bidders[i].dist.quantile(uniform01(key, j)));
        std::sort(bids.begin(), bids.end());
        reserves[i] = erm_reserve(bids);
      }
      return reserves;
    }
  }
  throw std::logic_error("unreachable");
}

// Plays n_rounds i.i.d. auctions under reserves fixed in stage 1. Rounds
// are counter-indexed: the t-th draw of bidder i depends only on (seed, i,
// t), and per-chunk partial sums reduce in chunk order, so the result is
// identical for any worker count.
inline OutcomeStats mc_simulate(const AuctionConfig& cfg, std::int64_t n_rounds,
                                std::uint64_t seed, int max_threads = 0) {
  const std::size_t K = cfg.bidders.size();
  if (K < 1) throw std::invalid_argument("mc_simulate: need at least one bidder");
  if (n_rounds < 1) throw std::invalid_argument("mc_simulate: n_rounds must be >= 1");

  const std::vector<double> reserves = resolve_reserves(cfg, seed);

  if (cfg.mechanism == Mechanism::myerson) {
    // The per-round price inversion requires nondecreasing virtualized bids.
    for (const auto& bidder : cfg.bidders) {
      double prev = -HUGE_VAL;
      for (int i = 1; i < 256; ++i) {
        const double x = bidder.dist.quantile(i / 256.0);
        const double h = h_beta(bidder.dist, bidder.strategy, x);
        if (h < prev - 1e-9 * std::max(1.0, std::abs(prev)))
          throw std::domain_error("mc_simulate: myerson requires nondecreasing virtualized bids");
        prev = h;
      }
    }
  }

  std::vector<std::uint64_t> keys(K);
  for (std::size_t i = 0; i < K; ++i) keys[i] = derive_key(derive_key(seed, 0x524e44u), i);

  const std::int64_t chunk_size = 1 << 15;
  const std::int64_t n_chunks = (n_rounds + chunk_size - 1) / chunk_size;
  std::vector<detail::ChunkAccum> chunks(static_cast<std::size_t>(n_chunks));

  auto play_chunk = [&](std::int64_t c) {
    detail::ChunkAccum acc;
    acc.util.assign(K, 0.0);
    acc.util_sq.assign(K, 0.0);
    std::vector<double> value(K), bid(K), vbid(K);
    const std::int64_t begin = c * chunk_size;
    const std::int64_t end = std::min(n_rounds, begin + chunk_size);
    for (std::int64_t t = begin; t < end; ++t) {
      for (std::size_t i = 0; i < K; ++i) {
        value[i] = cfg.bidders[i].dist.quantile(uniform01(keys[i], static_cast<std::uint64_t>(t)));
        bid[i] = cfg.bidders[i].strategy.bid(value[i]);
      }
      std::size_t winner = K;  // K means no sale
      double price = 0.0;
      switch (cfg.mechanism) {
        case Mechanism::lazy_sp: {
          std::size_t top = 0;
          for (std::size_t i = 1; i < K; ++i)
            if (bid[i] > bid[top]) top = i;
          if (bid[top] >= reserves[top]) {
            double second = -HUGE_VAL;
            for (std::size_t i = 0; i < K; ++i)
              if (i != top) second = std::max(second, bid[i]);
            winner = top;
            price = std::max(second, reserves[top]);
          }
          break;
        }
        case Mechanism::eager_sp: {
          std::size_t top = K;
          for (std::size_t i = 0; i < K; ++i)
            if (bid[i] >= reserves[i] && (top == K || bid[i] > bid[top])) top = i;
          if (top != K) {
            double second = -HUGE_VAL;
            for (std::size_t i = 0; i < K; ++i)
              if (i != top && bid[i] >= reserves[i]) second = std::max(second, bid[i]);
            winner = top;
            price = std::max(second, reserves[top]);
          }
          break;
        }
        case Mechanism::myerson: {
          std::size_t top = 0;
          for (std::size_t i = 0; i < K; ++i) {
            vbid[i] = h_beta(cfg.bidders[i].dist, cfg.bidders[i].strategy, value[i]);
            if (vbid[i] > vbid[top]) top = i;
          }
          const bool sale =
              cfg.seller_welfare_benevolent ? vbid[top] >= 0.0 : vbid[top] > 0.0;
          if (sale) {
            double second = 0.0;
            for (std::size_t i = 0; i < K; ++i)
              if (i != top) second = std::max(second, vbid[i]);
            winner = top;
            price = detail::myerson_price(cfg.bidders[top].dist, cfg.bidders[top].strategy, second);
          }
          break;
        }
      }
      if (winner != K) {
        const double u = value[winner] - price;
        acc.util[winner] += u;
        acc.util_sq[winner] += u * u;
        acc.revenue += price;
        acc.revenue_sq += price * price;
        acc.welfare += value[winner];
        acc.welfare_sq += value[winner] * value[winner];
        acc.sales += 1.0;
      }
    }
    chunks[static_cast<std::size_t>(c)] = std::move(acc);
  };

  int workers = max_threads > 0 ? max_threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp<int>(workers, 1, static_cast<int>(n_chunks));
  if (workers == 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) play_chunk(c);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::int64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) play_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  // Fixed-order reduction keeps the result independent of scheduling.
  std::vector<double> util(K, 0.0), util_sq(K, 0.0);
  double rev = 0.0, rev_sq = 0.0, wel = 0.0, wel_sq = 0.0, sales = 0.0;
  for (const auto& acc : chunks) {
    if (acc.util.empty()) continue;
    for (std::size_t i = 0; i < K; ++i) {
      util[i] += acc.util[i];
      util_sq[i] += acc.util_sq[i];
    }
    rev += acc.revenue;
    rev_sq += acc.revenue_sq;
    wel += acc.welfare;
    wel_sq += acc.welfare_sq;
    sales += acc.sales;
  }

  const double n = static_cast<double>(n_rounds);
  auto stderr_of = [n](double sum, double sum_sq) {
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return std::sqrt(var / n);
  };

  OutcomeStats out;
  out.utility.resize(K);
  out.utility_stderr.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    out.utility[i] = util[i] / n;
    out.utility_stderr[i] = stderr_of(util[i], util_sq[i]);
  }
  out.seller_revenue = rev / n;
  out.seller_revenue_stderr = stderr_of(rev, rev_sq);
  out.welfare = wel / n;
  out.welfare_stderr = stderr_of(wel, wel_sq);
  out.allocation_probability = sales / n;
  out.allocation_probability_stderr = stderr_of(sales, sales);
  out.reserve_prices = reserves;
  return out;
}

}  // namespace auctionlab
